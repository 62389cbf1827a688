#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "lexdiv/entropy.hpp"
#include "lexdiv/sampler.hpp"
#include "lexdiv/stats.hpp"
#include "lexdiv/synth.hpp"

using namespace lexdiv;

namespace {

TokenizedCorpus zipf_corpus(std::uint64_t V, double a, std::uint64_t L, std::uint64_t seed) {
    GeneratorSpec spec;
    spec.V = V;
    spec.a = a;
    spec.L = L;
    spec.seed = seed;
    return gen_corpus(spec);
}

bool rows_identical(const std::vector<SeriesRow>& a, const std::vector<SeriesRow>& b) {
    if (a.size() != b.size()) return false;
    auto same = [](double x, double y) {
        return (std::isnan(x) && std::isnan(y)) || x == y;
    };
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].l != b[i].l) return false;
        if (!same(a[i].mean_h_pi, b[i].mean_h_pi) || !same(a[i].std_h_pi, b[i].std_h_pi) ||
            !same(a[i].mean_h_nsb, b[i].mean_h_nsb) || !same(a[i].std_h_nsb, b[i].std_h_nsb) ||
            !same(a[i].mean_v, b[i].mean_v) || !same(a[i].std_v, b[i].std_v) ||
            !same(a[i].mean_ttr, b[i].mean_ttr) || !same(a[i].std_ttr, b[i].std_ttr))
            return false;
    }
    return true;
}

}  // namespace

TEST(SampleSeries, DeterministicAndThreadCountInvariant) {
    auto corpus = zipf_corpus(20000, 1.0, 1000000, 5);
    SamplePlan plan;
    plan.step = 100000;
    plan.replicates = 10;
    plan.seed = 1;
    auto r1 = sample_series(corpus, plan, {}, 1).rows();
    auto r1b = sample_series(corpus, plan, {}, 1).rows();
    auto r4 = sample_series(corpus, plan, {}, 4).rows();
    auto r8 = sample_series(corpus, plan, {}, 8).rows();
    EXPECT_EQ(r1.size(), 10u);
    EXPECT_TRUE(rows_identical(r1, r1b));
    EXPECT_TRUE(rows_identical(r1, r4));
    EXPECT_TRUE(rows_identical(r1, r8));
    // a different seed must actually change the draw
    plan.seed = 2;
    EXPECT_FALSE(rows_identical(r1, sample_series(corpus, plan, {}, 4).rows()));
}

TEST(SampleSeries, ReplicateLayoutFollowsThePlan) {
    auto corpus = zipf_corpus(5000, 1.0, 300000, 9);
    SamplePlan plan;
    plan.step = 50000;
    plan.replicates = 7;
    plan.seed = 3;
    auto s = sample_series(corpus, plan);
    ASSERT_EQ(s.lengths.size(), 6u);
    for (std::size_t i = 0; i < s.lengths.size(); ++i) {
        EXPECT_EQ(s.lengths[i].l, (i + 1) * 50000);
        EXPECT_EQ(s.lengths[i].h_plugin.size(), 7u);
        EXPECT_EQ(s.lengths[i].vocab_sizes.size(), 7u);
        EXPECT_EQ(s.lengths[i].ttr_values.size(), 7u);
        EXPECT_TRUE(s.lengths[i].h_nsb.empty());
        for (std::size_t k = 0; k < 7; ++k) {
            EXPECT_GT(s.lengths[i].ttr_values[k], 0.0);
            EXPECT_LE(s.lengths[i].ttr_values[k], 1.0);
            EXPECT_LE(s.lengths[i].vocab_sizes[k], s.lengths[i].l);
            // TTR is V/l exactly, per replicate
            EXPECT_DOUBLE_EQ(s.lengths[i].ttr_values[k],
                             static_cast<double>(s.lengths[i].vocab_sizes[k]) /
                                 static_cast<double>(s.lengths[i].l));
        }
    }
}

TEST(SampleSeries, FullLengthFragmentEqualsWholeCorpus) {
    auto corpus = zipf_corpus(3000, 1.0, 200000, 4);
    SamplePlan plan;
    plan.step = 200000;
    plan.replicates = 5;
    plan.l_min = 200000;
    plan.l_max = 200000;
    auto rows = sample_series(corpus, plan).rows();
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].l, corpus.total_tokens);
    EXPECT_DOUBLE_EQ(rows[0].std_h_pi, 0.0);
    EXPECT_DOUBLE_EQ(rows[0].std_v, 0.0);
    EXPECT_DOUBLE_EQ(rows[0].std_ttr, 0.0);
    EXPECT_DOUBLE_EQ(rows[0].mean_v, static_cast<double>(corpus.observed_types()));
    EXPECT_DOUBLE_EQ(rows[0].mean_h_pi, plugin_entropy(frequency_table(corpus)).value);
}

TEST(SampleSeries, VocabularySpreadIsSmallAtLargeFragmentLengths) {
    auto corpus = zipf_corpus(50000, 1.0, 4000000, 1);
    SamplePlan plan;
    plan.step = 500000;
    plan.replicates = 25;
    plan.seed = 1;
    for (const auto& r : sample_series(corpus, plan).rows())
        if (r.l >= 1000000) EXPECT_LT(r.std_v / r.mean_v, 0.05) << "l=" << r.l;
}

TEST(SampleSeries, MeansAreMonotoneAcrossLengths) {
    int ok_v = 0, ok_ttr = 0, total = 0;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto corpus = zipf_corpus(20000, 1.0, 1000000, seed);
        SamplePlan plan;
        plan.step = 100000;
        plan.replicates = 10;
        plan.seed = seed;
        auto rows = sample_series(corpus, plan).rows();
        for (std::size_t i = 1; i < rows.size(); ++i) {
            ++total;
            ok_v += rows[i].mean_v >= rows[i - 1].mean_v;
            ok_ttr += rows[i].mean_ttr <= rows[i - 1].mean_ttr;
        }
    }
    EXPECT_GE(ok_v, total * 95 / 100);
    EXPECT_GE(ok_ttr, total * 95 / 100);
}

TEST(SampleSeries, NsbColumnOnRequest) {
    auto corpus = zipf_corpus(2000, 1.0, 100000, 6);
    SamplePlan plan;
    plan.step = 25000;
    plan.replicates = 5;
    EstimatorChoice est;
    est.nsb = true;
    auto s = sample_series(corpus, plan, est);
    EXPECT_TRUE(s.has_nsb);
    for (const auto& ls : s.lengths) {
        ASSERT_EQ(ls.h_nsb.size(), ls.h_plugin.size());
        for (std::size_t k = 0; k < ls.h_nsb.size(); ++k) {
            EXPECT_TRUE(std::isfinite(ls.h_nsb[k]));
            EXPECT_GE(ls.h_nsb[k], 0.0);
        }
    }
    for (const auto& r : s.rows()) {
        EXPECT_FALSE(std::isnan(r.mean_h_nsb));
        EXPECT_FALSE(std::isnan(r.std_h_nsb));
    }
    // without the flag the aggregate column is NaN
    auto plain = sample_series(corpus, plan);
    EXPECT_FALSE(plain.has_nsb);
    EXPECT_TRUE(std::isnan(plain.rows()[0].mean_h_nsb));
}

TEST(SampleSeries, PlanValidation) {
    auto corpus = zipf_corpus(500, 1.0, 10000, 2);
    SamplePlan bad;
    bad.step = 0;
    EXPECT_THROW(sample_series(corpus, bad), DomainError);
    SamplePlan reps;
    reps.step = 1000;
    reps.replicates = 0;
    EXPECT_THROW(sample_series(corpus, reps), DomainError);
    SamplePlan too_long;
    too_long.step = 1000;
    too_long.l_min = 20000;  // beyond the corpus
    EXPECT_THROW(sample_series(corpus, too_long), DomainError);
    SamplePlan inverted;
    inverted.step = 1000;
    inverted.l_min = 5000;
    inverted.l_max = 2000;
    EXPECT_THROW(sample_series(corpus, inverted), DomainError);
}

TEST(SelectFitRange, PicksTheBandInsideTheThresholds) {
    std::vector<SeriesRow> rows(4);
    const double sigmas[] = {0.05, 0.02, 0.01, 0.001};
    for (std::size_t i = 0; i < 4; ++i) {
        rows[i].l = (i + 1) * 100;
        rows[i].std_h_pi = sigmas[i];
    }
    auto r = select_fit_range(rows);
    EXPECT_FALSE(r.fallback);
    EXPECT_EQ(r.l_low, 200u);
    EXPECT_EQ(r.l_high, 300u);
}

TEST(SelectFitRange, FallsBackToCentralHalfWhenBandIsEmpty) {
    std::vector<SeriesRow> rows(8);
    for (std::size_t i = 0; i < 8; ++i) {
        rows[i].l = (i + 1) * 10;
        rows[i].std_h_pi = 0.5;  // all above the upper threshold
    }
    auto r = select_fit_range(rows);
    EXPECT_TRUE(r.fallback);
    EXPECT_EQ(r.lo_index, 2u);
    EXPECT_EQ(r.hi_index, 5u);
    EXPECT_EQ(r.l_low, 30u);
    EXPECT_EQ(r.l_high, 60u);
}

TEST(SelectFitRange, MatchesScanOracleOnRandomSigmaSequences) {
    std::mt19937_64 rng(77);
    for (int iter = 0; iter < 300; ++iter) {
        const std::size_t n = 3 + rng() % 30;
        std::vector<SeriesRow> rows(n);
        for (std::size_t i = 0; i < n; ++i) {
            rows[i].l = (i + 1) * 1000;
            rows[i].std_h_pi = 0.0005 * static_cast<double>(rng() % 100);
        }
        // oracle: first maximal run strictly inside (0.0025, 0.025)
        std::size_t best_lo = 0, best_len = 0, run_lo = 0, run_len = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (rows[i].std_h_pi > 0.0025 && rows[i].std_h_pi < 0.025) {
                if (run_len == 0) run_lo = i;
                if (++run_len > best_len) {
                    best_len = run_len;
                    best_lo = run_lo;
                }
            } else {
                run_len = 0;
            }
        }
        auto r = select_fit_range(rows);
        if (best_len == 0) {
            EXPECT_TRUE(r.fallback);
        } else {
            EXPECT_FALSE(r.fallback);
            EXPECT_EQ(r.lo_index, best_lo);
            EXPECT_EQ(r.hi_index, best_lo + best_len - 1);
        }
    }
}

TEST(SelectFitRange, RequiresThreeLengths) {
    std::vector<SeriesRow> rows(2);
    rows[0].l = 1;
    rows[1].l = 2;
    EXPECT_THROW(select_fit_range(rows), DomainError);
}

TEST(SeriesTsv, RoundTripsLosslessly) {
    auto corpus = zipf_corpus(2000, 1.0, 100000, 8);
    SamplePlan plan;
    plan.step = 20000;
    plan.replicates = 4;
    auto rows = sample_series(corpus, plan).rows();
    auto path = (std::filesystem::temp_directory_path() / "lexdiv_series_rt.tsv").string();
    write_series_tsv(rows, path);
    auto back = read_series_tsv(path);
    EXPECT_TRUE(rows_identical(rows, back));
    std::filesystem::remove(path);
}

TEST(SeriesTsv, RejectsMalformedFiles) {
    auto dir = std::filesystem::temp_directory_path();
    auto p1 = (dir / "lexdiv_series_bad1.tsv").string();
    {
        std::ofstream f(p1);
        f << "l\twrong\theader\n";
    }
    EXPECT_THROW(read_series_tsv(p1), FormatError);
    std::filesystem::remove(p1);
    EXPECT_THROW(read_series_tsv("/nonexistent/series.tsv"), IoError);
}
