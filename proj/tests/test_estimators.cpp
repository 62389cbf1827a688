#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lexdiv/entropy.hpp"
#include "lexdiv/stats.hpp"
#include "lexdiv/synth.hpp"

using namespace lexdiv;

namespace {

FrequencyTable table_from_counts(std::vector<std::uint64_t> counts) {
    std::vector<VocabEntry> vocab;
    for (std::size_t i = 0; i < counts.size(); ++i)
        vocab.push_back({"w" + std::to_string(i), counts[i]});
    return frequency_table_from_vocab(vocab);
}

}  // namespace

TEST(PluginEntropy, TwoTypeTexts) {
    EXPECT_NEAR(plugin_entropy({5, 5}).value, 0.69, 0.005);
    EXPECT_NEAR(plugin_entropy({2, 8}).value, 0.50, 0.005);
    EXPECT_NEAR(plugin_entropy({1, 9}).value, 0.33, 0.005);
    EXPECT_DOUBLE_EQ(plugin_entropy({7}).value, 0.0);
    // high-precision values of the same distributions
    EXPECT_NEAR(plugin_entropy({5, 5}).value, std::log(2.0), 1e-15);
    EXPECT_NEAR(plugin_entropy({2, 8}).value, 0.5004024235381879, 1e-12);
    EXPECT_NEAR(plugin_entropy({1, 9}).value, 0.3250829733914482, 1e-12);
}

TEST(PluginEntropy, Metadata) {
    auto e = plugin_entropy({3, 1});
    EXPECT_EQ(e.estimator, Estimator::plugin);
    EXPECT_FALSE(e.posterior_std.has_value());
}

TEST(PluginEntropy, DomainErrors) {
    EXPECT_THROW(plugin_entropy(std::vector<std::uint64_t>{}), DomainError);
    EXPECT_THROW(plugin_entropy({3, 0, 2}), DomainError);
}

TEST(PluginEntropy, ScaleInvariant) {
    std::vector<std::uint64_t> counts{12, 7, 7, 3, 1, 1, 1};
    std::vector<std::uint64_t> scaled;
    for (auto c : counts) scaled.push_back(c * 1000);
    EXPECT_DOUBLE_EQ(plugin_entropy(counts).value, plugin_entropy(scaled).value);
}

TEST(PluginEntropy, UniformGivesLogV) {
    for (std::uint64_t v : {2ull, 3ull, 10ull, 1000ull, 65536ull}) {
        std::vector<std::uint64_t> counts(v, 17);
        EXPECT_NEAR(plugin_entropy(counts).value, std::log(static_cast<double>(v)),
                    1e-12 * std::log(static_cast<double>(v)) + 1e-15);
        EXPECT_LE(plugin_entropy(counts).value,
                  std::log(static_cast<double>(v)) + 1e-12);
    }
}

TEST(PartialEntropy, TwoEqualTypes) {
    auto t = table_from_counts({5, 5});
    auto curve = partial_entropy_curve(t);
    ASSERT_EQ(curve.size(), 2u);
    EXPECT_EQ(curve[0].first, 1u);
    EXPECT_NEAR(curve[0].second, 0.347, 5e-4);
    EXPECT_EQ(curve[1].first, 2u);
    EXPECT_NEAR(curve[1].second, 0.693, 5e-4);
}

TEST(PartialEntropy, LastPointEqualsPluginExactly) {
    GeneratorSpec spec;
    spec.kind = DistKind::piecewise_zipf;
    spec.V = 2000;
    spec.a1 = 1.0;
    spec.a2 = 1.9;
    spec.r_c = 150;
    spec.L = 300000;
    spec.seed = 11;
    auto t = frequency_table(gen_corpus(spec));
    auto curve = partial_entropy_curve(t);
    ASSERT_EQ(curve.size(), t.entries.size());
    // bitwise identical: same summation routine, same order
    EXPECT_EQ(curve.back().second, plugin_entropy(t).value);
}

TEST(PartialEntropy, MonotoneAndMatchesCumulativeOracle) {
    auto t = table_from_counts({40, 20, 10, 10, 5, 3, 1, 1});
    auto curve = partial_entropy_curve(t);
    const double L = 90.0;
    double acc = 0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        double p = static_cast<double>(t.entries[i].count) / L;
        acc += -p * std::log(p);
        EXPECT_NEAR(curve[i].second, acc, 1e-12);
        if (i) EXPECT_GE(curve[i].second, curve[i - 1].second);
    }
}

TEST(RhEmpirical, TrivialCases) {
    auto t = table_from_counts({5, 5});
    EXPECT_DOUBLE_EQ(r_h_empirical(t, 3), 0.0);  // one past the last rank
    EXPECT_DOUBLE_EQ(r_h_empirical(t, 2), 0.5);
    EXPECT_THROW(r_h_empirical(t, 1), DomainError);
    EXPECT_THROW(r_h_empirical(t, 4), DomainError);
}

TEST(RhEmpirical, MatchesTailSumOracleAndComplement) {
    GeneratorSpec spec;
    spec.kind = DistKind::piecewise_zipf;
    spec.V = 10000;
    spec.a1 = 1.12;
    spec.a2 = 1.86;
    spec.r_c = 500;
    spec.L = 1000000;
    spec.seed = 4;
    auto t = frequency_table(gen_corpus(spec));
    const double L = static_cast<double>(t.total_tokens);
    const std::uint64_t rc_cases[] = {2, 100, 500, t.entries.size()};
    for (std::uint64_t rc : rc_cases) {
        double head = 0, tail = 0;
        for (const auto& e : t.entries) {
            double p = static_cast<double>(e.count) / L;
            (e.rank >= rc ? tail : head) += -p * std::log(p);
        }
        double got = r_h_empirical(t, rc);
        EXPECT_NEAR(got, tail / (head + tail), 1e-10);
        EXPECT_GE(got, 0.0);
        EXPECT_LE(got, 1.0);
        // head share and tail share sum to one
        EXPECT_NEAR(got + head / (head + tail), 1.0, 1e-12);
    }
}

namespace {

// independent evaluation of the piecewise-normalization tail share
double rh_theory_oracle(double a1, double a2, std::uint64_t rc, std::uint64_t V,
                        std::uint64_t L) {
    long double S1 = 0, S2 = 0;
    for (std::uint64_t r = 1; r < rc; ++r) S1 += std::pow(static_cast<long double>(r), -a1);
    for (std::uint64_t r = rc; r <= V; ++r) S2 += std::pow(static_cast<long double>(r), -a2);
    const long double c1 = L / (S1 + S2);
    const long double c2 = L / (std::pow(static_cast<long double>(rc), a1 - a2) * S1 + S2);
    long double head = 0, tail = 0;
    for (std::uint64_t r = 1; r < rc; ++r) {
        long double p = c1 * std::pow(static_cast<long double>(r), -a1) / L;
        head += -p * std::log(p);
    }
    for (std::uint64_t r = rc; r <= V; ++r) {
        long double p = c2 * std::pow(static_cast<long double>(r), -a2) / L;
        tail += -p * std::log(p);
    }
    return static_cast<double>(tail / (head + tail));
}

}  // namespace

TEST(RhTheoretical, PublishedParameterBands) {
    double spgc = r_h_theoretical(1.12, 1.86, 7947, 3100000, 2620000000ull);
    double trcc = r_h_theoretical(0.91, 1.83, 28744, 9800000, 2640000000ull);
    double twes = r_h_theoretical(1.10, 1.87, 15057, 4300000, 1800000000ull);
    EXPECT_NEAR(spgc, 0.13, 0.02);
    EXPECT_NEAR(trcc, 0.21, 0.02);
    EXPECT_NEAR(twes, 0.13, 0.02);
}

TEST(RhTheoretical, MatchesDirectSummationOracle) {
    EXPECT_NEAR(r_h_theoretical(1.0, 1.8, 50, 1000, 100000),
                rh_theory_oracle(1.0, 1.8, 50, 1000, 100000), 1e-9);
    // tail of exactly one rank
    EXPECT_NEAR(r_h_theoretical(1.0, 1.8, 1000, 1000, 100000),
                rh_theory_oracle(1.0, 1.8, 1000, 1000, 100000), 1e-9);
    EXPECT_NEAR(r_h_theoretical(1.12, 1.86, 500, 10000, 1000000),
                rh_theory_oracle(1.12, 1.86, 500, 10000, 1000000), 1e-9);
}

TEST(RhTheoretical, DomainErrors) {
    EXPECT_THROW(r_h_theoretical(0.0, 1.8, 50, 1000, 100000), DomainError);
    EXPECT_THROW(r_h_theoretical(1.0, -1.0, 50, 1000, 100000), DomainError);
    EXPECT_THROW(r_h_theoretical(1.0, 1.8, 1, 1000, 100000), DomainError);
    EXPECT_THROW(r_h_theoretical(1.0, 1.8, 1001, 1000, 100000), DomainError);
    EXPECT_THROW(r_h_theoretical(1.0, 1.8, 50, 1000, 999), DomainError);
}

TEST(ZipfEntropyExact, SmallClosedForms) {
    EXPECT_DOUBLE_EQ(zipf_entropy_exact(1, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(zipf_entropy_exact(1, 2.7), 0.0);
    // V=2, a=1: atoms (2/3, 1/3)
    const double h2 = -(2.0 / 3) * std::log(2.0 / 3) - (1.0 / 3) * std::log(1.0 / 3);
    EXPECT_NEAR(zipf_entropy_exact(2, 1.0), h2, 1e-14);
    EXPECT_NEAR(zipf_entropy_exact(2, 1.0), 0.6365, 5e-5);
}

TEST(ZipfEntropyExact, NearAsymptoteAtLargeV) {
    const double v = 1e6;
    const double asym = 0.5 * std::log(v) + std::log(std::log(v));
    EXPECT_NEAR(zipf_entropy_exact(1000000, 1.0) / asym, 1.0, 0.05);
}

TEST(ZipfEntropyExact, StrictlyIncreasingInV) {
    double prev = -1;
    for (std::uint64_t v = 1; v <= (1u << 20); v *= 2) {
        double h = zipf_entropy_exact(v, 1.0);
        EXPECT_GT(h, prev);
        prev = h;
    }
}

TEST(ZipfEntropyExact, AgreesWithGeneratorProbabilityOracle) {
    GeneratorSpec spec;
    spec.V = 5000;
    spec.a = 1.3;
    spec.L = 1;
    auto p = spec_probabilities(spec);
    double h = 0;
    for (double x : p) h += -x * std::log(x);
    EXPECT_NEAR(zipf_entropy_exact(5000, 1.3), h, 1e-10);
}
