#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lexdiv/relfit.hpp"
#include "lexdiv/rng.hpp"
#include "lexdiv/sampler.hpp"
#include "lexdiv/synth.hpp"

using namespace lexdiv;

namespace {

// log-spaced lengths with model-generated entropies, optional Gaussian noise
std::vector<SeriesRow> model_rows(double beta, double p1, double p2, double sigma,
                                  std::uint64_t seed, int n = 200, double l_lo = 1e3,
                                  double l_hi = 1e15) {
    std::vector<SeriesRow> rows;
    CounterRng rng(seed);
    const double step = (std::log(l_hi) - std::log(l_lo)) / (n - 1);
    for (int i = 0; i < n; ++i) {
        SeriesRow r;
        r.l = static_cast<std::uint64_t>(std::llround(std::exp(std::log(l_lo) + step * i)));
        const double L = static_cast<double>(r.l);
        r.mean_h_pi = model_h_of_l(L, beta, p1, p2);
        if (sigma > 0) {
            const double u1 = 1.0 - rng.uniform_at(2 * static_cast<std::uint64_t>(i));
            const double u2 = rng.uniform_at(2 * static_cast<std::uint64_t>(i) + 1);
            r.mean_h_pi += sigma * std::sqrt(-2.0 * std::log(u1)) *
                           std::cos(2.0 * 3.14159265358979323846 * u2);
        }
        r.mean_ttr = std::pow(L, beta - 1.0);
        r.std_h_pi = sigma;
        r.mean_h_nsb = r.std_h_nsb = std::numeric_limits<double>::quiet_NaN();
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

TEST(ModelHofL, DirectEvaluation) {
    EXPECT_NEAR(model_h_of_l(std::exp(4.0), 0.5, 1.0, 0.0), 0.25 * 4 + std::log(4.0), 1e-12);
    EXPECT_NEAR(model_h_of_l(std::exp(4.0), 0.5, 1.0, 0.0), 2.386, 5e-4);
    EXPECT_DOUBLE_EQ(model_h_of_l(100.0, 0.5, 0.0, 6.9), 6.9);
}

TEST(ModelHofL, StrictlyIncreasingInLength) {
    for (double L = 3.0; L < 1e12; L *= 1.7) {
        const double h = model_h_of_l(L, 0.55, 0.05, 6.9);
        const double dh = model_h_of_l(L * 1.001, 0.55, 0.05, 6.9) - h;
        EXPECT_GT(dh, 0.0);
        // numeric derivative of the closed form: p1 (beta/2 + 1/ln L) / L
        const double analytic = 0.05 * (0.55 / 2 + 1.0 / std::log(L)) / L * (0.001 * L);
        EXPECT_NEAR(dh, analytic, 0.05 * std::abs(analytic) + 1e-12);
    }
}

TEST(ModelHofL, DomainErrors) {
    EXPECT_THROW(model_h_of_l(2.0, 0.5, 1.0, 0.0), DomainError);
    EXPECT_THROW(model_h_of_l(100.0, 1.0, 1.0, 0.0), DomainError);
    EXPECT_THROW(model_h_of_l(100.0, 0.0, 1.0, 0.0), DomainError);
}

TEST(ModelHofTtr, DirectEvaluation) {
    EXPECT_NEAR(model_h_of_ttr(std::exp(-2.0), 0.5, 1.0, 0.0), 0.5 * 2 + std::log(2.0), 1e-12);
    EXPECT_NEAR(model_h_of_ttr(std::exp(-2.0), 0.5, 1.0, 0.0), 1.693, 5e-4);
}

TEST(ModelHofTtr, StrictlyDecreasingInTtr) {
    for (double t = 1e-9; t < std::exp(-1.0) / 1.01; t *= 2.2) {
        const double h0 = model_h_of_ttr(t, 0.55, 0.05, 6.9);
        const double h1 = model_h_of_ttr(t * 1.001, 0.55, 0.05, 6.9);
        EXPECT_LT(h1, h0);
    }
}

TEST(ModelHofTtr, DomainErrors) {
    EXPECT_THROW(model_h_of_ttr(0.4, 0.5, 1.0, 0.0), DomainError);  // >= e^-1
    EXPECT_THROW(model_h_of_ttr(0.0, 0.5, 1.0, 0.0), DomainError);
    EXPECT_THROW(model_h_of_ttr(0.1, 1.2, 1.0, 0.0), DomainError);
}

TEST(Models, SubstitutionIdentityConnectsTheTwoForms) {
    // with TTR = L^(beta-1), the TTR model equals the L model after mapping
    // the intercept by -p1 ln(1-beta)
    const double beta = 0.55, p1 = 0.05, p2 = 6.9;
    const double p4 = p2 - p1 * std::log(1 - beta);
    for (double L = 100; L < 1e14; L *= 3.7) {
        const double ttr_v = std::pow(L, beta - 1.0);
        EXPECT_NEAR(model_h_of_ttr(ttr_v, beta, p1, p4), model_h_of_l(L, beta, p1, p2), 1e-9);
    }
}

TEST(FitRelation, NoiselessDataRecoveredExactly) {
    auto rows = model_rows(0.55, 0.05, 6.9, 0.0, 0);
    auto f = fit_relation(rows, RelationKind::H_of_L, 0.55, rows.front().l, rows.back().l);
    EXPECT_NEAR(f.p_first, 0.05, 1e-9);
    EXPECT_NEAR(f.p_second, 6.9, 1e-9);
    EXPECT_NEAR(f.goodness.rho2, 1.0, 1e-12);
    EXPECT_NEAR(f.goodness.rho_s, 1.0, 1e-12);
    EXPECT_NEAR(f.goodness.rho_d, 1.0, 1e-9);
    EXPECT_LE(f.goodness.p_value, 1e-12);
    EXPECT_EQ(f.kind, RelationKind::H_of_L);
    EXPECT_DOUBLE_EQ(f.beta_used, 0.55);
}

TEST(FitRelation, NoisyParameterRecoveryWithinFivePercent) {
    auto rows = model_rows(0.55, 0.05, 6.9, 0.01, 42);
    auto f = fit_relation(rows, RelationKind::H_of_L, 0.55, rows.front().l, rows.back().l);
    EXPECT_NEAR(f.p_first, 0.05, 0.05 * 0.05);
    EXPECT_NEAR(f.p_second, 6.9, 0.05 * 6.9);
    EXPECT_GT(f.goodness.rho2, 0.99);
    EXPECT_GT(f.goodness.rho_s, 0.99);
    EXPECT_GT(f.goodness.rho_d, 0.99);
    EXPECT_LT(f.goodness.p_value, 1e-4);
}

TEST(FitRelation, TtrFormRecoversTheMappedParameters) {
    const double beta = 0.55, p1 = 0.05, p2 = 6.9;
    auto rows = model_rows(beta, p1, p2, 0.0, 0);
    auto fl = fit_relation(rows, RelationKind::H_of_L, beta, rows.front().l, rows.back().l);
    auto ft = fit_relation(rows, RelationKind::H_of_TTR, beta, rows.front().l, rows.back().l);
    EXPECT_NEAR(ft.p_first, fl.p_first, 1e-9);
    EXPECT_NEAR(ft.p_second, fl.p_second - p1 * std::log(1 - beta), 1e-8);
    EXPECT_NEAR(ft.goodness.rho2, 1.0, 1e-12);
    // noisy variant stays within five percent as well
    auto noisy = model_rows(beta, p1, p2, 0.01, 43);
    auto fn = fit_relation(noisy, RelationKind::H_of_TTR, beta, noisy.front().l, noisy.back().l);
    EXPECT_NEAR(fn.p_first, p1, 0.05 * p1);
    EXPECT_NEAR(fn.p_second, p2 - p1 * std::log(1 - beta), 0.05 * 7.0);
    EXPECT_GT(fn.goodness.rho2, 0.99);
}

TEST(FitRelation, RangeFilterAndValidation) {
    auto rows = model_rows(0.55, 0.05, 6.9, 0.0, 0, 50, 1e3, 1e9);
    // a range holding only two points
    EXPECT_THROW(
        fit_relation(rows, RelationKind::H_of_L, 0.55, rows[0].l, rows[1].l), DomainError);
    // degenerate regressor: identical lengths
    std::vector<SeriesRow> flat(5, rows[10]);
    EXPECT_THROW(
        fit_relation(flat, RelationKind::H_of_L, 0.55, 0, rows.back().l), DomainError);
    // NSB column requested but absent
    EXPECT_THROW(
        fit_relation(rows, RelationKind::H_of_L, 0.55, 0, rows.back().l, true), DomainError);
    // beta outside (0,1)
    EXPECT_THROW(
        fit_relation(rows, RelationKind::H_of_L, 1.5, 0, rows.back().l), DomainError);
}

TEST(CollapseHmax, FinalOrdinateIsZero) {
    std::vector<SeriesRow> rows(2);
    rows[0].l = 100;
    rows[0].mean_h_pi = 1.0;
    rows[0].mean_ttr = 0.5;
    rows[1].l = 200;
    rows[1].mean_h_pi = 1.5;
    rows[1].mean_ttr = 0.25;
    auto pts = collapse_h_max(rows);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_DOUBLE_EQ(pts[0].first, 0.5);
    EXPECT_DOUBLE_EQ(pts[0].second, -0.5);
    EXPECT_DOUBLE_EQ(pts[1].second, 0.0);

    auto noisy = model_rows(0.5, 0.06, 7.0, 0.01, 9, 40);
    auto pts2 = collapse_h_max(noisy);
    EXPECT_DOUBLE_EQ(pts2.back().second, 0.0);
    EXPECT_THROW(collapse_h_max(std::vector<SeriesRow>{}), DomainError);
}

TEST(CollapseHmax, DifferentGeneratorsCollapseOntoOneCurve) {
    auto collapse_of = [](std::uint64_t V, double a, std::uint64_t L, std::uint64_t step) {
        GeneratorSpec spec;
        spec.V = V;
        spec.a = a;
        spec.L = L;
        spec.seed = 21;
        auto corpus = gen_corpus(spec);
        SamplePlan plan;
        plan.step = step;
        plan.replicates = 10;
        plan.seed = 21;
        return collapse_h_max(sample_series(corpus, plan));
    };
    auto a_pts = collapse_of(10000, 1.0, 4000000, 400000);
    // the reference corpus runs longer so its TTR range brackets the first's
    auto b_pts = collapse_of(20000, 1.1, 12000000, 600000);
    // compare at common TTR values (linear interpolation in ln TTR)
    std::sort(b_pts.begin(), b_pts.end());
    int compared = 0;
    for (const auto& [t, dh] : a_pts) {
        if (t >= 1.5e-2) continue;
        auto it = std::lower_bound(b_pts.begin(), b_pts.end(), std::make_pair(t, -1e300));
        if (it == b_pts.begin() || it == b_pts.end()) continue;
        const auto [t1, y1] = *(it - 1);
        const auto [t2, y2] = *it;
        const double w = (std::log(t) - std::log(t1)) / (std::log(t2) - std::log(t1));
        const double interp = y1 + w * (y2 - y1);
        EXPECT_NEAR(dh, interp, 0.15) << "ttr=" << t;
        ++compared;
    }
    EXPECT_GE(compared, 5);
}

TEST(RSquared, Conventions) {
    std::vector<double> obs{1, 2, 3, 4, 7};
    EXPECT_DOUBLE_EQ(r_squared(obs, obs), 1.0);
    std::vector<double> at_mean(obs.size(), 3.4);
    EXPECT_NEAR(r_squared(obs, at_mean), 0.0, 1e-14);
    std::vector<double> flat(4, 2.0), pred{1, 2, 3, 4};
    EXPECT_THROW(r_squared(flat, pred), DomainError);
}

TEST(RSquared, MatchesFormulaOracle) {
    std::mt19937_64 rng(3);
    for (int iter = 0; iter < 20; ++iter) {
        std::vector<double> obs, pred;
        for (int i = 0; i < 30; ++i) {
            obs.push_back(static_cast<double>(rng() % 1000) / 100.0);
            pred.push_back(static_cast<double>(rng() % 1000) / 100.0);
        }
        double mean = 0;
        for (double v : obs) mean += v;
        mean /= static_cast<double>(obs.size());
        double ss_res = 0, ss_tot = 0;
        for (std::size_t i = 0; i < obs.size(); ++i) {
            ss_res += (obs[i] - pred[i]) * (obs[i] - pred[i]);
            ss_tot += (obs[i] - mean) * (obs[i] - mean);
        }
        EXPECT_NEAR(r_squared(obs, pred), 1 - ss_res / ss_tot, 1e-12);
    }
}

namespace {

// naive mid-rank assignment: rank = #smaller + (#equal + 1)/2
std::vector<double> naive_ranks(const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double less = 0, equal = 0;
        for (double x : v) {
            less += x < v[i];
            equal += x == v[i];
        }
        r[i] = less + (equal + 1) / 2;
    }
    return r;
}

double naive_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    long double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const long double mx = sx / x.size(), my = sy / y.size();
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

}  // namespace

TEST(Spearman, MonotoneDataIsExact) {
    std::vector<double> x, up, down;
    for (int i = 0; i < 25; ++i) {
        x.push_back(i * 0.7 - 3);
        up.push_back(std::exp(x.back()));    // strictly increasing transform
        down.push_back(-x.back() * x.back() * x.back());  // strictly decreasing
    }
    auto r1 = spearman(x, up);
    EXPECT_DOUBLE_EQ(r1.rho, 1.0);
    EXPECT_DOUBLE_EQ(r1.p_value, 0.0);
    auto r2 = spearman(x, down);
    EXPECT_DOUBLE_EQ(r2.rho, -1.0);
}

TEST(Spearman, TiedDataMatchesMidRankOracle) {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<double> x, y;
        const int n = 5 + static_cast<int>(rng() % 30);
        for (int i = 0; i < n; ++i) {
            x.push_back(static_cast<double>(rng() % 6));  // heavy ties
            y.push_back(static_cast<double>(rng() % 6));
        }
        // skip degenerate draws
        if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) continue;
        if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) continue;
        const double ref = naive_pearson(naive_ranks(x), naive_ranks(y));
        EXPECT_NEAR(spearman(x, y).rho, ref, 1e-12);
    }
}

TEST(Spearman, AffineAbscissaInvarianceAndErrors) {
    std::vector<double> x{1, 2, 3, 5, 8, 9}, y{2, 1, 5, 3, 9, 7};
    std::vector<double> x2;
    for (double v : x) x2.push_back(3.7 * v - 11.0);
    EXPECT_DOUBLE_EQ(spearman(x, y).rho, spearman(x2, y).rho);
    std::vector<double> flat(6, 1.0);
    EXPECT_THROW(spearman(flat, y), DomainError);
    EXPECT_THROW(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}), DomainError);
}

TEST(Spearman, PValueDropsAsSampleSizeGrows) {
    double prev = 1.1;
    for (int n : {20, 40, 80, 160, 320}) {
        std::vector<double> x, y;
        for (int i = 0; i < n; ++i) {
            const double t = 10.0 * i / (n - 1);
            x.push_back(t);
            y.push_back(t + 3.0 * std::sin(t));  // correlated but not monotone
        }
        const double p = spearman(x, y).p_value;
        EXPECT_LT(p, prev);
        prev = p;
    }
}

TEST(DistanceCorrelation, Conventions) {
    std::vector<double> x;
    for (int i = 0; i < 40; ++i) x.push_back(i * 0.25 - 5);
    EXPECT_NEAR(distance_correlation(x, x), 1.0, 1e-12);
    // nonlinear dependence is detected on a symmetric grid
    std::vector<double> y;
    for (double v : x) y.push_back(v * v);
    EXPECT_GT(distance_correlation(x, y), 0.4);
    // zero variance convention
    std::vector<double> flat(40, 1.0);
    EXPECT_DOUBLE_EQ(distance_correlation(x, flat), 0.0);
}

namespace {

double naive_dcor(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    auto centered = [n](const std::vector<double>& v) {
        std::vector<double> m(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m[i * n + j] = std::abs(v[i] - v[j]);
        std::vector<double> row(n, 0), col(n, 0);
        double grand = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                row[i] += m[i * n + j];
                col[j] += m[i * n + j];
                grand += m[i * n + j];
            }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                m[i * n + j] += -row[i] / n - col[j] / n + grand / (n * n);
        return m;
    };
    auto A = centered(x), B = centered(y);
    double vxy = 0, vxx = 0, vyy = 0;
    for (std::size_t k = 0; k < n * n; ++k) {
        vxy += A[k] * B[k];
        vxx += A[k] * A[k];
        vyy += B[k] * B[k];
    }
    if (vxx <= 0 || vyy <= 0) return 0;
    return std::sqrt(vxy / std::sqrt(vxx * vyy));
}

}  // namespace

TEST(DistanceCorrelation, MatchesBruteForceOracle) {
    std::mt19937_64 rng(23);
    for (int iter = 0; iter < 10; ++iter) {
        std::vector<double> x, y;
        for (int i = 0; i < 60; ++i) {
            x.push_back(static_cast<double>(rng() % 10000) / 100.0);
            y.push_back(static_cast<double>(rng() % 10000) / 100.0);
        }
        EXPECT_NEAR(distance_correlation(x, y), naive_dcor(x, y), 1e-12);
    }
}

TEST(DistanceCorrelation, SmallForIndependentSamples) {
    int below = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        CounterRng rng(seed);
        std::vector<double> x, y;
        for (std::uint64_t i = 0; i < 500; ++i) {
            x.push_back(rng.uniform_at(2 * i));
            y.push_back(rng.uniform_at(2 * i + 1));
        }
        const double d = distance_correlation(x, y);
        EXPECT_LT(d, 0.15);
        below += d < 0.1;
    }
    EXPECT_GE(below, 9);
}

TEST(DistanceCorrelation, InvariantUnderIsometricScaling) {
    std::vector<double> x{1, 4, 2, 8, 5, 7, 3}, y{2, 2, 5, 1, 9, 4, 4};
    std::vector<double> xs;
    for (double v : x) xs.push_back(2.5 * v + 3.0);
    EXPECT_NEAR(distance_correlation(xs, y), distance_correlation(x, y), 1e-12);
}
