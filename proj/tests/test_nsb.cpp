#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_gamma.h>
#include <gsl/gsl_sf_psi.h>

#include "lexdiv/nsb.hpp"
#include "lexdiv/stats.hpp"
#include "lexdiv/synth.hpp"

using namespace lexdiv;

namespace {

// Independent reference: adaptive quadrature (QAGS) of the posterior over the
// concentration parameter, using the substitution t = b/(1+b) on (0,1) and
// GSL special functions throughout.
struct OracleCase {
    std::vector<double> counts;
    double K = 0;
    double N = 0;
    double shift = 0;
    int moment = 0;  // 0: normalizer, 1: entropy-weighted

    double log_weight(double beta) const {
        const double logev = gsl_sf_lngamma(K * beta) - gsl_sf_lngamma(N + K * beta) +
                             [&] {
                                 double s = 0;
                                 for (double c : counts) s += gsl_sf_lngamma(c + beta);
                                 return s;
                             }() -
                             static_cast<double>(counts.size()) * gsl_sf_lngamma(beta);
        const double xi = K * gsl_sf_psi_1(K * beta + 1) - gsl_sf_psi_1(beta + 1);
        if (!(xi > 0) || !std::isfinite(xi)) return -HUGE_VAL;
        return logev + std::log(xi);
    }

    double mean_entropy(double beta) const {
        const double A = N + K * beta;
        double s = 0;
        for (double c : counts) s += (c + beta) * gsl_sf_psi(c + beta + 1);
        s += (K - static_cast<double>(counts.size())) * beta * gsl_sf_psi(beta + 1);
        return gsl_sf_psi(A + 1) - s / A;
    }
};

double oracle_integrand(double t, void* params) {
    auto* o = static_cast<OracleCase*>(params);
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double beta = t / (1.0 - t);
    // d beta / d t = (1+beta)^2
    const double g = o->log_weight(beta) + 2.0 * std::log1p(beta) - o->shift;
    if (!std::isfinite(g)) return 0.0;
    const double w = std::exp(g);
    return o->moment ? w * o->mean_entropy(beta) : w;
}

double oracle_nsb_mean(const std::vector<double>& counts, double K) {
    gsl_set_error_handler_off();
    OracleCase o;
    o.counts = counts;
    o.K = K;
    for (double c : counts) o.N += c;

    double peak = -HUGE_VAL;
    for (int i = 1; i < 200000; ++i) {
        const double t = static_cast<double>(i) / 200000.0;
        const double beta = t / (1.0 - t);
        peak = std::max(peak, o.log_weight(beta) + 2.0 * std::log1p(beta));
    }
    o.shift = peak;

    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(20000);
    gsl_function f{&oracle_integrand, &o};
    double z = 0, zerr = 0, h = 0, herr = 0;
    o.moment = 0;
    int s1 = gsl_integration_qags(&f, 0.0, 1.0, 1e-300, 1e-10, 20000, ws, &z, &zerr);
    o.moment = 1;
    int s2 = gsl_integration_qags(&f, 0.0, 1.0, 1e-300, 1e-10, 20000, ws, &h, &herr);
    gsl_integration_workspace_free(ws);
    EXPECT_TRUE(s1 == GSL_SUCCESS || s1 == GSL_EROUND) << gsl_strerror(s1);
    EXPECT_TRUE(s2 == GSL_SUCCESS || s2 == GSL_EROUND) << gsl_strerror(s2);
    EXPECT_GT(z, 0.0);
    return h / z;
}

}  // namespace

TEST(NsbEntropy, MatchesQuadratureOracleOnSmallCounts) {
    struct Case {
        std::vector<std::uint64_t> counts;
        std::uint64_t K;
    };
    const std::vector<Case> cases = {
        {{1, 1, 1}, 3},      {{1, 2, 3}, 6},          {{5, 1, 1, 1}, 10},
        {{10, 10}, 2},       {{3, 2, 2, 1, 1, 1}, 8}, {{4, 2}, 50},
        {{1000, 1000, 1000, 1000, 1000, 1000, 1000, 1000, 1000, 1000}, 10},
    };
    for (const auto& c : cases) {
        std::vector<double> dc(c.counts.begin(), c.counts.end());
        const double ref = oracle_nsb_mean(dc, static_cast<double>(c.K));
        const auto got = nsb_entropy(c.counts, c.K);
        EXPECT_NEAR(got.value, ref, 1e-4)
            << "counts n=" << dc.size() << " K=" << c.K;
        EXPECT_GE(got.value, 0.0);
        ASSERT_TRUE(got.posterior_std.has_value());
        EXPECT_GE(*got.posterior_std, 0.0);
        EXPECT_EQ(got.estimator, Estimator::nsb);
    }
}

TEST(NsbEntropy, SingletonTriple) {
    // frozen high-precision reference for three singleton observations, K = 3
    const auto e = nsb_entropy({1, 1, 1}, 3);
    EXPECT_NEAR(e.value, 0.977685, 1e-4);
    ASSERT_TRUE(e.posterior_std.has_value());
    EXPECT_NEAR(*e.posterior_std, 0.130908, 1e-3);
}

TEST(NsbEntropy, FullySampledUniformApproachesLogK) {
    std::vector<std::uint64_t> counts(10, 1000);
    const auto e = nsb_entropy(counts, 10);
    EXPECT_NEAR(e.value, std::log(10.0), 0.01);
    const auto pi = plugin_entropy(counts);
    EXPECT_LT(std::abs(e.value - pi.value), 0.01);
    EXPECT_LT(*e.posterior_std, 0.05);
}

TEST(NsbEntropy, DegenerateAlphabet) {
    const auto e = nsb_entropy({50}, 1);
    EXPECT_DOUBLE_EQ(e.value, 0.0);
    ASSERT_TRUE(e.posterior_std.has_value());
    EXPECT_DOUBLE_EQ(*e.posterior_std, 0.0);
}

TEST(NsbEntropy, DomainErrors) {
    EXPECT_THROW(nsb_entropy(std::vector<std::uint64_t>{}, 5), DomainError);
    EXPECT_THROW(nsb_entropy({2, 0, 1}, 5), DomainError);
    EXPECT_THROW(nsb_entropy({1, 1, 1}, 2), DomainError);
}

TEST(NsbEntropy, GrowsWithAssumedSupport) {
    const double h10 = nsb_entropy({3, 2, 1}, 10).value;
    const double h100 = nsb_entropy({3, 2, 1}, 100).value;
    EXPECT_GT(h100, h10);
}

TEST(NsbEntropy, ExceedsPluginWhenHeavilyUndersampled) {
    GeneratorSpec spec;
    spec.V = 10000;
    spec.a = 1.0;
    spec.L = 1000;
    spec.seed = 13;
    auto t = frequency_table(gen_corpus(spec));
    std::vector<std::uint64_t> counts;
    for (const auto& e : t.entries) counts.push_back(e.count);
    const double pi = plugin_entropy(counts).value;
    const double nsb = nsb_entropy(counts, spec.V).value;
    EXPECT_GT(nsb, pi);
    // and closer to the generating distribution's entropy
    const double truth = true_entropy(spec);
    EXPECT_LT(std::abs(nsb - truth), std::abs(pi - truth));
}

TEST(NsbEntropy, RealisticFragmentCountsStayFinite) {
    GeneratorSpec spec;
    spec.V = 10000;
    spec.a = 1.0;
    spec.L = 100000;
    spec.seed = 2;
    auto t = frequency_table(gen_corpus(spec));
    std::vector<std::uint64_t> counts;
    for (const auto& e : t.entries) counts.push_back(e.count);
    const auto e = nsb_entropy(counts, counts.size());
    EXPECT_TRUE(std::isfinite(e.value));
    EXPECT_GT(e.value, plugin_entropy(counts).value - 0.05);
    EXPECT_LT(e.value, std::log(static_cast<double>(counts.size())) + 1.0);
}
