#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "entropy.hpp"
#include "errors.hpp"

namespace lexdiv {

// Bayesian entropy estimator that averages Dirichlet posteriors over the
// concentration parameter with the entropy-flat mixing measure xi'(b),
// xi(b) = psi(Kb+1) - psi(b+1). Computed as a 1-D quadrature over u = ln b:
// peak scan, window expansion to 40 nats below the peak, then trapezoid
// doubling with Simpson extrapolation to relative 1e-6 (documented fixed
// tolerance). Identical bins are aggregated by multiplicity, so the cost per
// node is O(#distinct counts), not O(#types).
namespace nsb_detail {

using boost::math::digamma;
using boost::math::trigamma;

struct CountGroups {
    std::vector<double> value;  // distinct count values, ascending; [0] = 0 if unseen bins exist
    std::vector<double> mult;   // multiplicity of each value
    double N = 0;               // total samples
    double K = 0;               // support size
    double K1 = 0;              // observed bins
};

struct Moments {
    double log_ev;  // ln P(n | b), up to the constant multinomial factor
    double mean_h;  // E[H | n, b]
    double mean_h2; // E[H^2 | n, b]
};

inline Moments moments(const CountGroups& g, double b) {
    const double K = g.K, N = g.N;
    const double A = N + K * b;
    double log_ev = std::lgamma(K * b) - std::lgamma(N + K * b) - g.K1 * std::lgamma(b);

    const double psi_A2 = digamma(A + 2);
    const double tri_A2 = trigamma(A + 2);
    KahanSum<double> s_mh;   // sum alpha psi(alpha+1)
    KahanSum<double> s1;     // sum alpha x,           x = psi(alpha+1) - psi(A+2)
    KahanSum<double> s2;     // sum alpha^2 x^2
    KahanSum<double> q;      // sum alpha^2
    KahanSum<double> diag;   // sum alpha (alpha+1) J
    for (std::size_t i = 0; i < g.value.size(); ++i) {
        const double v = g.value[i], m = g.mult[i];
        const double al = v + b;
        if (v > 0) log_ev += m * std::lgamma(al);
        const double x = digamma(al + 1) - psi_A2;
        const double J = [&] {
            const double d = digamma(al + 2) - psi_A2;
            return d * d + trigamma(al + 2) - tri_A2;
        }();
        s_mh += m * al * digamma(al + 1);
        s1 += m * al * x;
        s2 += m * al * al * x * x;
        q += m * al * al;
        diag += m * al * (al + 1) * J;
    }
    const double mean_h = digamma(A + 1) - s_mh.value() / A;
    const double Q = q.value(), S1 = s1.value();
    const double cross = (S1 * S1 - s2.value() - tri_A2 * (A * A - Q)) / (A * (A + 1));
    const double mean_h2 = cross + diag.value() / (A * (A + 1));
    return {log_ev, mean_h, mean_h2};
}

inline double xi_prime(double K, double b) {
    return K * trigamma(K * b + 1) - trigamma(b + 1);
}

// log of the posterior weight density in u = ln b (includes the du Jacobian)
inline double log_weight(const CountGroups& g, double u) {
    const double b = std::exp(u);
    const double xp = xi_prime(g.K, b);
    if (!(xp > 0) || !std::isfinite(xp)) return -std::numeric_limits<double>::infinity();
    const double ev = std::lgamma(g.K * b) - std::lgamma(g.N + g.K * b) - g.K1 * std::lgamma(b) +
                      [&] {
                          KahanSum<double> s;
                          for (std::size_t i = 0; i < g.value.size(); ++i)
                              if (g.value[i] > 0) s += g.mult[i] * std::lgamma(g.value[i] + b);
                          return s.value();
                      }();
    return ev + std::log(xp) + u;
}

}  // namespace nsb_detail

inline EntropyEstimate nsb_entropy(std::span<const std::uint64_t> counts,
                                   std::uint64_t support_size) {
    if (counts.empty()) throw DomainError("nsb_entropy: empty counts");
    std::uint64_t n_total = 0;
    for (auto c : counts) {
        if (c == 0) throw DomainError("nsb_entropy: zero count");
        n_total += c;
    }
    if (support_size < counts.size())
        throw DomainError("nsb_entropy: support_size smaller than observed types");
    if (support_size == 1) return {0.0, Estimator::nsb, 0.0};

    nsb_detail::CountGroups g;
    {
        std::vector<std::uint64_t> sorted(counts.begin(), counts.end());
        std::sort(sorted.begin(), sorted.end());
        if (support_size > counts.size()) {
            g.value.push_back(0.0);
            g.mult.push_back(static_cast<double>(support_size - counts.size()));
        }
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            g.value.push_back(static_cast<double>(sorted[i]));
            g.mult.push_back(static_cast<double>(j - i));
            i = j;
        }
    }
    g.N = static_cast<double>(n_total);
    g.K = static_cast<double>(support_size);
    g.K1 = static_cast<double>(counts.size());

    // locate the posterior peak in u = ln b
    double u_peak = 0, g_peak = -std::numeric_limits<double>::infinity();
    for (double u = -25.0; u <= 25.0 + 1e-9; u += 0.25) {
        double w = nsb_detail::log_weight(g, u);
        if (w > g_peak) {
            g_peak = w;
            u_peak = u;
        }
    }
    if (!std::isfinite(g_peak))
        throw NumericError("nsb_entropy: posterior weight vanished over the whole scan range");
    for (double u = u_peak - 0.24; u <= u_peak + 0.24 + 1e-9; u += 0.01) {
        double w = nsb_detail::log_weight(g, u);
        if (w > g_peak) {
            g_peak = w;
            u_peak = u;
        }
    }

    // expand the window until the density is 40 nats below the peak
    double u_lo = u_peak, u_hi = u_peak;
    while (u_lo > -60 && nsb_detail::log_weight(g, u_lo) > g_peak - 40) u_lo -= 0.25;
    while (u_hi < 60 && nsb_detail::log_weight(g, u_hi) > g_peak - 40) u_hi += 0.25;

    // trapezoid doubling + Simpson extrapolation on (Z, Z*H, Z*H^2)
    auto eval = [&](double u, double out[3]) {
        double lw = nsb_detail::log_weight(g, u);
        double w = std::isfinite(lw) ? std::exp(lw - g_peak) : 0.0;
        if (w == 0.0) {
            out[0] = out[1] = out[2] = 0.0;
            return;
        }
        auto m = nsb_detail::moments(g, std::exp(u));
        out[0] = w;
        out[1] = w * m.mean_h;
        out[2] = w * m.mean_h2;
    };

    const double span = u_hi - u_lo;
    double fa[3], fb[3];
    eval(u_lo, fa);
    eval(u_hi, fb);
    std::size_t n = 128;
    double trap[3], prev_simp[3] = {0, 0, 0}, simp[3] = {0, 0, 0};
    {
        double h = span / static_cast<double>(n);
        KahanSum<double> s[3];
        for (std::size_t i = 1; i < n; ++i) {
            double f[3];
            eval(u_lo + h * static_cast<double>(i), f);
            for (int k = 0; k < 3; ++k) s[k] += f[k];
        }
        for (int k = 0; k < 3; ++k) trap[k] = h * (0.5 * (fa[k] + fb[k]) + s[k].value());
    }
    bool converged = false;
    for (int round = 0; round < 10 && !converged; ++round) {
        double h = span / static_cast<double>(2 * n);
        KahanSum<double> mids[3];
        for (std::size_t i = 0; i < n; ++i) {
            double f[3];
            eval(u_lo + h * static_cast<double>(2 * i + 1), f);
            for (int k = 0; k < 3; ++k) mids[k] += f[k];
        }
        double next[3];
        for (int k = 0; k < 3; ++k) next[k] = 0.5 * trap[k] + h * mids[k].value();
        for (int k = 0; k < 3; ++k) simp[k] = (4.0 * next[k] - trap[k]) / 3.0;
        if (round > 0) {
            converged = true;
            for (int k = 0; k < 3; ++k)
                if (std::abs(simp[k] - prev_simp[k]) > 1e-6 * std::abs(simp[k])) converged = false;
        }
        for (int k = 0; k < 3; ++k) {
            prev_simp[k] = simp[k];
            trap[k] = next[k];
        }
        n *= 2;
    }

    const double Z = simp[0];
    const double mean = simp[1] / Z;
    const double var = std::max(simp[2] / Z - mean * mean, 0.0);
    if (!(Z > 0) || !std::isfinite(mean))
        throw NumericError("nsb_entropy: integration failed (Z=" + std::to_string(Z) +
                           ", N=" + std::to_string(n_total) +
                           ", K=" + std::to_string(support_size) + ", window=[" +
                           std::to_string(u_lo) + "," + std::to_string(u_hi) + "])");
    return {mean, Estimator::nsb, std::sqrt(var)};
}

inline EntropyEstimate nsb_entropy(std::initializer_list<std::uint64_t> counts,
                                   std::uint64_t support_size) {
    return nsb_entropy(std::span<const std::uint64_t>(counts.begin(), counts.size()),
                       support_size);
}

}  // namespace lexdiv
