#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "accum.hpp"
#include "errors.hpp"
#include "lawfit.hpp"
#include "sampler.hpp"

namespace lexdiv {

enum class RelationKind { H_of_L, H_of_TTR };

struct Goodness {
    double rho2 = 0, rho_s = 0, rho_d = 0, p_value = 1;
};

struct RelationFit {
    RelationKind kind = RelationKind::H_of_L;
    double p_first = 0, p_second = 0;  // (p1, p2) or (p3, p4)
    double beta_used = 0;
    std::uint64_t l_low = 0, l_high = 0;
    Goodness goodness;
};

// H(L) model: p1 (β/2 ln L + ln ln L) + p2
inline double model_h_of_l(double L, double beta, double p1, double p2) {
    if (!(L > std::exp(1.0))) throw DomainError("model_h_of_l: need L > e");
    if (!(beta > 0 && beta < 1)) throw DomainError("model_h_of_l: need beta in (0,1)");
    const double lnL = std::log(L);
    return p1 * (beta / 2 * lnL + std::log(lnL)) + p2;
}

// H(TTR) model: p3 [β/(2(1-β)) ln TTR⁻¹ + ln ln TTR⁻¹] + p4, valid for TTR < e⁻¹
inline double model_h_of_ttr(double ttr, double beta, double p3, double p4) {
    if (!(ttr > 0 && ttr < std::exp(-1.0)))
        throw DomainError("model_h_of_ttr: need TTR in (0, e^-1)");
    if (!(beta > 0 && beta < 1)) throw DomainError("model_h_of_ttr: need beta in (0,1)");
    const double lnInv = -std::log(ttr);
    return p3 * (beta / (2 * (1 - beta)) * lnInv + std::log(lnInv)) + p4;
}

inline double r_squared(std::span<const double> observed, std::span<const double> predicted) {
    if (observed.size() != predicted.size() || observed.size() < 2)
        throw DomainError("r_squared: need two series of equal length >= 2");
    KahanSum<double> s;
    for (const double o : observed) s += o;
    const double mean = s.value() / static_cast<double>(observed.size());
    KahanSum<double> ss_res, ss_tot;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double r = observed[i] - predicted[i];
        const double d = observed[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if (ss_tot.value() <= 0) throw DomainError("r_squared: observed series has zero variance");
    return 1.0 - ss_res.value() / ss_tot.value();
}

namespace detail {
inline std::vector<double> mid_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    KahanSum<double> sx, sy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx.value() / n, my = sy.value() / n;
    KahanSum<double> sxy, sxx, syy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    const double den = std::sqrt(sxx.value()) * std::sqrt(syy.value());
    if (den <= 0) throw DomainError("correlation: constant input");
    return sxy.value() / den;
}
}  // namespace detail

struct SpearmanResult {
    double rho = 0;
    double p_value = 1;  // two-sided, t-distribution approximation, n-2 dof
};

inline SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3)
        throw DomainError("spearman: need two series of equal length >= 3");
    const auto rx = detail::mid_ranks(x);
    const auto ry = detail::mid_ranks(y);
    double rho = detail::pearson(rx, ry);
    rho = std::min(1.0, std::max(-1.0, rho));
    const double n = static_cast<double>(x.size());
    double p = 0.0;
    if (std::abs(rho) < 1.0) {
        const double t = rho * std::sqrt((n - 2) / (1 - rho * rho));
        const boost::math::students_t dist(n - 2);
        p = 2.0 * boost::math::cdf(dist, -std::abs(t));
    }
    return {rho, p};
}

// Sample distance correlation (Székely–Rizzo), exact O(n²) double-centering.
// Zero distance variance in either variable returns 0 by convention.
inline double distance_correlation(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw DomainError("distance_correlation: need equal lengths >= 2");
    auto centered = [n](std::span<const double> v) {
        std::vector<double> m(n * n);
        std::vector<double> row_mean(n, 0.0);
        double grand = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            KahanSum<double> rs;
            for (std::size_t j = 0; j < n; ++j) {
                const double d = std::abs(v[i] - v[j]);
                m[i * n + j] = d;
                rs += d;
            }
            row_mean[i] = rs.value() / static_cast<double>(n);
            grand += row_mean[i];
        }
        grand /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                m[i * n + j] += grand - row_mean[i] - row_mean[j];
        return m;
    };
    const auto A = centered(x);
    const auto B = centered(y);
    KahanSum<double> sab, saa, sbb;
    for (std::size_t i = 0; i < n * n; ++i) {
        sab += A[i] * B[i];
        saa += A[i] * A[i];
        sbb += B[i] * B[i];
    }
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const double dcov2 = sab.value() / n2;
    const double dvarx = saa.value() / n2;
    const double dvary = sbb.value() / n2;
    if (dvarx <= 0 || dvary <= 0) return 0.0;
    const double dcor2 = dcov2 / std::sqrt(dvarx * dvary);
    return dcor2 > 0 ? std::sqrt(dcor2) : 0.0;
}

// Least-squares fit of the asymptotic entropy models over a length range.
// Both models are linear in their two parameters, so the estimate is the
// closed-form simple regression on the transformed regressor. Goodness
// metrics compare observed with fitted values over the range.
inline RelationFit fit_relation(const std::vector<SeriesRow>& rows, RelationKind kind, double beta,
                                std::uint64_t l_low, std::uint64_t l_high, bool use_nsb = false) {
    if (!(beta > 0 && beta < 1)) throw DomainError("fit_relation: need beta in (0,1)");
    std::vector<double> x, y;
    for (const auto& r : rows) {
        if (r.l < l_low || r.l > l_high) continue;
        const double h = use_nsb ? r.mean_h_nsb : r.mean_h_pi;
        if (std::isnan(h)) throw DomainError("fit_relation: series lacks the requested estimator");
        if (kind == RelationKind::H_of_L) {
            const double Ld = static_cast<double>(r.l);
            if (!(Ld > std::exp(1.0))) throw DomainError("fit_relation: length <= e in range");
            x.push_back(beta / 2 * std::log(Ld) + std::log(std::log(Ld)));
        } else {
            if (!(r.mean_ttr > 0 && r.mean_ttr < std::exp(-1.0)))
                throw DomainError("fit_relation: TTR outside (0, e^-1) in range");
            const double lnInv = -std::log(r.mean_ttr);
            x.push_back(beta / (2 * (1 - beta)) * lnInv + std::log(lnInv));
        }
        y.push_back(h);
    }
    if (x.size() < 3) throw DomainError("fit_relation: need at least 3 points in range");
    const LineFit lf = linear_fit(x, y);

    RelationFit fit;
    fit.kind = kind;
    fit.p_first = lf.slope;
    fit.p_second = lf.intercept;
    fit.beta_used = beta;
    fit.l_low = l_low;
    fit.l_high = l_high;
    std::vector<double> pred(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) pred[i] = lf.intercept + lf.slope * x[i];
    fit.goodness.rho2 = r_squared(y, pred);
    const SpearmanResult sp = spearman(y, pred);
    fit.goodness.rho_s = sp.rho;
    fit.goodness.p_value = sp.p_value;
    fit.goodness.rho_d = distance_correlation(y, pred);
    return fit;
}

inline RelationFit fit_relation(const SampleSeries& s, RelationKind kind, double beta,
                                const FitRange& range, bool use_nsb = false) {
    return fit_relation(s.rows(), kind, beta, range.l_low, range.l_high, use_nsb);
}

// Deviation-from-H_max collapse: H_max is the mean plug-in entropy at the
// largest sampled length; emits (mean TTR, H - H_max) for each length.
inline std::vector<std::pair<double, double>> collapse_h_max(const std::vector<SeriesRow>& rows) {
    if (rows.empty()) throw DomainError("collapse_h_max: empty series");
    const double h_max = rows.back().mean_h_pi;
    std::vector<std::pair<double, double>> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.emplace_back(r.mean_ttr, r.mean_h_pi - h_max);
    return out;
}

inline std::vector<std::pair<double, double>> collapse_h_max(const SampleSeries& s) {
    return collapse_h_max(s.rows());
}

}  // namespace lexdiv
