#pragma once
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "accum.hpp"
#include "errors.hpp"
#include "stats.hpp"

namespace lexdiv {

struct LineFit {
    double intercept = 0, slope = 0, ssr = 0, stderr_slope = 0;
};

// ordinary least squares y = intercept + slope * x
inline LineFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("linear_fit: need >= 2 points");
    const double n = static_cast<double>(x.size());
    KahanSum<double> sx, sy, sxx, sxy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx.value() - sx.value() * sx.value();
    if (den <= 0) throw DomainError("linear_fit: degenerate regressor");
    LineFit f;
    f.slope = (n * sxy.value() - sx.value() * sy.value()) / den;
    f.intercept = (sy.value() - f.slope * sx.value()) / n;
    KahanSum<double> ssr;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ssr += r * r;
    }
    f.ssr = ssr.value();
    if (x.size() > 2) f.stderr_slope = std::sqrt(f.ssr / (n - 2) / (den / n));
    return f;
}

struct ZipfFit {
    double a1 = 0, a2 = 0;        // head/tail exponents
    double log_k1 = 0, log_k2 = 0;  // log-intercepts of the two lines
    double r_c = 0;               // crossing point of the fitted lines
    double c1 = 0, c2 = 0;        // normalization constants (tokens)
    double residual = 0;          // total squared log-residual
    bool single_regime = false;   // no interior breakpoint beat one line
};

struct ZipfFitConfig {
    std::uint64_t grid_min = 100;  // smallest breakpoint candidate
    double grid_max_frac = 0.1;    // largest candidate as a fraction of V
    int grid_size = 50;            // log-spaced candidates
};

namespace detail {

// (sum r^-a, sum r^-a ln r) over integer ranks [lo, hi]
inline std::pair<double, double> power_sums(double a, std::uint64_t lo, std::uint64_t hi) {
    KahanSum<double> s, t;
    for (std::uint64_t r = lo; r <= hi; ++r) {
        const double lr = std::log(static_cast<double>(r));
        const double w = std::exp(-a * lr);
        s += w;
        t += w * lr;
    }
    return {s.value(), t.value()};
}

// published two-regime normalization: c1 = L/(S1+S2), c2 = L/(rc^(a1-a2) S1 + S2)
inline std::pair<double, double> piecewise_constants(double a1, double a2, double r_c,
                                                     std::uint64_t V, double L) {
    const std::uint64_t t = static_cast<std::uint64_t>(std::ceil(r_c));
    const double S1 = t > 1 ? power_sums(a1, 1, t - 1).first : 0.0;
    const double S2 = t <= V ? power_sums(a2, t, V).first : 0.0;
    const double c1 = L / (S1 + S2);
    const double c2 = L / (std::pow(r_c, a1 - a2) * S1 + S2);
    return {c1, c2};
}

// O(1) segment regression over [i, j) backed by prefix sums
struct SegmentedOls {
    std::vector<long double> px, py, pxx, pxy, pyy;

    explicit SegmentedOls(std::span<const double> x, std::span<const double> y) {
        const std::size_t n = x.size();
        px.assign(n + 1, 0);
        py.assign(n + 1, 0);
        pxx.assign(n + 1, 0);
        pxy.assign(n + 1, 0);
        pyy.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            px[i + 1] = px[i] + x[i];
            py[i + 1] = py[i] + y[i];
            pxx[i + 1] = pxx[i] + static_cast<long double>(x[i]) * x[i];
            pxy[i + 1] = pxy[i] + static_cast<long double>(x[i]) * y[i];
            pyy[i + 1] = pyy[i] + static_cast<long double>(y[i]) * y[i];
        }
    }

    // returns (intercept, slope, ssr)
    bool fit(std::size_t i, std::size_t j, double out[3]) const {
        const long double m = static_cast<long double>(j - i);
        if (j - i < 2) return false;
        const long double sx = px[j] - px[i], sy = py[j] - py[i];
        const long double sxx = pxx[j] - pxx[i], sxy = pxy[j] - pxy[i], syy = pyy[j] - pyy[i];
        const long double den = m * sxx - sx * sx;
        if (den <= 0) return false;
        const long double b = (m * sxy - sx * sy) / den;
        const long double a = (sy - b * sx) / m;
        long double ssr = syy - a * sy - b * sxy;
        if (ssr < 0) ssr = 0;
        out[0] = static_cast<double>(a);
        out[1] = static_cast<double>(b);
        out[2] = static_cast<double>(ssr);
        return true;
    }
};

}  // namespace detail

// Piecewise power-law fit in (ln r, ln f): breakpoint from a log-spaced
// candidate grid (exhaustively refined between the winning candidate's grid
// neighbours), then r_c from the closed-form crossing of the two lines.
inline ZipfFit fit_zipf(const FrequencyTable& table, ZipfFitConfig cfg = {}) {
    const std::size_t n = table.entries.size();
    if (n < 100) throw DomainError("fit_zipf: need at least 100 ranks");
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(static_cast<double>(table.entries[i].rank));
        y[i] = std::log(static_cast<double>(table.entries[i].count));
    }
    detail::SegmentedOls ols(x, y);
    double single[3];
    ols.fit(0, n, single);

    // candidate tail-start ranks; a candidate rank t splits head [1, t) / tail [t, V]
    std::vector<std::uint64_t> cands;
    const std::uint64_t hi = static_cast<std::uint64_t>(static_cast<double>(n) * cfg.grid_max_frac);
    if (cfg.grid_min < 3 || hi <= cfg.grid_min || static_cast<double>(n) < 1000) {
        for (std::uint64_t t = 3; t + 1 < n; ++t) cands.push_back(t);
    } else {
        const double llo = std::log(static_cast<double>(cfg.grid_min));
        const double lhi = std::log(static_cast<double>(hi));
        for (int i = 0; i < cfg.grid_size; ++i) {
            const double f = cfg.grid_size == 1 ? 0.0
                                                : static_cast<double>(i) /
                                                      static_cast<double>(cfg.grid_size - 1);
            auto t = static_cast<std::uint64_t>(std::llround(std::exp(llo + f * (lhi - llo))));
            if (t >= 3 && t + 1 < n && (cands.empty() || t != cands.back())) cands.push_back(t);
        }
    }

    auto eval_split = [&](std::uint64_t t, double h[3], double tl[3]) -> double {
        // ranks are contiguous 1..V, so tail-start rank t is index t-1
        if (!ols.fit(0, t - 1, h) || !ols.fit(t - 1, n, tl))
            return std::numeric_limits<double>::infinity();
        return h[2] + tl[2];
    };

    double bh[3], bt[3];
    std::uint64_t best_t = 0;
    double best_ssr = std::numeric_limits<double>::infinity();
    std::size_t best_ci = 0;
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
        double h[3], tl[3];
        const double ssr = eval_split(cands[ci], h, tl);
        if (ssr < best_ssr) {
            best_ssr = ssr;
            best_t = cands[ci];
            best_ci = ci;
            std::copy(h, h + 3, bh);
            std::copy(tl, tl + 3, bt);
        }
    }
    if (best_t != 0 && cands.size() > 1) {
        const std::uint64_t lo_t = best_ci > 0 ? cands[best_ci - 1] + 1 : 3;
        const std::uint64_t hi_t = best_ci + 1 < cands.size() ? cands[best_ci + 1] : best_t;
        for (std::uint64_t t = lo_t; t < hi_t; ++t) {
            if (t == best_t) continue;
            double h[3], tl[3];
            const double ssr = eval_split(t, h, tl);
            if (ssr < best_ssr || (ssr == best_ssr && t < best_t)) {
                best_ssr = ssr;
                best_t = t;
                std::copy(h, h + 3, bh);
                std::copy(tl, tl + 3, bt);
            }
        }
    }

    ZipfFit fit;
    const double L = static_cast<double>(table.total_tokens);
    // A breakpoint must cut the residual by a material fraction (1%) to count
    // as a second regime; otherwise it is just chasing rounding noise.
    const double eps = std::max(1e-12, 0.01 * single[2]);
    if (best_t == 0 || single[2] - best_ssr <= eps) {
        fit.single_regime = true;
        fit.a1 = fit.a2 = -single[1];
        fit.log_k1 = fit.log_k2 = single[0];
        fit.r_c = static_cast<double>(n);
        fit.residual = single[2];
    } else {
        fit.a1 = -bh[1];
        fit.a2 = -bt[1];
        fit.log_k1 = bh[0];
        fit.log_k2 = bt[0];
        fit.residual = best_ssr;
        // crossing of  log_k1 + m1 x  and  log_k2 + m2 x
        const double xc = (bh[0] - bt[0]) / (bt[1] - bh[1]);
        double rc = std::exp(xc);
        if (!std::isfinite(rc)) rc = static_cast<double>(best_t);
        fit.r_c = std::min(std::max(rc, 2.0), static_cast<double>(n));
    }
    auto [c1, c2] = detail::piecewise_constants(fit.a1, fit.a2, fit.r_c, n, L);
    fit.c1 = c1;
    fit.c2 = c2;
    return fit;
}

struct HeapsFit {
    double alpha = 0;
    double beta = 0;
    double stderr_beta = 0;
    bool beta_in_range = false;  // 0 < beta < 1
};

inline HeapsFit fit_heaps(const GrowthCurve& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 10) throw DomainError("fit_heaps: need at least 10 points");
    if (static_cast<double>(pts.back().tokens_read) <
        100.0 * static_cast<double>(pts.front().tokens_read))
        throw DomainError("fit_heaps: points must span at least two decades of L");
    std::vector<double> x(pts.size()), y(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        x[i] = std::log(static_cast<double>(pts[i].tokens_read));
        y[i] = std::log(static_cast<double>(pts[i].vocabulary));
    }
    const LineFit f = linear_fit(x, y);
    HeapsFit h;
    h.alpha = std::exp(f.intercept);
    h.beta = f.slope;
    h.stderr_beta = f.stderr_slope;
    h.beta_in_range = h.beta > 0 && h.beta < 1;
    return h;
}

struct TtrFit {
    double delta = 0;
    double prefactor = 0;
    double stderr_delta = 0;
};

inline TtrFit fit_ttr_powerlaw(const std::vector<std::pair<double, double>>& series) {
    if (series.size() < 10) throw DomainError("fit_ttr_powerlaw: need at least 10 points");
    std::vector<double> x(series.size()), y(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (i > 0 && !(series[i].first > series[i - 1].first))
            throw DomainError("fit_ttr_powerlaw: L must be increasing");
        if (!(series[i].second > 0))
            throw DomainError("fit_ttr_powerlaw: TTR values must be positive");
        x[i] = std::log(series[i].first);
        y[i] = std::log(series[i].second);
    }
    const LineFit f = linear_fit(x, y);
    return {f.slope, std::exp(f.intercept), f.stderr_slope};
}

}  // namespace lexdiv
