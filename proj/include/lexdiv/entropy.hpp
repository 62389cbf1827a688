#pragma once
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "accum.hpp"
#include "errors.hpp"
#include "stats.hpp"

namespace lexdiv {

enum class Estimator { plugin, nsb };

struct EntropyEstimate {
    double value = 0.0;  // nats
    Estimator estimator = Estimator::plugin;
    std::optional<double> posterior_std;  // NSB only
};

namespace detail {
// -p ln p written as (c/L)(ln L - ln c); summed in rank order everywhere so
// the partial-entropy curve terminates exactly at the plug-in value.
inline double nplogp_term(std::uint64_t c, double L, double logL) {
    double cd = static_cast<double>(c);
    return cd / L * (logL - std::log(cd));
}
}  // namespace detail

inline EntropyEstimate plugin_entropy(std::span<const std::uint64_t> counts) {
    if (counts.empty()) throw DomainError("plugin_entropy: empty counts");
    KahanSum<double> total;
    for (auto c : counts) {
        if (c == 0) throw DomainError("plugin_entropy: zero count");
        total += static_cast<double>(c);
    }
    double L = total.value();
    double logL = std::log(L);
    KahanSum<double> h;
    for (auto c : counts) h += detail::nplogp_term(c, L, logL);
    return {h.value(), Estimator::plugin, std::nullopt};
}

inline EntropyEstimate plugin_entropy(std::initializer_list<std::uint64_t> counts) {
    return plugin_entropy(std::span<const std::uint64_t>(counts.begin(), counts.size()));
}

inline EntropyEstimate plugin_entropy(const FrequencyTable& t) {
    if (t.entries.empty()) throw DomainError("plugin_entropy: empty table");
    double L = static_cast<double>(t.total_tokens);
    double logL = std::log(L);
    KahanSum<double> h;
    for (const auto& e : t.entries) h += detail::nplogp_term(e.count, L, logL);
    return {h.value(), Estimator::plugin, std::nullopt};
}

// Cumulative entropy contribution of ranks 1..r; non-decreasing, and the last
// point equals the plug-in entropy of the whole table.
inline std::vector<std::pair<std::uint64_t, double>> partial_entropy_curve(
    const FrequencyTable& t) {
    if (t.entries.empty()) throw DomainError("partial_entropy_curve: empty table");
    double L = static_cast<double>(t.total_tokens);
    double logL = std::log(L);
    std::vector<std::pair<std::uint64_t, double>> out;
    out.reserve(t.entries.size());
    KahanSum<double> h;
    for (const auto& e : t.entries) {
        h += detail::nplogp_term(e.count, L, logL);
        out.emplace_back(e.rank, h.value());
    }
    return out;
}

// Share of the total plug-in entropy contributed by ranks >= r_c. r_c may be
// V+1 ("one past the end": empty tail, ratio 0).
inline double r_h_empirical(const FrequencyTable& t, std::uint64_t r_c) {
    std::uint64_t V = t.entries.size();
    if (r_c <= 1 || r_c > V + 1) throw DomainError("r_h_empirical: r_c out of range (1, V+1]");
    double L = static_cast<double>(t.total_tokens);
    double logL = std::log(L);
    KahanSum<double> head, tail;
    for (const auto& e : t.entries)
        (e.rank >= r_c ? tail : head) += detail::nplogp_term(e.count, L, logL);
    return tail.value() / (head.value() + tail.value());
}

// Model-based tail share for the two-regime form f = c1 r^-a1 (r < r_c),
// c2 r^-a2 (r >= r_c), with the published normalization constants
//   c1 = L / (S1 + S2),  c2 = L / (r_c^(a1-a2) S1 + S2),
//   S1 = sum_{r<r_c} r^-a1,  S2 = sum_{r>=r_c} r^-a2.
inline double r_h_theoretical(double a1, double a2, std::uint64_t r_c, std::uint64_t V,
                              std::uint64_t L) {
    if (!(a1 > 0) || !(a2 > 0)) throw DomainError("r_h_theoretical: exponents must be positive");
    if (r_c <= 1 || r_c > V) throw DomainError("r_h_theoretical: r_c out of range (1, V]");
    if (V < 2 || L < V) throw DomainError("r_h_theoretical: need L >= V >= 2");
    KahanSum<double> s1, t1, s2, t2;  // s = sum r^-a, t = sum r^-a ln r
    for (std::uint64_t r = 1; r < r_c; ++r) {
        double lr = std::log(static_cast<double>(r));
        double w = std::exp(-a1 * lr);
        s1 += w;
        t1 += w * lr;
    }
    for (std::uint64_t r = r_c; r <= V; ++r) {
        double lr = std::log(static_cast<double>(r));
        double w = std::exp(-a2 * lr);
        s2 += w;
        t2 += w * lr;
    }
    double S1 = s1.value(), S2 = s2.value();
    double Ld = static_cast<double>(L);
    double c1 = Ld / (S1 + S2);
    double c2 = Ld / (std::pow(static_cast<double>(r_c), a1 - a2) * S1 + S2);
    // contribution of a regime: c * sum r^-a (ln(c/L) - a ln r)  (= L p ln p)
    double head = c1 * (std::log(c1 / Ld) * S1 - a1 * t1.value());
    double tail = c2 * (std::log(c2 / Ld) * S2 - a2 * t2.value());
    return tail / (head + tail);
}

// Exact Shannon entropy of the truncated Zipf distribution p_r ∝ r^-a:
// H = (a/K) Σ ln r / r^a + ln K with K = Σ r^-a, in extended precision.
inline double zipf_entropy_exact(std::uint64_t V, double a) {
    if (V < 1 || !(a > 0)) throw DomainError("zipf_entropy_exact: need V >= 1, a > 0");
    KahanSum<long double> K, S;
    for (std::uint64_t r = 1; r <= V; ++r) {
        long double lr = std::log(static_cast<long double>(r));
        long double w = std::exp(static_cast<long double>(-a) * lr);
        K += w;
        S += w * lr;
    }
    long double k = K.value();
    return static_cast<double>(static_cast<long double>(a) / k * S.value() + std::log(k));
}

}  // namespace lexdiv
