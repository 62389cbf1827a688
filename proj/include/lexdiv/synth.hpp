#pragma once
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "accum.hpp"
#include "corpus.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace lexdiv {

enum class DistKind { zipf, piecewise_zipf };

// Ground-truth distribution over ranks 1..V: p_r ∝ r^-a, or the two-regime
// form p_r ∝ r^-a1 (r < r_c), r_c^(a2-a1) r^-a2 (r >= r_c), which is exactly
// continuous at r_c.
struct GeneratorSpec {
    DistKind kind = DistKind::zipf;
    std::uint64_t V = 0;
    double a = 1.0;                     // single-regime exponent
    double a1 = 0, a2 = 0, r_c = 0;     // two-regime parameters
    std::uint64_t L = 0;
    std::uint64_t seed = 0;
};

inline std::vector<double> spec_probabilities(const GeneratorSpec& spec) {
    if (spec.V < 1) throw DomainError("spec_probabilities: need V >= 1");
    std::vector<double> p(spec.V);
    if (spec.kind == DistKind::zipf) {
        if (!(spec.a > 0)) throw DomainError("spec_probabilities: need a > 0");
        for (std::uint64_t r = 1; r <= spec.V; ++r)
            p[r - 1] = std::pow(static_cast<double>(r), -spec.a);
    } else {
        if (!(spec.a1 > 0) || !(spec.a2 > 0))
            throw DomainError("spec_probabilities: need a1, a2 > 0");
        if (!(spec.r_c > 1) || !(spec.r_c <= static_cast<double>(spec.V)))
            throw DomainError("spec_probabilities: need r_c in (1, V]");
        const double cont = std::pow(spec.r_c, spec.a2 - spec.a1);
        for (std::uint64_t r = 1; r <= spec.V; ++r) {
            const double rd = static_cast<double>(r);
            p[r - 1] = rd < spec.r_c ? std::pow(rd, -spec.a1) : cont * std::pow(rd, -spec.a2);
        }
    }
    KahanSum<double> s;
    for (const double w : p) s += w;
    const double norm = s.value();
    for (double& w : p) w /= norm;
    return p;
}

inline double true_entropy(const GeneratorSpec& spec) {
    const auto p = spec_probabilities(spec);
    KahanSum<long double> h;
    for (const double w : p)
        if (w > 0) h += -static_cast<long double>(w) * std::log(static_cast<long double>(w));
    return static_cast<double>(h.value());
}

// Vose alias method: O(V) construction, O(1) per draw.
struct AliasTable {
    std::vector<double> prob;
    std::vector<std::uint32_t> alias;

    std::uint64_t size() const { return prob.size(); }

    // one draw from two raw 64-bit words
    std::uint32_t sample(std::uint64_t w1, std::uint64_t w2) const {
        const std::uint64_t n = prob.size();
        const auto j = static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(w1) * n) >> 64);
        const double u = static_cast<double>(w2 >> 11) * 0x1.0p-53;
        return u < prob[j] ? static_cast<std::uint32_t>(j) : alias[j];
    }
};

inline AliasTable alias_table(std::span<const double> p) {
    if (p.empty()) throw DomainError("alias_table: empty probability vector");
    KahanSum<double> s;
    for (const double w : p) {
        if (!(w >= 0)) throw DomainError("alias_table: negative probability");
        s += w;
    }
    if (std::abs(s.value() - 1.0) > 1e-12)
        throw DomainError("alias_table: probabilities must sum to 1 within 1e-12");
    const std::size_t n = p.size();
    AliasTable t;
    t.prob.resize(n);
    t.alias.resize(n);
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = p[i] * static_cast<double>(n);
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        const std::uint32_t s_i = small.back();
        small.pop_back();
        const std::uint32_t l_i = large.back();
        t.prob[s_i] = scaled[s_i];
        t.alias[s_i] = l_i;
        scaled[l_i] = (scaled[l_i] + scaled[s_i]) - 1.0;
        if (scaled[l_i] < 1.0) {
            large.pop_back();
            small.push_back(l_i);
        }
    }
    for (const auto i : large) {
        t.prob[i] = 1.0;
        t.alias[i] = i;
    }
    for (const auto i : small) {
        t.prob[i] = 1.0;
        t.alias[i] = i;
    }
    return t;
}

// L i.i.d. draws; token i consumes counter words 2i and 2i+1 of a stream keyed
// by the seed alone, so output is independent of block/thread decomposition.
// Vocab covers every rank (type name "r<rank>"); ranks that never came up
// keep count zero.
inline TokenizedCorpus gen_corpus(const GeneratorSpec& spec, unsigned n_threads = 1) {
    if (spec.L < 1) throw DomainError("gen_corpus: need L >= 1");
    const auto p = spec_probabilities(spec);
    {
        KahanSum<double> s;
        for (const double w : p) s += w;
        if (std::abs(s.value() - 1.0) > 1e-12)
            throw NumericError("gen_corpus: spec probabilities failed to normalize");
    }
    const AliasTable alias = alias_table(p);
    const CounterRng rng(spec.seed);

    TokenizedCorpus c;
    c.total_tokens = spec.L;
    c.token_ids.resize(spec.L);
    auto fill = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i)
            c.token_ids[i] = alias.sample(rng.at(2 * i), rng.at(2 * i + 1));
    };
    if (n_threads <= 1) {
        fill(0, spec.L);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (spec.L + n_threads - 1) / n_threads;
        for (unsigned t = 0; t < n_threads; ++t) {
            const std::uint64_t lo = std::min<std::uint64_t>(t * chunk, spec.L);
            const std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, spec.L);
            if (lo < hi) pool.emplace_back(fill, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    std::vector<std::uint64_t> counts(spec.V, 0);
    for (const auto id : c.token_ids) ++counts[id];
    c.vocab.resize(spec.V);
    for (std::uint64_t r = 0; r < spec.V; ++r) {
        c.vocab[r].type = "r" + std::to_string(r + 1);
        c.vocab[r].count = counts[r];
    }
    return c;
}

}  // namespace lexdiv
