#pragma once
#include <algorithm>
#include <cstdint>
#include <vector>

#include "corpus.hpp"
#include "errors.hpp"

namespace lexdiv {

struct FreqEntry {
    std::uint64_t rank;     // 1-based; most frequent word has rank 1
    std::uint32_t type_id;
    std::uint64_t count;
};

struct FrequencyTable {
    std::vector<FreqEntry> entries;
    std::uint64_t total_tokens = 0;
};

// Descending count, ties broken by ascending type_id (first occurrence).
// Zero-count vocabulary rows (possible in synthetic corpora) are skipped.
inline FrequencyTable frequency_table_from_vocab(const std::vector<VocabEntry>& vocab) {
    FrequencyTable t;
    t.entries.reserve(vocab.size());
    for (std::uint32_t id = 0; id < vocab.size(); ++id) {
        if (vocab[id].count > 0) t.entries.push_back({0, id, vocab[id].count});
        t.total_tokens += vocab[id].count;
    }
    if (t.total_tokens == 0) throw DomainError("frequency_table: empty corpus");
    std::sort(t.entries.begin(), t.entries.end(), [](const FreqEntry& a, const FreqEntry& b) {
        return a.count != b.count ? a.count > b.count : a.type_id < b.type_id;
    });
    for (std::size_t i = 0; i < t.entries.size(); ++i) t.entries[i].rank = i + 1;
    return t;
}

inline FrequencyTable frequency_table(const TokenizedCorpus& c) {
    if (c.total_tokens == 0) throw DomainError("frequency_table: empty corpus");
    return frequency_table_from_vocab(c.vocab);
}

inline double ttr(std::uint64_t V, std::uint64_t L) {
    if (L == 0) throw DomainError("ttr: L must be >= 1");
    if (V == 0 || V > L) throw DomainError("ttr: V must be in [1, L]");
    return static_cast<double>(V) / static_cast<double>(L);
}

inline double corpus_ttr(const TokenizedCorpus& c) {
    return ttr(c.observed_types(), c.total_tokens);
}

inline std::uint64_t hapax_count(const FrequencyTable& t) {
    std::uint64_t n = 0;
    for (const auto& e : t.entries) n += e.count == 1;
    return n;
}

struct GrowthPoint {
    std::uint64_t tokens_read;
    std::uint64_t vocabulary;
};

struct GrowthCurve {
    std::vector<GrowthPoint> points;
};

// One pass with an id-seen bitmap: O(L) time, O(V) memory.
inline GrowthCurve growth_curve(const TokenizedCorpus& c, std::uint64_t step) {
    if (step == 0) throw DomainError("growth_curve: step must be >= 1");
    GrowthCurve g;
    std::vector<bool> seen(c.vocab.size(), false);
    std::uint64_t v = 0;
    std::uint64_t next_mark = step;
    for (std::uint64_t i = 0; i < c.total_tokens; ++i) {
        std::uint32_t id = c.token_ids[i];
        if (!seen[id]) {
            seen[id] = true;
            ++v;
        }
        if (i + 1 == next_mark) {
            g.points.push_back({i + 1, v});
            next_mark += step;
        }
    }
    if (c.total_tokens > 0 && (g.points.empty() || g.points.back().tokens_read != c.total_tokens))
        g.points.push_back({c.total_tokens, v});
    return g;
}

}  // namespace lexdiv
