#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "lexdiv/corpus.hpp"
#include "lexdiv/stats.hpp"
#include "lexdiv/synth.hpp"
#include "lexdiv/tokenizer.hpp"

using namespace lexdiv;

namespace {

TokenizedCorpus text_corpus(std::string_view s) { return encode(tokenize(s)); }

// count-and-sort reference: descending count, ties by ascending id
std::vector<std::pair<std::uint32_t, std::uint64_t>> brute_table(const TokenizedCorpus& c) {
    std::map<std::uint32_t, std::uint64_t> counts;
    for (auto id : c.token_ids) ++counts[id];
    std::vector<std::pair<std::uint32_t, std::uint64_t>> v(counts.begin(), counts.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return v;
}

}  // namespace

TEST(FrequencyTable, TwoTypeTieBrokenByFirstOccurrence) {
    auto t = frequency_table(text_corpus("g m m g m g m g g m"));
    ASSERT_EQ(t.entries.size(), 2u);
    EXPECT_EQ(t.total_tokens, 10u);
    EXPECT_EQ(t.entries[0].rank, 1u);
    EXPECT_EQ(t.entries[0].count, 5u);
    EXPECT_EQ(t.entries[0].type_id, 0u);  // "g" first seen first
    EXPECT_EQ(t.entries[1].rank, 2u);
    EXPECT_EQ(t.entries[1].count, 5u);
    EXPECT_EQ(t.entries[1].type_id, 1u);
}

TEST(FrequencyTable, SingleRepeatedToken) {
    auto t = frequency_table(text_corpus("z z z z z z z"));
    ASSERT_EQ(t.entries.size(), 1u);
    EXPECT_EQ(t.entries[0].rank, 1u);
    EXPECT_EQ(t.entries[0].count, 7u);
    EXPECT_EQ(t.total_tokens, 7u);
}

TEST(FrequencyTable, MatchesBruteForceOnRandomMultisets) {
    std::mt19937_64 rng(21);
    for (int iter = 0; iter < 30; ++iter) {
        TokenizedCorpus c;
        const std::uint32_t types = 1 + static_cast<std::uint32_t>(rng() % 12);
        const int n = 1 + static_cast<int>(rng() % 400);
        std::vector<std::uint64_t> counts(types, 0);
        for (int i = 0; i < n; ++i) {
            auto id = static_cast<std::uint32_t>(rng() % types);
            c.token_ids.push_back(id);
            ++counts[id];
        }
        for (std::uint32_t i = 0; i < types; ++i)
            c.vocab.push_back({"t" + std::to_string(i), counts[i]});
        c.total_tokens = static_cast<std::uint64_t>(n);

        auto t = frequency_table(c);
        auto ref = brute_table(c);
        ASSERT_EQ(t.entries.size(), ref.size());
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            EXPECT_EQ(t.entries[i].rank, i + 1);
            EXPECT_EQ(t.entries[i].type_id, ref[i].first);
            EXPECT_EQ(t.entries[i].count, ref[i].second);
            if (i) EXPECT_LE(t.entries[i].count, t.entries[i - 1].count);
            sum += t.entries[i].count;
        }
        EXPECT_EQ(sum, t.total_tokens);
    }
}

TEST(FrequencyTable, PermutationInvariant) {
    auto c = text_corpus("a b a c a b d a");
    auto t1 = frequency_table(c);
    std::mt19937_64 rng(5);
    std::shuffle(c.token_ids.begin(), c.token_ids.end(), rng);
    auto t2 = frequency_table(c);
    ASSERT_EQ(t1.entries.size(), t2.entries.size());
    for (std::size_t i = 0; i < t1.entries.size(); ++i) {
        EXPECT_EQ(t1.entries[i].type_id, t2.entries[i].type_id);
        EXPECT_EQ(t1.entries[i].count, t2.entries[i].count);
    }
}

TEST(FrequencyTable, EmptyCorpusRejected) {
    TokenizedCorpus c;
    EXPECT_THROW(frequency_table(c), DomainError);
}

TEST(FrequencyTable, ShardCountsMergeToWholeStreamCounts) {
    auto tokens = tokenize("the cat saw the cat saw the dog run the end");
    for (std::size_t split = 0; split <= tokens.size(); ++split) {
        Encoder left, right;
        for (std::size_t i = 0; i < split; ++i) left.add(tokens[i]);
        for (std::size_t i = split; i < tokens.size(); ++i) right.add(tokens[i]);
        std::map<std::string, std::uint64_t> merged;
        for (const auto& v : left.vocab()) merged[v.type] += v.count;
        for (const auto& v : right.vocab()) merged[v.type] += v.count;

        auto whole = encode(tokens);
        ASSERT_EQ(merged.size(), whole.vocab.size());
        for (const auto& v : whole.vocab) EXPECT_EQ(merged.at(v.type), v.count);
    }
}

TEST(Ttr, Examples) {
    EXPECT_DOUBLE_EQ(ttr(2, 10), 0.2);
    EXPECT_DOUBLE_EQ(ttr(17, 17), 1.0);
    // gigaword-scale magnitudes stay accurate
    EXPECT_NEAR(ttr(3'100'000, 2'620'000'000ull), 1.2e-3, 0.05e-3);
}

TEST(Ttr, DomainErrors) {
    EXPECT_THROW(ttr(0, 10), DomainError);
    EXPECT_THROW(ttr(11, 10), DomainError);
    EXPECT_THROW(ttr(0, 0), DomainError);
    EXPECT_THROW(ttr(1, 0), DomainError);
}

TEST(Hapax, Examples) {
    auto t = frequency_table(text_corpus("g m m g m g m g g m"));
    EXPECT_EQ(hapax_count(t), 0u);
    auto t2 = frequency_table(text_corpus("a a a b c"));
    EXPECT_EQ(hapax_count(t2), 2u);
}

TEST(Hapax, MatchesBruteForce) {
    std::mt19937_64 rng(31);
    for (int iter = 0; iter < 20; ++iter) {
        std::vector<std::string> toks;
        const int n = 1 + static_cast<int>(rng() % 300);
        for (int i = 0; i < n; ++i) toks.push_back("w" + std::to_string(rng() % 80));
        auto c = encode(toks);
        std::uint64_t ref = 0;
        for (const auto& v : c.vocab) ref += v.count == 1;
        EXPECT_EQ(hapax_count(frequency_table(c)), ref);
    }
}

TEST(GrowthCurve, StepOne) {
    TokenizedCorpus c;
    c.token_ids = {0, 1, 1, 0};
    c.vocab = {{"a", 2}, {"b", 2}};
    c.total_tokens = 4;
    auto g = growth_curve(c, 1);
    ASSERT_EQ(g.points.size(), 4u);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> expect{{1, 1}, {2, 2}, {3, 2}, {4, 2}};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(g.points[i].tokens_read, expect[i].first);
        EXPECT_EQ(g.points[i].vocabulary, expect[i].second);
    }
}

TEST(GrowthCurve, AllDistinct) {
    TokenizedCorpus c;
    for (std::uint32_t i = 0; i < 40; ++i) {
        c.token_ids.push_back(i);
        c.vocab.push_back({"w" + std::to_string(i), 1});
    }
    c.total_tokens = 40;
    for (const auto& p : growth_curve(c, 7).points)
        EXPECT_EQ(p.vocabulary, p.tokens_read);
}

TEST(GrowthCurve, LastPointClampedAndStepZeroRejected) {
    TokenizedCorpus c;
    c.token_ids = {0, 0, 1, 0, 1, 2, 0, 0, 1, 3};
    c.vocab = {{"a", 5}, {"b", 3}, {"c", 1}, {"d", 1}};
    c.total_tokens = 10;
    auto g = growth_curve(c, 3);
    ASSERT_EQ(g.points.size(), 4u);
    EXPECT_EQ(g.points.back().tokens_read, 10u);
    EXPECT_EQ(g.points.back().vocabulary, 4u);
    EXPECT_THROW(growth_curve(c, 0), DomainError);
}

TEST(GrowthCurve, MatchesSetInsertionOracleOnZipfStream) {
    GeneratorSpec spec;
    spec.V = 500;
    spec.a = 1.0;
    spec.L = 20000;
    spec.seed = 3;
    auto c = gen_corpus(spec);
    auto g = growth_curve(c, 137);
    std::unordered_set<std::uint32_t> seen;
    std::size_t gi = 0;
    for (std::uint64_t i = 0; i < c.total_tokens; ++i) {
        seen.insert(c.token_ids[i]);
        if (gi < g.points.size() && g.points[gi].tokens_read == i + 1) {
            EXPECT_EQ(g.points[gi].vocabulary, seen.size());
            ++gi;
        }
    }
    EXPECT_EQ(gi, g.points.size());
    // curve invariants
    for (std::size_t i = 1; i < g.points.size(); ++i) {
        EXPECT_GT(g.points[i].tokens_read, g.points[i - 1].tokens_read);
        EXPECT_GE(g.points[i].vocabulary, g.points[i - 1].vocabulary);
        EXPECT_LE(g.points[i].vocabulary - g.points[i - 1].vocabulary,
                  g.points[i].tokens_read - g.points[i - 1].tokens_read);
    }
}

TEST(GrowthCurve, LastPointTtrEqualsCorpusTtr) {
    auto c = text_corpus("one fish two fish red fish blue fish");
    auto g = growth_curve(c, 3);
    const auto& last = g.points.back();
    EXPECT_DOUBLE_EQ(ttr(last.vocabulary, last.tokens_read),
                     ttr(c.observed_types(), c.total_tokens));
}

TEST(FrequencyTableFromVocab, SkipsZeroRowsAndMatchesFullTable) {
    std::vector<VocabEntry> vocab{{"a", 3}, {"b", 0}, {"c", 5}, {"d", 1}};
    auto t = frequency_table_from_vocab(vocab);
    ASSERT_EQ(t.entries.size(), 3u);
    EXPECT_EQ(t.total_tokens, 9u);
    EXPECT_EQ(t.entries[0].type_id, 2u);
    EXPECT_EQ(t.entries[0].count, 5u);
    EXPECT_EQ(t.entries[1].type_id, 0u);
    EXPECT_EQ(t.entries[2].type_id, 3u);
    EXPECT_THROW(frequency_table_from_vocab({{"a", 0}}), DomainError);
}
