#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "lexdiv/corpus.hpp"
#include "lexdiv/tokenizer.hpp"
#include "lexdiv/unicode.hpp"

using namespace lexdiv;

namespace {

std::vector<std::string> tok(std::string_view s, TokenizerOptions o = {}) {
    return tokenize(s, o);
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& t : v) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

std::filesystem::path tmp_file(const std::string& name, const std::string& content) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream f(p, std::ios::binary);
    f << content;
    return p;
}

}  // namespace

TEST(Tokenize, LowercasesAndDropsPunctuationAndNumbers) {
    EXPECT_EQ(tok("Hello, WORLD 42 café!"),
              (std::vector<std::string>{"hello", "world", "café"}));
}

TEST(Tokenize, EmptyInput) {
    EXPECT_EQ(tok(""), std::vector<std::string>{});
    EXPECT_EQ(tok("   \t\n  "), std::vector<std::string>{});
    EXPECT_EQ(tok("42 ... 17!"), std::vector<std::string>{});
}

TEST(Tokenize, TurkishCasing) {
    TokenizerOptions tr;
    tr.casing_mode = CasingMode::turkish_aware;
    EXPECT_EQ(tok("İstanbul", tr), std::vector<std::string>{"istanbul"});
    EXPECT_EQ(tok("Istanbul", tr), std::vector<std::string>{"ıstanbul"});
    // default mode maps both capital I forms to plain i
    EXPECT_EQ(tok("İstanbul"), std::vector<std::string>{"istanbul"});
    EXPECT_EQ(tok("Istanbul"), std::vector<std::string>{"istanbul"});
}

TEST(Tokenize, EmbeddedDigitsStrippedInsideWords) {
    EXPECT_EQ(tok("covid19 b2b 2022"), (std::vector<std::string>{"covid", "bb"}));
    TokenizerOptions keep;
    keep.strip_numbers = false;
    EXPECT_EQ(tok("covid19 b2b 2022", keep),
              (std::vector<std::string>{"covid19", "b2b", "2022"}));
}

TEST(Tokenize, ApostrophesAndHyphensSplit) {
    EXPECT_EQ(tok("don't re-do"), (std::vector<std::string>{"don", "t", "re", "do"}));
    EXPECT_EQ(tok("l’été"), (std::vector<std::string>{"l", "été"}));
}

TEST(Tokenize, AccentHandling) {
    EXPECT_EQ(tok("café naïve"), (std::vector<std::string>{"café", "naïve"}));
    TokenizerOptions strip;
    strip.preserve_accents = false;
    EXPECT_EQ(tok("café naïve", strip), (std::vector<std::string>{"cafe", "naive"}));
    // combining-mark form: e + U+0301
    EXPECT_EQ(tok("café", strip), std::vector<std::string>{"cafe"});
    EXPECT_EQ(tok("café"), std::vector<std::string>{"café"});
}

TEST(Tokenize, MixedScripts) {
    EXPECT_EQ(tok("ءизмерение ένταξη 한국어!"),
              (std::vector<std::string>{"ءизмерение", "ένταξη", "한국어"}));
}

TEST(Tokenize, InvalidUtf8ReportsByteOffset) {
    try {
        tok("ab\x80"
            "cd");
        FAIL() << "expected decode error";
    } catch (const DecodeError& e) {
        EXPECT_EQ(e.byte_offset, 2u);
        EXPECT_EQ(e.kind, "decode");
    }
    // overlong encoding of '/'
    EXPECT_THROW(tok("\xC0\xAF"), DecodeError);
    // surrogate half
    EXPECT_THROW(tok("\xED\xA0\x80"), DecodeError);
    // truncated multibyte at end of input
    try {
        tok("xy caf\xC3");
        FAIL() << "expected decode error";
    } catch (const DecodeError& e) {
        EXPECT_EQ(e.byte_offset, 6u);
    }
}

TEST(Tokenize, IdempotentOverItsOwnOutput) {
    const std::vector<std::string> inputs = {
        "Hello, WORLD 42 café!",
        "don't re-do covid19 -- end.",
        "Ďábelské ořechy; çılgın proje?!",
        "a1b2c3 ... x—y–z",
        "ÀÉÎÕÜ àéîõü ÆØÅ æøå ß",
    };
    for (const auto& s : inputs) {
        auto once = tok(s);
        EXPECT_EQ(tok(join(once)), once) << s;
    }
}

TEST(Tokenize, OutputNeverContainsBreakOrDigitCharacters) {
    std::mt19937_64 rng(99);
    const std::u32string pool = U"aZ9 ,.!-'é漢 \t\nÇ0к;ß";
    for (int iter = 0; iter < 200; ++iter) {
        std::string s;
        const int len = static_cast<int>(rng() % 60);
        for (int i = 0; i < len; ++i)
            uni::append_utf8(s, pool[rng() % pool.size()]);
        for (const auto& t : tok(s)) {
            ASSERT_FALSE(t.empty());
            std::size_t pos = 0;
            bool more = false;
            while (pos < t.size()) {
                char32_t cp = uni::decode_utf8(t, pos, 0, more);
                ASSERT_FALSE(more);
                auto cls = uni::char_class(cp);
                EXPECT_NE(cls, uni::CC_BREAK) << t;
                EXPECT_NE(cls, uni::CC_DIGIT) << t;
            }
        }
    }
}

TEST(Tokenize, StreamingChunkSizesAgree) {
    std::string text =
        "Das Straßen-Café: ÇILGIN proje, 42 naïve Ümläute — у реки; "
        "한국어와 ένταξη τῶν ΛΈΞΕΩΝ!  末尾";
    // repeat to make chunk boundaries land everywhere
    std::string big;
    for (int i = 0; i < 7; ++i) big += text;
    auto expect = tok(big);
    for (std::size_t chunk : {std::size_t{1}, std::size_t{3}, std::size_t{7}, std::size_t{4096}}) {
        std::vector<std::string> got;
        Tokenizer t;
        auto emit = [&](std::string_view v) { got.emplace_back(v); };
        for (std::size_t i = 0; i < big.size(); i += chunk)
            t.feed(std::string_view(big).substr(i, chunk), emit);
        t.finish(emit);
        EXPECT_EQ(got, expect) << "chunk=" << chunk;
    }
}

TEST(Tokenize, FileStreamingMatchesInMemory) {
    std::string text = "Ärger im Straßen-café?\nNo. 42 times no!\n";
    auto p = tmp_file("lexdiv_tok_test.txt", text);
    for (std::size_t chunk : {std::size_t{1}, std::size_t{5}, std::size_t{1 << 20}}) {
        std::vector<std::string> got;
        tokenize_file(p.string(), {}, [&](std::string_view v) { got.emplace_back(v); }, chunk);
        EXPECT_EQ(got, tok(text));
    }
    std::filesystem::remove(p);
}

TEST(Tokenize, FileWithTruncatedUtf8Throws) {
    auto p = tmp_file("lexdiv_tok_bad.txt", std::string("ok caf\xC3"));
    EXPECT_THROW(
        tokenize_file(p.string(), {}, [](std::string_view) {}),
        DecodeError);
    std::filesystem::remove(p);
    EXPECT_THROW(tokenize_file("/nonexistent/file.txt", {}, [](std::string_view) {}), IoError);
}

TEST(Encode, FirstOccurrenceOrder) {
    auto c = encode(std::vector<std::string>{"g", "m", "m", "g"});
    EXPECT_EQ(c.token_ids, (std::vector<std::uint32_t>{0, 1, 1, 0}));
    ASSERT_EQ(c.vocab.size(), 2u);
    EXPECT_EQ(c.vocab[0].type, "g");
    EXPECT_EQ(c.vocab[0].count, 2u);
    EXPECT_EQ(c.vocab[1].type, "m");
    EXPECT_EQ(c.vocab[1].count, 2u);
    EXPECT_EQ(c.total_tokens, 4u);
}

TEST(Encode, EmptyCorpus) {
    auto c = encode(std::vector<std::string>{});
    EXPECT_TRUE(c.token_ids.empty());
    EXPECT_TRUE(c.vocab.empty());
    EXPECT_EQ(c.total_tokens, 0u);
}

TEST(Encode, RoundTripRandomTokenLists) {
    std::mt19937_64 rng(7);
    const std::vector<std::string> alphabet = {"a", "b", "ab", "ba", "é", "x", "long-ish-token"};
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<std::string> tokens;
        const int n = static_cast<int>(rng() % 200);
        for (int i = 0; i < n; ++i) tokens.push_back(alphabet[rng() % alphabet.size()]);
        auto c = encode(tokens);
        EXPECT_EQ(decode(c), tokens);
        EXPECT_EQ(c.total_tokens, tokens.size());
        std::uint64_t sum = 0;
        for (const auto& v : c.vocab) {
            EXPECT_GT(v.count, 0u);
            sum += v.count;
        }
        EXPECT_EQ(sum, c.total_tokens);
        for (auto id : c.token_ids) EXPECT_LT(id, c.vocab.size());
    }
}

TEST(CorpusFile, RoundTrip) {
    auto c = encode(tok("the cat saw the cat and the dog"));
    TokenizerOptions opts;
    opts.casing_mode = CasingMode::turkish_aware;
    opts.strip_numbers = false;
    auto dir = std::filesystem::temp_directory_path();
    auto ids = (dir / "lexdiv_rt.tokens").string();
    auto voc = (dir / "lexdiv_rt.vocab.tsv").string();
    write_corpus(c, ids, voc, opts);
    TokenizerOptions read_opts;
    auto back = read_corpus(ids, voc, &read_opts);
    EXPECT_EQ(back.token_ids, c.token_ids);
    EXPECT_EQ(back.total_tokens, c.total_tokens);
    ASSERT_EQ(back.vocab.size(), c.vocab.size());
    for (std::size_t i = 0; i < c.vocab.size(); ++i) {
        EXPECT_EQ(back.vocab[i].type, c.vocab[i].type);
        EXPECT_EQ(back.vocab[i].count, c.vocab[i].count);
    }
    EXPECT_EQ(read_opts.casing_mode, CasingMode::turkish_aware);
    EXPECT_FALSE(read_opts.strip_numbers);
    EXPECT_TRUE(read_opts.preserve_accents);
    std::filesystem::remove(ids);
    std::filesystem::remove(voc);
}

TEST(CorpusFile, RejectsCorruption) {
    auto c = encode(std::vector<std::string>{"a", "b", "a"});
    auto dir = std::filesystem::temp_directory_path();
    auto ids = (dir / "lexdiv_bad.tokens").string();
    auto voc = (dir / "lexdiv_bad.vocab.tsv").string();
    write_corpus(c, ids, voc);

    {  // wrong magic
        std::fstream f(ids, std::ios::in | std::ios::out | std::ios::binary);
        f.put('Z');
    }
    EXPECT_THROW(read_corpus(ids, voc), FormatError);

    write_corpus(c, ids, voc);
    {  // vocabulary count no longer sums to the header token count
        std::ofstream f(voc, std::ios::binary);
        f << "id\ttype\tcount\n0\ta\t5\n1\tb\t1\n";
    }
    EXPECT_THROW(read_corpus(ids, voc), FormatError);

    {  // bad TSV header
        std::ofstream f(voc, std::ios::binary);
        f << "type\tcount\n";
    }
    EXPECT_THROW(read_vocab_tsv(voc), FormatError);

    EXPECT_THROW(read_corpus("/nonexistent.tokens", voc), IoError);
    std::filesystem::remove(ids);
    std::filesystem::remove(voc);
}
