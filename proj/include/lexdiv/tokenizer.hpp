#pragma once
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "unicode.hpp"

namespace lexdiv {

enum class CasingMode { unicode_simple, turkish_aware };

struct TokenizerOptions {
    CasingMode casing_mode = CasingMode::unicode_simple;
    bool strip_numbers = true;
    bool preserve_accents = true;
};

// Streaming tokenizer: words are maximal runs of token material between
// whitespace/punctuation/symbol boundaries, lowercased, with digits stripped
// in place (token dropped if nothing remains). Chunk boundaries may fall
// anywhere, including inside a UTF-8 sequence.
class Tokenizer {
  public:
    explicit Tokenizer(TokenizerOptions opts = {}) : opts_(opts) {}

    template <typename Emit>
    void feed(std::string_view chunk, Emit&& emit) {
        std::size_t pos = 0;
        while (!pending_.empty() && pos < chunk.size()) {
            pending_.push_back(chunk[pos++]);
            std::size_t p = 0;
            bool more = false;
            char32_t cp = uni::decode_utf8(pending_, p, pend_start_, more);
            if (more) continue;
            process(cp, emit);
            pending_.clear();
        }
        while (pos < chunk.size()) {
            bool more = false;
            std::size_t start = pos;
            char32_t cp = uni::decode_utf8(chunk, pos, consumed_, more);
            if (more) {
                pending_.assign(chunk.substr(start));
                pend_start_ = consumed_ + start;
                break;
            }
            process(cp, emit);
        }
        consumed_ += chunk.size();
    }

    template <typename Emit>
    void finish(Emit&& emit) {
        if (!pending_.empty())
            throw DecodeError("truncated UTF-8 sequence", pend_start_);
        flush(emit);
    }

  private:
    template <typename Emit>
    void process(char32_t cp, Emit& emit) {
        if (opts_.casing_mode == CasingMode::turkish_aware) {
            if (cp == U'I') cp = 0x131;        // I -> dotless i
            else if (cp == 0x130) cp = U'i';   // dotted I -> i
        }
        cp = uni::to_lower(cp);
        char32_t bases[2];
        const char32_t* seq = &cp;
        int n = 1;
        if (!opts_.preserve_accents) {
            int nb = uni::strip_marks(cp, bases);
            if (nb > 0) {
                seq = bases;
                n = nb;
            }
        }
        for (int k = 0; k < n; ++k) {
            char32_t c = seq[k];
            switch (uni::char_class(c)) {
                case uni::CC_BREAK:
                    flush(emit);
                    break;
                case uni::CC_DIGIT:
                    if (!opts_.strip_numbers) uni::append_utf8(cur_, c);
                    break;
                case uni::CC_MARK:
                    if (opts_.preserve_accents) uni::append_utf8(cur_, c);
                    break;
                default:
                    uni::append_utf8(cur_, c);
            }
        }
    }

    template <typename Emit>
    void flush(Emit& emit) {
        if (!cur_.empty()) {
            emit(std::string_view(cur_));
            cur_.clear();
        }
    }

    TokenizerOptions opts_;
    std::string cur_;
    std::string pending_;
    std::uint64_t pend_start_ = 0;
    std::uint64_t consumed_ = 0;
};

inline std::vector<std::string> tokenize(std::string_view text, TokenizerOptions opts = {}) {
    std::vector<std::string> out;
    Tokenizer t(opts);
    auto emit = [&](std::string_view tok) { out.emplace_back(tok); };
    t.feed(text, emit);
    t.finish(emit);
    return out;
}

template <typename Emit>
void tokenize_file(const std::string& path, TokenizerOptions opts, Emit&& emit,
                   std::size_t chunk_size = 1u << 20) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    Tokenizer t(opts);
    std::string buf(chunk_size, '\0');
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        std::streamsize got = in.gcount();
        if (got <= 0) break;
        t.feed(std::string_view(buf.data(), static_cast<std::size_t>(got)), emit);
    }
    t.finish(emit);
}

}  // namespace lexdiv
