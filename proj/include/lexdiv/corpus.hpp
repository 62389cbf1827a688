#pragma once
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "tokenizer.hpp"

namespace lexdiv {

struct VocabEntry {
    std::string type;
    std::uint64_t count = 0;
};

// Integer-coded token stream. Vocabulary is ordered by first occurrence for
// encoded text; synthetic corpora use rank order and may carry zero-count
// entries for ranks that never came up in the draw.
struct TokenizedCorpus {
    std::vector<std::uint32_t> token_ids;
    std::vector<VocabEntry> vocab;
    std::uint64_t total_tokens = 0;

    std::uint64_t observed_types() const {
        std::uint64_t v = 0;
        for (const auto& e : vocab) v += e.count > 0;
        return v;
    }
};

namespace detail {
struct SvHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
        return std::hash<std::string_view>{}(s);
    }
};
}  // namespace detail

// Single-writer vocabulary assignment in first-occurrence order. The caller
// decides what to do with the ids (collect, write to disk, or drop them and
// keep only the O(V) vocabulary, which is how streaming counting stays flat
// in memory).
class Encoder {
  public:
    std::uint32_t add(std::string_view token) {
        auto it = map_.find(token);
        std::uint32_t id;
        if (it == map_.end()) {
            if (vocab_.size() > std::numeric_limits<std::uint32_t>::max())
                throw CapacityError("vocabulary exceeds 32-bit id space");
            id = static_cast<std::uint32_t>(vocab_.size());
            map_.emplace(std::string(token), id);
            vocab_.push_back({std::string(token), 0});
        } else {
            id = it->second;
        }
        ++vocab_[id].count;
        ++total_;
        return id;
    }

    std::uint64_t total() const { return total_; }
    const std::vector<VocabEntry>& vocab() const { return vocab_; }
    std::vector<VocabEntry> take_vocab() { return std::move(vocab_); }

  private:
    std::unordered_map<std::string, std::uint32_t, detail::SvHash, std::equal_to<>> map_;
    std::vector<VocabEntry> vocab_;
    std::uint64_t total_ = 0;
};

template <typename Range>
TokenizedCorpus encode(const Range& tokens) {
    TokenizedCorpus c;
    Encoder enc;
    for (const auto& t : tokens) c.token_ids.push_back(enc.add(t));
    c.vocab = enc.take_vocab();
    c.total_tokens = enc.total();
    return c;
}

inline std::vector<std::string> decode(const TokenizedCorpus& c) {
    std::vector<std::string> out;
    out.reserve(c.token_ids.size());
    for (auto id : c.token_ids) out.push_back(c.vocab.at(id).type);
    return out;
}

// ---- file format ----
// ids file: "LXDC" magic, u8 version, u8 tokenizer flags, u16 reserved,
// u64 token count, u32 vocabulary rows, then the token ids as little-endian
// u32. Vocabulary rides in a TSV next to it: id <TAB> type <TAB> count.

inline constexpr char kMagic[4] = {'L', 'X', 'D', 'C'};
inline constexpr std::uint8_t kFormatVersion = 1;

inline std::uint8_t pack_options(const TokenizerOptions& o) {
    std::uint8_t f = 0;
    if (o.casing_mode == CasingMode::turkish_aware) f |= 1;
    if (o.strip_numbers) f |= 2;
    if (o.preserve_accents) f |= 4;
    return f;
}

inline TokenizerOptions unpack_options(std::uint8_t f) {
    TokenizerOptions o;
    o.casing_mode = (f & 1) ? CasingMode::turkish_aware : CasingMode::unicode_simple;
    o.strip_numbers = (f & 2) != 0;
    o.preserve_accents = (f & 4) != 0;
    return o;
}

// Writes to <path>.tmp and renames into place on commit, so readers never see
// a half-written file.
class AtomicFile {
  public:
    explicit AtomicFile(const std::string& path)
        : final_(path), tmp_(path + ".tmp"), out_(tmp_, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError("cannot open " + tmp_ + " for writing");
    }
    std::ofstream& stream() { return out_; }
    void commit() {
        out_.flush();
        if (!out_) throw IoError("write failed for " + tmp_);
        out_.close();
        std::error_code ec;
        std::filesystem::rename(tmp_, final_, ec);
        if (ec) throw IoError("rename " + tmp_ + " -> " + final_ + ": " + ec.message());
    }
    ~AtomicFile() {
        if (out_.is_open()) {
            out_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }

  private:
    std::string final_, tmp_;
    std::ofstream out_;
};

namespace detail {
inline void put_u32(std::string& buf, std::uint32_t v) {
    buf.push_back(static_cast<char>(v & 0xFF));
    buf.push_back(static_cast<char>((v >> 8) & 0xFF));
    buf.push_back(static_cast<char>((v >> 16) & 0xFF));
    buf.push_back(static_cast<char>((v >> 24) & 0xFF));
}
inline void put_u64(std::string& buf, std::uint64_t v) {
    put_u32(buf, static_cast<std::uint32_t>(v & 0xFFFFFFFFull));
    put_u32(buf, static_cast<std::uint32_t>(v >> 32));
}
inline std::uint32_t get_u32(const unsigned char* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
}
inline std::uint64_t get_u64(const unsigned char* p) {
    return std::uint64_t(get_u32(p)) | std::uint64_t(get_u32(p + 4)) << 32;
}
}  // namespace detail

inline void write_corpus(const TokenizedCorpus& c, const std::string& ids_path,
                         const std::string& vocab_path, TokenizerOptions opts = {}) {
    {
        AtomicFile f(ids_path);
        std::string hdr;
        hdr.append(kMagic, 4);
        hdr.push_back(static_cast<char>(kFormatVersion));
        hdr.push_back(static_cast<char>(pack_options(opts)));
        hdr.push_back(0);
        hdr.push_back(0);
        detail::put_u64(hdr, c.total_tokens);
        detail::put_u32(hdr, static_cast<std::uint32_t>(c.vocab.size()));
        f.stream().write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
        std::string buf;
        buf.reserve(1u << 16);
        for (std::size_t i = 0; i < c.token_ids.size(); ++i) {
            detail::put_u32(buf, c.token_ids[i]);
            if (buf.size() >= (1u << 16)) {
                f.stream().write(buf.data(), static_cast<std::streamsize>(buf.size()));
                buf.clear();
            }
        }
        f.stream().write(buf.data(), static_cast<std::streamsize>(buf.size()));
        f.commit();
    }
    {
        AtomicFile f(vocab_path);
        f.stream() << "id\ttype\tcount\n";
        for (std::size_t i = 0; i < c.vocab.size(); ++i)
            f.stream() << i << '\t' << c.vocab[i].type << '\t' << c.vocab[i].count << '\n';
        f.commit();
    }
}

inline std::vector<VocabEntry> read_vocab_tsv(const std::string& vocab_path) {
    std::ifstream in(vocab_path);
    if (!in) throw IoError("cannot open " + vocab_path);
    std::string line;
    if (!std::getline(in, line) || line != "id\ttype\tcount")
        throw FormatError("bad vocabulary TSV header in " + vocab_path);
    std::vector<VocabEntry> vocab;
    std::uint64_t row = 0;
    while (std::getline(in, line)) {
        std::size_t t1 = line.find('\t');
        std::size_t t2 = line.rfind('\t');
        if (t1 == std::string::npos || t2 == t1)
            throw FormatError("malformed vocabulary row " + std::to_string(row));
        std::uint64_t id = std::stoull(line.substr(0, t1));
        if (id != row) throw FormatError("non-sequential vocabulary id " + std::to_string(id));
        VocabEntry e;
        e.type = line.substr(t1 + 1, t2 - t1 - 1);
        e.count = std::stoull(line.substr(t2 + 1));
        vocab.push_back(std::move(e));
        ++row;
    }
    return vocab;
}

inline TokenizedCorpus read_corpus(const std::string& ids_path, const std::string& vocab_path,
                                   TokenizerOptions* opts_out = nullptr) {
    std::ifstream in(ids_path, std::ios::binary);
    if (!in) throw IoError("cannot open " + ids_path);
    unsigned char hdr[20];
    if (!in.read(reinterpret_cast<char*>(hdr), sizeof hdr))
        throw FormatError("truncated corpus header in " + ids_path);
    if (std::memcmp(hdr, kMagic, 4) != 0)
        throw FormatError("bad magic number in " + ids_path + " (not a corpus file)");
    if (hdr[4] != kFormatVersion)
        throw FormatError("unsupported corpus format version " + std::to_string(hdr[4]));
    if (opts_out) *opts_out = unpack_options(hdr[5]);
    TokenizedCorpus c;
    c.total_tokens = detail::get_u64(hdr + 8);
    std::uint32_t vocab_rows = detail::get_u32(hdr + 16);

    c.token_ids.resize(c.total_tokens);
    std::vector<unsigned char> buf(1u << 16);
    std::uint64_t done = 0;
    while (done < c.total_tokens) {
        std::uint64_t want = std::min<std::uint64_t>((c.total_tokens - done) * 4, buf.size());
        if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(want)))
            throw FormatError("truncated token stream in " + ids_path);
        for (std::uint64_t i = 0; i < want; i += 4) {
            std::uint32_t id = detail::get_u32(buf.data() + i);
            if (id >= vocab_rows)
                throw FormatError("token id " + std::to_string(id) + " out of vocabulary range");
            c.token_ids[done++] = id;
        }
    }
    c.vocab = read_vocab_tsv(vocab_path);
    if (c.vocab.size() != vocab_rows)
        throw FormatError("vocabulary row count mismatch in " + vocab_path);
    std::uint64_t sum = 0;
    for (const auto& e : c.vocab) sum += e.count;
    if (sum != c.total_tokens)
        throw FormatError("vocabulary counts do not sum to token count in " + vocab_path);
    return c;
}

}  // namespace lexdiv
