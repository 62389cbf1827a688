#pragma once
#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "unicode_tables.hpp"

namespace lexdiv::uni {

inline std::uint8_t char_class(char32_t cp) {
    if (cp > kMaxCodepoint) return CC_KEEP;
    return kClassBlocks[std::size_t(kClassIndex[cp >> kBlockShift]) * 256 + (cp & 0xFF)];
}

inline char32_t to_lower(char32_t cp) {
    if (cp > kMaxCodepoint) return cp;
    return cp + static_cast<char32_t>(
                    kLowerBlocks[std::size_t(kLowerIndex[cp >> kBlockShift]) * 256 + (cp & 0xFF)]);
}

// Accent removal: canonical decomposition with combining marks dropped.
// Returns the number of base codepoints written to out[0..1]; 0 means the
// codepoint has no mark-carrying decomposition (use it unchanged).
inline int strip_marks(char32_t cp, char32_t out[2]) {
    const char32_t* end = kStripKey + kStripCount;
    const char32_t* it = std::lower_bound(kStripKey, end, cp);
    if (it == end || *it != cp) return 0;
    std::size_t idx = static_cast<std::size_t>(it - kStripKey);
    out[0] = kStripBase1[idx];
    out[1] = kStripBase2[idx];
    return out[1] ? 2 : (out[0] ? 1 : 0);
}

// Strict UTF-8 decoder. Advances pos past one scalar value; rejects overlong
// forms, surrogates, and values beyond U+10FFFF. `base` is the absolute file
// offset of data[0], used for error reporting.
inline char32_t decode_utf8(std::string_view data, std::size_t& pos, std::size_t base,
                            bool& need_more) {
    need_more = false;
    const auto b = [&](std::size_t i) { return static_cast<std::uint8_t>(data[i]); };
    std::size_t i = pos;
    std::uint8_t b0 = b(i);
    if (b0 < 0x80) {
        pos = i + 1;
        return b0;
    }
    int len;
    char32_t cp, min;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4, cp = b0 & 0x07, min = 0x10000;
    } else {
        throw DecodeError("invalid UTF-8 lead byte", base + i);
    }
    if (i + std::size_t(len) > data.size()) {
        need_more = true;
        return 0;
    }
    for (int k = 1; k < len; ++k) {
        std::uint8_t bk = b(i + std::size_t(k));
        if ((bk & 0xC0) != 0x80) throw DecodeError("invalid UTF-8 continuation byte", base + i);
        cp = (cp << 6) | (bk & 0x3F);
    }
    if (cp < min) throw DecodeError("overlong UTF-8 sequence", base + i);
    if (cp >= 0xD800 && cp <= 0xDFFF) throw DecodeError("UTF-8 encoded surrogate", base + i);
    if (cp > kMaxCodepoint) throw DecodeError("codepoint beyond U+10FFFF", base + i);
    pos = i + std::size_t(len);
    return cp;
}

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace lexdiv::uni
