#!/usr/bin/env python3
"""Generate include/lexdiv/unicode_tables.hpp from Python's unicodedata.

Character classes for the tokenizer:
  KEEP  - token material (letters, marks treated separately, Nl/No, Cf, ...)
  BREAK - token boundaries: categories P*, S*, Z*, Cc
  DIGIT - category Nd (stripped from tokens by default)
  MARK  - category Mn (kept unless accents are being stripped)

Also emits a simple (1:1) lowercase delta table and an accent-strip map
(canonical NFD with Mn marks removed, only for codepoints whose NFD
actually contains a mark).
"""
import sys
import unicodedata

MAXCP = 0x110000
BLOCK = 256

KEEP, BREAK, DIGIT, MARK = 0, 1, 2, 3


def char_class(cp: int) -> int:
    cat = unicodedata.category(chr(cp))
    if cat[0] in "PSZ" or cat == "Cc":
        return BREAK
    if cat == "Nd":
        return DIGIT
    if cat == "Mn":
        return MARK
    return KEEP


def simple_lower(cp: int) -> int:
    # U+0130 has a multi-codepoint full lowercasing; its simple mapping is 'i'.
    if cp == 0x130:
        return 0x69
    lo = chr(cp).lower()
    return ord(lo) if len(lo) == 1 else cp


def two_stage(values, fmt):
    """Split a full-plane array into unique BLOCK-sized chunks + index."""
    blocks, index, seen = [], [], {}
    for base in range(0, MAXCP, BLOCK):
        chunk = tuple(values[base:base + BLOCK])
        if chunk not in seen:
            seen[chunk] = len(blocks)
            blocks.append(chunk)
        index.append(seen[chunk])
    assert len(blocks) < 0x10000
    return blocks, index


def emit_array(out, name, ctype, vals, per_line=16):
    out.append(f"inline constexpr {ctype} {name}[{len(vals)}] = {{")
    for i in range(0, len(vals), per_line):
        out.append("    " + ", ".join(str(v) for v in vals[i:i + per_line]) + ",")
    out.append("};\n")


def main() -> None:
    classes = [char_class(cp) for cp in range(MAXCP)]
    lowers = [simple_lower(cp) - cp for cp in range(MAXCP)]

    strip = []  # (cp, base1, base2); bases exclude Mn marks
    for cp in range(MAXCP):
        if classes[cp] == MARK:
            continue
        d = unicodedata.normalize("NFD", chr(cp))
        if len(d) == 1 and d == chr(cp):
            continue
        if not any(unicodedata.category(c) == "Mn" for c in d):
            continue  # not an accent decomposition (e.g. Hangul)
        bases = [ord(c) for c in d if unicodedata.category(c) != "Mn"]
        assert len(bases) <= 2, hex(cp)
        strip.append((cp, bases[0] if bases else 0, bases[1] if len(bases) > 1 else 0))

    cls_blocks, cls_index = two_stage(classes, "u8")
    low_blocks, low_index = two_stage(lowers, "i32")

    out = [
        "// Generated by scripts/gen_unicode_tables.py — do not edit.",
        f"// Unicode data version: {unicodedata.unidata_version}",
        "#pragma once",
        "#include <cstdint>",
        "",
        "namespace lexdiv::uni {",
        "",
        f"inline constexpr int kBlockShift = 8;",
        f"inline constexpr char32_t kMaxCodepoint = 0x10FFFF;",
        "",
        "// character classes",
        "enum : std::uint8_t { CC_KEEP = 0, CC_BREAK = 1, CC_DIGIT = 2, CC_MARK = 3 };",
        "",
    ]
    emit_array(out, "kClassIndex", "std::uint16_t", cls_index)
    flat_cls = [v for b in cls_blocks for v in b]
    emit_array(out, "kClassBlocks", "std::uint8_t", flat_cls, per_line=32)
    emit_array(out, "kLowerIndex", "std::uint16_t", low_index)
    flat_low = [v for b in low_blocks for v in b]
    emit_array(out, "kLowerBlocks", "std::int32_t", flat_low, per_line=16)

    out.append(f"inline constexpr std::size_t kStripCount = {len(strip)};")
    emit_array(out, "kStripKey", "char32_t", [hex(c) for c, _, _ in strip])
    emit_array(out, "kStripBase1", "char32_t", [hex(b) for _, b, _ in strip])
    emit_array(out, "kStripBase2", "char32_t", [hex(b) for _, _, b in strip])
    out.append("}  // namespace lexdiv::uni")

    with open(sys.argv[1] if len(sys.argv) > 1 else "include/lexdiv/unicode_tables.hpp", "w") as f:
        f.write("\n".join(out) + "\n")
    print(f"classes: {len(cls_blocks)} blocks, lowercase: {len(low_blocks)} blocks, "
          f"strip map: {len(strip)} entries")


if __name__ == "__main__":
    main()
