#pragma once
#include <cstdint>

namespace lexdiv {

// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Counter-mode SplitMix64: value i of a stream keyed by (seed, s1, s2) is a
// pure function of the key and i, so draws are reproducible independent of
// execution order, chunking, or thread count.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t s1 = 0, std::uint64_t s2 = 0) {
        key_ = mix64(seed + kGolden);
        key_ = mix64((key_ ^ s1) + kGolden);
        key_ = mix64((key_ ^ s2) + kGolden);
    }

    std::uint64_t at(std::uint64_t i) const { return mix64(key_ + (i + 1) * kGolden); }

    // uniform in [0, 1)
    double uniform_at(std::uint64_t i) const {
        return static_cast<double>(at(i) >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n); multiply-shift map (bias < n/2^64)
    std::uint64_t bounded_at(std::uint64_t i, std::uint64_t n) const {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(at(i)) * n) >> 64);
    }

    // sequential convenience
    std::uint64_t next() { return at(ctr_++); }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

}  // namespace lexdiv
