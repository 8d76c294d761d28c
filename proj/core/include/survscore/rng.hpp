#pragma once

// SplitMix64 (Steele, Lea & Flood 2014): a 64-bit counter-based generator.
// Streams are derived from (seed, index) so replicate r always sees the same
// numbers no matter which thread runs it.

#include <cstdint>

namespace survscore {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept { return mix64(state_ += kGoldenGamma); }

private:
    std::uint64_t state_;
};

/// Independent stream number `index` under `seed`.
constexpr SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t index) noexcept {
    return SplitMix64(mix64(seed) ^ mix64(index + kGoldenGamma));
}

/// Uniform on the open interval (0, 1): midpoints of a 2^-52 grid.
inline double uniform_open01(SplitMix64& g) noexcept {
    return (static_cast<double>(g() >> 12) + 0.5) * 0x1.0p-52;
}

/// Uniform integer in [0, n), n > 0, by rejection (no modulo bias).
inline std::uint64_t uniform_below(SplitMix64& g, std::uint64_t n) noexcept {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t x = g();
        if (x >= threshold) return x % n;
    }
}

}  // namespace survscore
