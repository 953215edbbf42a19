#pragma once

#include <cstdint>

namespace storygen {

// SplitMix64 (Steele, Lea, Flood). Every random decision in the library is drawn
// from one of these, seeded explicitly; there is no other entropy source.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Index in [0, n). Plain modulo; the bias is at most n / 2^64.
    constexpr std::uint64_t below(std::uint64_t n) noexcept { return next() % n; }

    // Uniform in [0, 1) with 53 bits of precision.
    constexpr double next_double() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    constexpr std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

}  // namespace storygen
