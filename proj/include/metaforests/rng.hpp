#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string_view>

namespace metaforests {

// All randomness in the project flows through this header. We do not use
// <random> distributions because their output is implementation-defined;
// every draw here is specified down to the bit so that fixed seeds give
// identical results across runs, thread counts and platforms.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
constexpr std::uint64_t mix_bits(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

// Fixed 64-bit mixer used everywhere a seed is derived from a parent seed
// plus an index (per-tree seeds, per-fold seeds, per-iteration seeds).
constexpr std::uint64_t mix64(std::uint64_t seed, std::uint64_t k) {
    return mix_bits(seed + (k + 1) * kGolden);
}

constexpr std::uint64_t mix64(std::uint64_t seed, std::uint64_t k1, std::uint64_t k2) {
    return mix64(mix64(seed, k1), k2);
}

// FNV-1a, for folding strings (domain names) into seed derivations.
constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// splitmix64 stream
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix_bits(state_);
    }

    // uniform in [0, 1), 53 bits
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0, n); unbiased via rejection
    std::size_t next_index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("next_index: bound must be positive");
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return static_cast<std::size_t>(v % bound);
    }

    // standard normal via Box-Muller; the spare value is cached
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_unit();
        const double u2 = next_unit();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace metaforests
