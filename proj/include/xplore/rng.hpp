#pragma once

#include <cstdint>
#include <string_view>

namespace xplore {

// SplitMix64 finalizer (Steele, Lea, Flood). Used to expand seeds and to
// derive independent sub-seeds; constants are the published ones.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// 64-bit FNV-1a, used to fold names (level ids, config tokens) into seeds.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Combine a parent seed with a child key. The splitting scheme is
//   child = splitmix64(parent ^ splitmix64(key))
// so sibling streams never share a state sequence prefix.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key) noexcept {
    return splitmix64(parent ^ splitmix64(key));
}

/// xorshift64* (Vigna 2014): shifts 12/25/27, output multiplier
/// 0x2545F4914F6CDD1D. The state is seeded through splitmix64 so seed 0 is
/// legal. All draws are platform independent; nothing here goes through
/// <random> distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(splitmix64(seed)) {
        if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
    }

    std::uint64_t next() noexcept {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1DULL;
    }

    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
    std::uint64_t below(std::uint64_t n) noexcept {
        if (n <= 1) return 0;
        const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % n;
    }

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

}  // namespace xplore
