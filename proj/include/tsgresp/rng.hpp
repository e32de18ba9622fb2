#pragma once

// Counter-based random numbers.
//
// Every draw is a pure function of (key, counter). Keys are derived by folding
// integer tags into a seed with the SplitMix64 finalizer:
//
//     h0 = mix64(seed)
//     h_{i+1} = mix64(h_i ^ (tag_i + 0x9e3779b97f4a7c15 + (h_i << 6) + (h_i >> 2)))
//
// and a draw is bits(counter) = mix64(key ^ mix64(counter)). Uniform doubles
// take the top 53 bits. Nothing depends on call order, so results do not
// depend on thread count or iteration order.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace tsg {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t t : tags)
        h = mix64(h ^ (t + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
    return h;
}

class CounterRng {
public:
    constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    static constexpr CounterRng from(std::uint64_t seed,
                                     std::initializer_list<std::uint64_t> tags) noexcept {
        return CounterRng(derive_key(seed, tags));
    }

    constexpr std::uint64_t key() const noexcept { return key_; }

    /// Child stream; independent of the parent's counter space.
    constexpr CounterRng substream(std::uint64_t tag) const noexcept {
        return CounterRng(derive_key(key_, {tag}));
    }

    constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
        return mix64(key_ ^ mix64(counter));
    }

    /// Uniform on [0, 1).
    constexpr double uniform(std::uint64_t counter) const noexcept {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    constexpr double uniform(std::uint64_t counter, double lo, double hi) const noexcept {
        return lo + (hi - lo) * uniform(counter);
    }

    /// Standard normal by Box-Muller; consumes counters 2c and 2c+1.
    double normal(std::uint64_t counter) const noexcept {
        const double u1 = 1.0 - uniform(2 * counter);  // (0, 1]
        const double u2 = uniform(2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t key_;
};

}  // namespace tsg
