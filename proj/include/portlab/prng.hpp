#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace portlab {

/// SplitMix64 generator with explicit double conversion.
///
/// Standard-library distributions are implementation-defined, so results
/// drawn through them differ across toolchains. Every randomized artifact in
/// this project (portfolio sampling, network init, shuffling, dropout) must
/// be bit-reproducible from its seed, so draws go through this generator.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, bound); bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % bound;
    }

    /// Derive an independent substream for (seed, index) pairs.
    static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
        SplitMix64 mixer(seed ^ (0xA0761D6478BD642FULL + index * 0xE7037ED1A0B428DBULL));
        return SplitMix64(mixer.next_u64());
    }

private:
    std::uint64_t state_;
};

/// Fisher-Yates shuffle driven by SplitMix64.
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace portlab
