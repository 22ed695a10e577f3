#pragma once

// Seeded random streams. Every randomized routine draws from SplitMix64 (the
// generator behind Java's SplittableRandom): a Weyl-sequence counter passed
// through a 64-bit mixing function. Substreams are keyed by (seed, index), so
// trial t of a simulation sees the same numbers however trials are scheduled.
// Doubles and bounded integers are derived here rather than through <random>
// distributions, whose output differs between standard libraries. Changing any
// of this changes every seeded output; bump kRandomStreamVersion if you do.

#include <cstdint>
#include <string_view>

namespace meshrel {

inline constexpr std::string_view kRandomStreamAlgorithm = "splitmix64";
inline constexpr int kRandomStreamVersion = 1;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for substream `index` of `seed`, independent of how many other
// substreams are drawn or in which order.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : state_(seed) {}
    RandomStream(std::uint64_t seed, std::uint64_t index) : state_(substream_seed(seed, index)) {}

    std::uint64_t next() noexcept {
        const std::uint64_t z = splitmix64(state_);
        state_ += 0x9e3779b97f4a7c15ULL;
        return z;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n), n > 0, by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % n;
    }

private:
    std::uint64_t state_;
};

}  // namespace meshrel
