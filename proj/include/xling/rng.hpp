#pragma once

#include <cstdint>
#include <string_view>

namespace xling {

// SplitMix64 stream. All sampling in the project goes through this generator
// so that a given seed reproduces bit-for-bit across platforms and runs; the
// standard <random> distributions are implementation-defined and unsuitable
// for recorded seeds.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Unbiased draw in [0, n). Rejection sampling, so the result depends only
    // on the stream, never on platform integer quirks.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1), 53 mantissa bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Stable seed derivation for folds, sub-corpora and similar sub-streams.
// Changing this function invalidates every recorded seed, so don't.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    Rng rng(base ^ (0x632be59bd9b4e019ull + 0x9e3779b97f4a7c15ull * salt));
    return rng.next();
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace xling
