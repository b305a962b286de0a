#pragma once

#include <cstdint>
#include <random>

namespace hemidef {

// splitmix64: cheap stateless mixer used to derive independent seed streams
// (per snapshot, per trial, per policy) from one base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a) {
    return splitmix64(base ^ splitmix64(a + 0x51ED2700215D5EF5ULL));
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(base, a), b);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform in [0, 1). Hand-rolled mapping so results do not depend on the
// standard library's (implementation-defined) distribution internals.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    // modulo bias is < 2^-44 for any n used here; fine for simulation draws
    return rng() % n;
}

} // namespace hemidef
