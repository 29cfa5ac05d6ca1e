#pragma once

#include <cstdint>
#include <cmath>

namespace gravnet {

// Seedable, portable 64-bit generator (splitmix64). All dataset generation
// flows through this type so runs are reproducible from a single seed.
struct SplitMix64 {
    uint64_t state = 0;

    explicit SplitMix64(uint64_t seed = 0) : state(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Standard normal via Box-Muller (always consumes two uniforms).
    double next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 == 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Uniform integer in [0, n).
    uint64_t next_below(uint64_t n) {
        return next_u64() % n;
    }
};

} // namespace gravnet
