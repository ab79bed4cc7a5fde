#pragma once
#include <cstdint>

namespace qtomo {

// splitmix64: tiny deterministic generator. Used wherever reproducible
// randomness is part of the contract (measurement sampling, power-iteration
// start vectors) so outputs do not depend on the platform's <random>.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }
    // uniform in [-1, 1)
    double uniform_pm1() { return 2.0 * uniform01() - 1.0; }
};

} // namespace qtomo
