#ifndef PHASEALIGN_RNG_HPP
#define PHASEALIGN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "phasealign/common.hpp"

namespace phasealign {

/// SplitMix64 finalizer (Steele, Lea, Flood). Used only for seed mixing.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Per-trial seed derivation: trial_seed(m, t) = mix64(m ^ mix64(t + 1)).
/// Fixed so that re-running an experiment reproduces every trial exactly,
/// and so that trials with different indices get decorrelated streams.
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    return mix64(master_seed ^ mix64(trial_index + 1));
}

/// Deterministic random source. All variate generation is implemented on top
/// of the raw mt19937_64 output so the consumption order is pinned and does
/// not depend on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Two independent standard normals via Box-Muller.
    std::pair<double, double> normal_pair() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log1p(-u1)); // log(1-u1), u1 < 1
        return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
    }

private:
    std::mt19937_64 gen_;
};

} // namespace phasealign

#endif
