#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gclust {

// Deterministic draws layered over std::mt19937_64.
//
// The standard <random> distributions are implementation-defined, so two
// library versions can emit different streams from the same engine state.
// Everything seeded in this project (parameter init, SBM sampling, silhouette
// subsampling) must be bit-reproducible across platforms, so we map raw engine
// output to doubles ourselves and use Box-Muller for Gaussians.

// Uniform double in [0, 1) with 53 random bits.
inline double next_uniform(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double next_uniform(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * next_uniform(eng);
}

// Standard normal deviate. Consumes exactly two engine outputs per call and
// keeps no state, so draw counts stay easy to reason about in tests.
inline double next_gaussian(std::mt19937_64& eng) {
    const double u1 = 1.0 - next_uniform(eng);  // (0, 1]: keeps log() finite
    const double u2 = next_uniform(eng);
    const double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace gclust
