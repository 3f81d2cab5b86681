#pragma once

#include <cstdint>

namespace tailrisk::rng {

// Counter-based uniform random numbers.
//
// Every draw is a pure function of (seed, row, col): there is no stream state
// to advance, so work can be split across threads in any way whatsoever and
// the numbers a given (row, col) slot receives never change.  Column 0 is
// reserved for the per-row mixing uniform U; columns 1..n feed the per
// coordinate uniforms V_i.
//
// The generator is the SplitMix64 finalizer applied after each key injection
// (two full avalanche rounds between row and col), which is plenty of mixing
// for Monte Carlo purposes while staying branch-free and fast.

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t hash3(std::uint64_t seed, std::uint64_t row, std::uint64_t col) {
    std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ULL);
    h = mix64(h ^ (row * 0xC2B2AE3D27D4EB4FULL + 0x165667B19E3779F9ULL));
    h = mix64(h ^ (col * 0x9E3779B97F4A7C15ULL + 0x27D4EB2F165667C5ULL));
    return h;
}

// Uniform draw in the open interval (0,1): 53 high bits plus a half-ulp
// offset, so 0 and 1 are never returned and quantile(u) is always defined.
inline double uniform01(std::uint64_t seed, std::uint64_t row, std::uint64_t col) {
    return static_cast<double>((hash3(seed, row, col) >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace tailrisk::rng
