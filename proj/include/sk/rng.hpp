#pragma once

#include <cstdint>

namespace sk::rng {

// Counter-based generator: every draw is a pure function of
// (seed, path, step, substream), so paths are reproducible and
// embarrassingly parallel with no shared state.

inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t counter_hash(uint64_t seed, uint64_t path, uint64_t step, uint64_t sub) {
    uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
    h = mix64(h ^ path);
    h = mix64(h ^ (step * 0xda942042e4dd58b5ULL));
    h = mix64(h ^ (sub * 0x2545f4914f6cdd1dULL));
    return h;
}

// Uniform draw in the open interval (0,1).
inline double uniform01(uint64_t seed, uint64_t path, uint64_t step, uint64_t sub) {
    uint64_t bits = counter_hash(seed, path, step, sub);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse normal CDF (Wichura's AS241, ~1e-15 absolute accuracy).
double normal_icdf(double p);

inline double normal(uint64_t seed, uint64_t path, uint64_t step, uint64_t sub) {
    return normal_icdf(uniform01(seed, path, step, sub));
}

}  // namespace sk::rng
