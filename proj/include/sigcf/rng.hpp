#pragma once

// Counter-based Gaussian streams. Every normal draw is a pure function of
// (seed, path, step, component), so parallel and serial runs, and runs with
// different thread counts, sample bitwise-identical increments.

#include <cmath>
#include <cstdint>

namespace sigcf {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_key(std::uint64_t seed, std::uint64_t path, std::uint64_t step, std::uint64_t slot) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ path);
    h = splitmix64(h ^ step);
    h = splitmix64(h ^ slot);
    return h;
}

// uniform in (0, 1]
inline double u01(std::uint64_t h) {
    return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

// standard normal via Box-Muller (cosine branch only, one draw per key)
inline double normal_at(std::uint64_t seed, std::uint64_t path, std::uint64_t step, std::uint64_t component) {
    const double u1 = u01(mix_key(seed, path, step, 2 * component));
    const double u2 = u01(mix_key(seed, path, step, 2 * component + 1));
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
}

// Per-path view with the (seed, path) key fixed.
struct GaussianStream {
    std::uint64_t seed = 0;
    std::uint64_t path = 0;
    double normal(std::uint64_t step, std::uint64_t component) const {
        return normal_at(seed, path, step, component);
    }
};

}  // namespace sigcf
