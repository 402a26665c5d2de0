#pragma once

#include <cmath>
#include <cstdint>

namespace qscomm {

// splitmix64 finalizer: a bijective mix of a 64-bit counter with full avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Map 64 bits to [0, 1) with 53-bit resolution.
inline double unit_from_bits(std::uint64_t v) {
    return static_cast<double>(v >> 11) * 0x1.0p-53;
}

enum class NoiseKind : std::uint64_t { Ai = 0, Mp = 1 };

// Key identifying one Wiener-increment stream. Distinct (kind, species, cell)
// tuples are independent; adding cells never perturbs existing streams.
inline std::uint64_t noise_key(std::uint64_t seed, NoiseKind kind, std::uint64_t species,
                               std::uint64_t cell) {
    std::uint64_t k = mix64(seed ^ 0xD1B54A32D192ED03ull);
    k = mix64(k ^ (static_cast<std::uint64_t>(kind) + 1));
    k = mix64(k ^ (species + 0x9E3779B97F4A7C15ull));
    k = mix64(k ^ (cell + 0x165667B19E3779F9ull));
    return k;
}

// Per-step counters, hoisted out of the cell loop by the integrator.
struct StepSalt {
    std::uint64_t s1, s2;
};

inline StepSalt step_salt(std::uint64_t step) {
    return {mix64(step << 1), mix64((step << 1) | 1ull)};
}

// Standard normal draw fully determined by (key, step). Box-Muller, cosine branch.
inline double gaussian_increment(std::uint64_t key, StepSalt salt) {
    const double u1 = unit_from_bits(mix64(key ^ salt.s1));  // [0,1)
    const double u2 = unit_from_bits(mix64(key ^ salt.s2));
    return std::sqrt(-2.0 * std::log1p(-u1)) *
           std::cos(6.283185307179586476925287 * u2);
}

inline double gaussian_increment(std::uint64_t key, std::uint64_t step) {
    return gaussian_increment(key, step_salt(step));
}

// Uniform integer in [0, n), keyed by an arbitrary counter tuple. Used by the
// bootstrap so resamples are reproducible and order-independent.
inline std::uint64_t uniform_index(std::uint64_t key, std::uint64_t counter, std::uint64_t n) {
    return mix64(key ^ mix64(counter)) % n;
}

}  // namespace qscomm
