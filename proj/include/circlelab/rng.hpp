// Deterministic seeding. Per-path seeds are derived from the master seed by
// splitmix64(master ^ (0x9e3779b97f4a7c15 * (index+1))); this rule is part of
// the reproducibility contract, so do not change it casually.
#pragma once

#include <cstdint>
#include <random>

namespace circlelab {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

// xoshiro-free: mt19937_64 everywhere, seeded through splitmix64.
inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t index = 0) {
    return std::mt19937_64(derive_seed(master, index));
}

} // namespace circlelab
