#ifndef SPLITREE_RNG_HPP
#define SPLITREE_RNG_HPP

#include <cstdint>
#include <random>

namespace splitree {

using Rng = std::mt19937_64;

// splitmix64 finalizer (Stafford mix13 constants).
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Portable replication-seed derivation: pure mixing of the three inputs,
// so experiment manifests reproduce across machines.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t n,
                                    std::uint64_t replication_index) {
    std::uint64_t h = mix64(base_seed);
    h = mix64(h ^ mix64(n ^ 0x71c9b37ad42d1fd5ULL));
    h = mix64(h ^ mix64(replication_index ^ 0x2545f4914f6cdd1dULL));
    return h;
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

} // namespace splitree

#endif
