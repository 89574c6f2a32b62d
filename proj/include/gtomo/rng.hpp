#pragma once

#include <cstdint>
#include <random>

namespace gtomo {

/// All randomness goes through mt19937_64. Independent streams (one per angle,
/// per seed replicate, ...) get their own engine seeded by derive_seed.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer applied to seed ^ f(stream); well mixed, so nearby
/// (seed, stream) pairs give unrelated engines.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace gtomo
