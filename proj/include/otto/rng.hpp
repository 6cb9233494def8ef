#pragma once

#include <cstdint>
#include <random>

namespace otto {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent substream for path i of a run keyed by seed. Streams depend only on
// (seed, i), so parallel scheduling cannot change the draws of any path.
inline std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t i) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(i + 1)));
}

}  // namespace otto
