#pragma once

#include <cstdint>
#include <random>

namespace echosim {

// Engine used everywhere simulation state needs randomness. The engine's
// output sequence is fixed by the standard; the distributions below are
// ours so results do not depend on the standard library vendor.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for the k-th sub-stream (episode, worker, ...) of a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) {
  return k == 0 ? base : splitmix64(base ^ splitmix64(k));
}

// Uniform in [0, 1) with 53 bits of mantissa.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace echosim
