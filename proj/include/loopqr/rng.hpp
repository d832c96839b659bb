#pragma once

#include <cstdint>

namespace loopqr::rng {

// SplitMix64: tiny, fast, and trivially splittable into reproducible
// parallel streams by seeding each stream with a scrambled (seed, index)
// pair.  Quality is ample for the estimator suite here.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0, 1): 53-bit mantissa, centered so that
  // 0 and 1 are unreachable (log() of a draw is always finite).
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }
};

inline std::uint64_t scramble64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Deterministic per-stream seed; streams are decorrelated by the scrambler.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return scramble64(seed + 0x9E3779B97F4A7C15ull * (stream + 1));
}

}  // namespace loopqr::rng
