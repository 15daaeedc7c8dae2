#pragma once

#include <cstdint>

#include "scrt/matrix.hpp"

namespace scrt {

/// splitmix64: quick, well-distributed 64-bit generator with a one-word
/// state. Used everywhere a seed appears so results are reproducible across
/// platforms without depending on library distribution internals.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  float next_uniform(float lo, float hi) {
    return static_cast<float>(lo + (hi - lo) * next_unit());
  }
};

/// Deterministic stand-in for log-mel input: frames x 80, uniform [-1, 1).
Matrix synth_features(std::uint64_t seed, std::size_t frames);

/// Deterministic dense matrix, uniform [lo, hi).
Matrix synth_matrix(std::uint64_t seed, std::size_t rows, std::size_t cols, float lo, float hi);

}  // namespace scrt
