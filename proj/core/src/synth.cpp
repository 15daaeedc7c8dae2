#include "scrt/synth.hpp"

#include "scrt/encoder.hpp"

namespace scrt {

Matrix synth_features(std::uint64_t seed, std::size_t frames) {
  return synth_matrix(seed, frames, kMelBins, -1.0f, 1.0f);
}

Matrix synth_matrix(std::uint64_t seed, std::size_t rows, std::size_t cols, float lo, float hi) {
  SplitMix64 rng(seed);
  Matrix m(rows, cols);
  float* p = m.data().data();
  for (std::size_t i = 0; i < rows * cols; ++i) {
    p[i] = static_cast<float>(rng.next_uniform(lo, hi));
  }
  return m;
}

}  // namespace scrt
