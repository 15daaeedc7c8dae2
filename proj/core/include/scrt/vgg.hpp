#pragma once

#include <deque>
#include <vector>

#include "scrt/encoder.hpp"
#include "scrt/matrix.hpp"

namespace scrt {

/// Rows of one stage that are computable given `in` input rows. Convolutions
/// need the following row unless the stream has ended; pools need full pairs
/// unless the stream has ended (then a trailing single counts).
constexpr std::size_t vgg_conv_ready(std::size_t in, bool final) {
  return final ? in : (in > 0 ? in - 1 : 0);
}
constexpr std::size_t vgg_pool_ready(std::size_t in, bool final) {
  return final ? (in + 1) / 2 : in / 2;
}

/// Finished-utterance output length: ceil(ceil(t/2)/2), composed from the
/// same stage arithmetic the streaming front-end uses.
constexpr std::size_t vgg_output_length(std::size_t t) {
  const std::size_t c1 = vgg_conv_ready(t, true);
  const std::size_t c2 = vgg_conv_ready(c1, true);
  const std::size_t p1 = vgg_pool_ready(c2, true);
  const std::size_t c3 = vgg_conv_ready(p1, true);
  const std::size_t c4 = vgg_conv_ready(c3, true);
  return vgg_pool_ready(c4, true);
}

/// Output frames that can no longer change while the stream is still open.
constexpr std::size_t vgg_stable_length(std::size_t t) {
  const std::size_t c1 = vgg_conv_ready(t, false);
  const std::size_t c2 = vgg_conv_ready(c1, false);
  const std::size_t p1 = vgg_pool_ready(c2, false);
  const std::size_t c3 = vgg_conv_ready(p1, false);
  const std::size_t c4 = vgg_conv_ready(c3, false);
  return vgg_pool_ready(c4, false);
}

/// Incremental VGG front-end: two stages of two 3x3 convolutions (ReLU after
/// each) and 2x max-pooling in time and frequency, then a linear projection
/// of the flattened 64x20 maps to the model width. Each intermediate row is
/// computed exactly once, so any split of the input into push calls yields
/// bit-identical output frames.
class VggStream {
 public:
  VggStream(const EncoderWeights& w, std::size_t model_dim);

  /// Feed raw frames (n x 80). Returns the newly stable encoder frames (m x d).
  Matrix push(const Matrix& frames);

  /// End of stream: flush edge rows with zero padding, return remaining frames.
  Matrix finalize();

  std::size_t frames_in() const { return raw_.count(); }
  std::size_t frames_out() const { return out_count_; }
  bool finalized() const { return finalized_; }

 private:
  struct RowBuf {
    std::size_t width = 0;
    std::size_t base = 0;  // absolute index of rows.front()
    std::deque<std::vector<float>> rows;

    std::size_t count() const { return base + rows.size(); }
    const float* row(std::size_t abs) const { return rows[abs - base].data(); }
    std::vector<float>& push_back_zero() {
      rows.emplace_back(width, 0.0f);
      return rows.back();
    }
    void drop_below(std::size_t abs) {
      while (base < abs && !rows.empty()) {
        rows.pop_front();
        ++base;
      }
    }
  };

  Matrix advance(bool final);
  void fill_conv(RowBuf& out, const RowBuf& in, std::size_t target, std::size_t in_ch,
                 std::size_t freq, const Matrix& w, const Matrix& b);
  void fill_pool(RowBuf& out, const RowBuf& in, std::size_t target, std::size_t ch,
                 std::size_t freq);

  const EncoderWeights* w_;
  std::size_t dim_;
  RowBuf raw_, c1_, c2_, p1_, c3_, c4_;
  std::size_t out_count_ = 0;
  bool finalized_ = false;
};

/// Whole-utterance convenience wrapper over VggStream. Features must be
/// T x 80 with T >= 1; output is vgg_output_length(T) x d.
Matrix vgg_subsample(const Matrix& features, const EncoderWeights& w, std::size_t model_dim);

}  // namespace scrt
