#include "scrt/vgg.hpp"

#include <algorithm>
#include <cassert>
#include <string>

#include "scrt/errors.hpp"

namespace scrt {

VggStream::VggStream(const EncoderWeights& w, std::size_t model_dim)
    : w_(&w), dim_(model_dim) {
  raw_.width = kMelBins;
  c1_.width = kVggStage1Ch * kMelBins;
  c2_.width = kVggStage1Ch * kMelBins;
  p1_.width = kVggStage1Ch * (kMelBins / 2);
  c3_.width = kVggStage2Ch * (kMelBins / 2);
  c4_.width = kVggStage2Ch * (kMelBins / 2);
}

// 3x3 same-padding convolution over (time, freq) for all output channels of
// one time position, accumulated per element in fixed (in_ch, dt, df) order.
void VggStream::fill_conv(RowBuf& out, const RowBuf& in, std::size_t target,
                          std::size_t in_ch, std::size_t freq, const Matrix& w,
                          const Matrix& b) {
  const std::size_t out_ch = w.rows();
  const int f_count = static_cast<int>(freq);
  for (std::size_t t = out.count(); t < target; ++t) {
    assert(t == 0 || t - 1 >= in.base);  // consumed rows are never re-read
    std::vector<float>& dst = out.push_back_zero();
    const float* srcs[3];
    for (int dt = -1; dt <= 1; ++dt) {
      const std::size_t abs = static_cast<std::size_t>(static_cast<long>(t) + dt);
      const bool valid = (static_cast<long>(t) + dt >= 0) && (abs < in.count());
      srcs[dt + 1] = valid ? in.row(abs) : nullptr;
    }
    for (std::size_t oc = 0; oc < out_ch; ++oc) {
      float* op = dst.data() + oc * freq;
      const float bias = b.at(0, oc);
      for (int f = 0; f < f_count; ++f) op[f] = bias;
      const float* wrow = w.row(oc);
      for (std::size_t ic = 0; ic < in_ch; ++ic) {
        for (int dt = -1; dt <= 1; ++dt) {
          const float* src = srcs[dt + 1];
          if (!src) continue;
          const float* sp = src + ic * freq;
          for (int df = -1; df <= 1; ++df) {
            const float wv = wrow[ic * 9 + (dt + 1) * 3 + (df + 1)];
            const int lo = std::max(0, -df);
            const int hi = f_count - std::max(0, df);
            for (int f = lo; f < hi; ++f) op[f] += wv * sp[f + df];
          }
        }
      }
      for (int f = 0; f < f_count; ++f) op[f] = std::max(op[f], 0.0f);
    }
  }
}

// 2x time and 2x frequency max-pool; a trailing odd time row (finalize only)
// pools over the single available row.
void VggStream::fill_pool(RowBuf& out, const RowBuf& in, std::size_t target, std::size_t ch,
                          std::size_t freq) {
  const std::size_t half = freq / 2;
  for (std::size_t p = out.count(); p < target; ++p) {
    std::vector<float>& dst = out.push_back_zero();
    const float* r0 = in.row(2 * p);
    const float* r1 = (2 * p + 1 < in.count()) ? in.row(2 * p + 1) : nullptr;
    for (std::size_t c = 0; c < ch; ++c) {
      const float* s0 = r0 + c * freq;
      const float* s1 = r1 ? r1 + c * freq : nullptr;
      float* op = dst.data() + c * half;
      for (std::size_t g = 0; g < half; ++g) {
        float m = std::max(s0[2 * g], s0[2 * g + 1]);
        if (s1) m = std::max(m, std::max(s1[2 * g], s1[2 * g + 1]));
        op[g] = m;
      }
    }
  }
}

Matrix VggStream::advance(bool final) {
  fill_conv(c1_, raw_, vgg_conv_ready(raw_.count(), final), 1, kMelBins, w_->vgg.c1_w,
            w_->vgg.c1_b);
  fill_conv(c2_, c1_, vgg_conv_ready(c1_.count(), final), kVggStage1Ch, kMelBins,
            w_->vgg.c2_w, w_->vgg.c2_b);
  fill_pool(p1_, c2_, vgg_pool_ready(c2_.count(), final), kVggStage1Ch, kMelBins);
  fill_conv(c3_, p1_, vgg_conv_ready(p1_.count(), final), kVggStage1Ch, kMelBins / 2,
            w_->vgg.c3_w, w_->vgg.c3_b);
  fill_conv(c4_, c3_, vgg_conv_ready(c3_.count(), final), kVggStage2Ch, kMelBins / 2,
            w_->vgg.c4_w, w_->vgg.c4_b);
  const std::size_t out_target = vgg_pool_ready(c4_.count(), final);

  Matrix emitted(0, dim_);
  Matrix flat(1, kVggFlatDim);
  const std::size_t half = kMelBins / 4;
  for (std::size_t p = out_count_; p < out_target; ++p) {
    const float* r0 = c4_.row(2 * p);
    const float* r1 = (2 * p + 1 < c4_.count()) ? c4_.row(2 * p + 1) : nullptr;
    for (std::size_t c = 0; c < kVggStage2Ch; ++c) {
      const float* s0 = r0 + c * (kMelBins / 2);
      const float* s1 = r1 ? r1 + c * (kMelBins / 2) : nullptr;
      float* op = flat.row(0) + c * half;
      for (std::size_t g = 0; g < half; ++g) {
        float m = std::max(s0[2 * g], s0[2 * g + 1]);
        if (s1) m = std::max(m, std::max(s1[2 * g], s1[2 * g + 1]));
        op[g] = m;
      }
    }
    Matrix proj = linear(flat, w_->input_proj_w, w_->input_proj_b.row_span(0));
    emitted.append_row(proj.row_span(0));
  }
  out_count_ = out_target;

  // keep only the rows later stages may still read
  raw_.drop_below(c1_.count() > 0 ? c1_.count() - 1 : 0);
  c1_.drop_below(c2_.count() > 0 ? c2_.count() - 1 : 0);
  c2_.drop_below(2 * p1_.count());
  p1_.drop_below(c3_.count() > 0 ? c3_.count() - 1 : 0);
  c3_.drop_below(c4_.count() > 0 ? c4_.count() - 1 : 0);
  c4_.drop_below(2 * out_count_);
  return emitted;
}

Matrix VggStream::push(const Matrix& frames) {
  if (finalized_) throw StateError("push after finalize");
  if (frames.rows() > 0 && frames.cols() != kMelBins)
    throw ShapeError("features must have " + std::to_string(kMelBins) + " columns, got " +
                     std::to_string(frames.cols()));
  for (std::size_t i = 0; i < frames.rows(); ++i) {
    std::vector<float>& dst = raw_.push_back_zero();
    std::copy(frames.row(i), frames.row(i) + kMelBins, dst.begin());
  }
  return advance(false);
}

Matrix VggStream::finalize() {
  if (finalized_) throw StateError("finalize called twice");
  finalized_ = true;
  return advance(true);
}

Matrix vgg_subsample(const Matrix& features, const EncoderWeights& w, std::size_t model_dim) {
  if (features.rows() == 0) throw ShapeError("vgg_subsample: empty input");
  VggStream s(w, model_dim);
  Matrix out = s.push(features);
  out.append_rows(s.finalize());
  return out;
}

}  // namespace scrt
