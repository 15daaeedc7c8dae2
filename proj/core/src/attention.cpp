#include "scrt/attention.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>

#include "scrt/errors.hpp"

namespace scrt {

void SegmentInput::validate() const {
  if (center.rows() == 0) throw ShapeError("segment center must have at least one row");
  const std::size_t d = center.cols();
  if (d == 0) throw ShapeError("segment width must be positive");
  if (left.rows() > 0 && left.cols() != d)
    throw ShapeError("segment left width " + std::to_string(left.cols()) + " != " +
                     std::to_string(d));
  if (right.rows() > 0 && right.cols() != d)
    throw ShapeError("segment right width " + std::to_string(right.cols()) + " != " +
                     std::to_string(d));
}

MemoryBank::MemoryBank(std::size_t dim, std::optional<std::size_t> cap) : dim_(dim), cap_(cap) {}

void MemoryBank::push(std::vector<float> slot) {
  if (slot.size() != dim_)
    throw ShapeError("memory slot width " + std::to_string(slot.size()) + " != " +
                     std::to_string(dim_));
  if (cap_ && *cap_ == 0) return;
  slots_.push_back(std::move(slot));
  if (cap_ && slots_.size() > *cap_) slots_.pop_front();
}

Matrix MemoryBank::as_matrix() const {
  Matrix m(0, dim_);
  for (const auto& s : slots_) m.append_row(s);
  return m;
}

void AttentionWeights::validate(std::size_t dim) const {
  if (heads == 0) throw ConfigError("attention needs at least one head");
  if (dim % heads != 0)
    throw ConfigError("model dim " + std::to_string(dim) + " not divisible by " +
                      std::to_string(heads) + " heads");
  for (const Matrix* w : {&wq, &wk, &wv, &wout})
    if (w->rows() != dim || w->cols() != dim)
      throw ShapeError("attention projection must be " + std::to_string(dim) + "x" +
                       std::to_string(dim));
  if (position_bias.rows() != heads || position_bias.cols() != kNumPositionBuckets)
    throw ShapeError("position bias table must be heads x " +
                     std::to_string(kNumPositionBuckets));
}

std::size_t relative_bucket(long query_pos, long key_pos) {
  long d = key_pos - query_pos;
  d = std::clamp(d, -static_cast<long>(kRelPositionWindow),
                 static_cast<long>(kRelPositionWindow));
  return static_cast<std::size_t>(d + kRelPositionWindow);
}

Matrix build_query(const SegmentInput& seg, const Matrix& wq) {
  seg.validate();
  Matrix rows = concat_rows(seg.left, seg.center, seg.right);
  rows.append_row(mean_pool_rows(seg.center));
  return linear(rows, wq, {});
}

std::pair<Matrix, Matrix> build_key_value(const SegmentInput& seg, const MemoryBank& mem,
                                          const Matrix& wk, const Matrix& wv) {
  seg.validate();
  if (mem.dim() != seg.dim())
    throw ShapeError("memory width " + std::to_string(mem.dim()) + " != segment width " +
                     std::to_string(seg.dim()));
  Matrix rows = mem.as_matrix();
  rows.append_rows(seg.left);
  rows.append_rows(seg.center);
  rows.append_rows(seg.right);
  return {linear(rows, wk, {}), linear(rows, wv, {})};
}

std::vector<float> weak_attention_suppress(std::span<const float> p, float gamma) {
  if (p.empty()) throw ShapeError("weak_attention_suppress: empty row");
  if (gamma < 0.0f) throw ConfigError("suppression gamma must be >= 0");
  const std::size_t n = p.size();
  double mean = 0.0;
  for (float v : p) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (float v : p) {
    const double d = v - mean;
    var += d * d;
  }
  var /= static_cast<double>(n);
  double theta = mean - static_cast<double>(gamma) * std::sqrt(var);
  double pmax = -std::numeric_limits<double>::infinity();
  for (float v : p) pmax = std::max(pmax, static_cast<double>(v));
  // max(p) >= mean >= theta holds exactly; the clamp only guards f64 rounding.
  theta = std::min(theta, pmax);

  double kept = 0.0;
  for (float v : p)
    if (static_cast<double>(v) >= theta) kept += v;
  assert(kept > 0.0);
  std::vector<float> out(n, 0.0f);
  for (std::size_t i = 0; i < n; ++i)
    if (static_cast<double>(p[i]) >= theta) out[i] = static_cast<float>(p[i] / kept);
  return out;
}

std::vector<Matrix> build_head_bias(const AttentionWeights& w, std::size_t mem_rows,
                                    std::size_t left, std::size_t center, std::size_t right) {
  const std::size_t frames = left + center + right;
  const std::size_t q_rows = frames + 1;
  const std::size_t k_rows = mem_rows + frames;
  const long summary_pos = static_cast<long>(left) + (static_cast<long>(center) - 1) / 2;
  std::vector<Matrix> bias;
  bias.reserve(w.heads);
  for (std::size_t h = 0; h < w.heads; ++h) {
    Matrix b(q_rows, k_rows);
    const float* table = w.position_bias.row(h);
    for (std::size_t i = 0; i < q_rows; ++i) {
      const long qpos = (i < frames) ? static_cast<long>(i) : summary_pos;
      float* brow = b.row(i);
      for (std::size_t j = 0; j < k_rows; ++j) {
        const std::size_t bucket =
            (j < mem_rows) ? kMemoryBucket
                           : relative_bucket(qpos, static_cast<long>(j - mem_rows));
        brow[j] = table[bucket];
      }
    }
    bias.push_back(std::move(b));
  }
  return bias;
}

AttendResult attend(const Matrix& q, const Matrix& k, const Matrix& v, std::size_t heads,
                    const Matrix& wout, const SuppressionConfig& sup,
                    const std::vector<Matrix>* head_bias) {
  const std::size_t d = q.cols();
  if (k.cols() != d || v.cols() != d) throw ShapeError("attend: q/k/v widths differ");
  if (k.rows() != v.rows()) throw ShapeError("attend: key/value row counts differ");
  if (k.rows() == 0) throw ShapeError("attend: no key rows");
  if (heads == 0 || d % heads != 0) throw ConfigError("attend: bad head count");
  if (head_bias && head_bias->size() != heads)
    throw ShapeError("attend: bias count != heads");

  const std::size_t dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Matrix ctx(q.rows(), d);
  AttendResult res;
  res.probs.reserve(heads);

  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t off = h * dh;
    Matrix logits(q.rows(), k.rows());
    for (std::size_t i = 0; i < q.rows(); ++i) {
      const float* qr = q.row(i) + off;
      float* lrow = logits.row(i);
      for (std::size_t j = 0; j < k.rows(); ++j) {
        const float* kr = k.row(j) + off;
        double acc = 0.0;
        for (std::size_t c = 0; c < dh; ++c)
          acc += static_cast<double>(qr[c]) * static_cast<double>(kr[c]);
        double l = acc * scale;
        if (head_bias) l += static_cast<double>((*head_bias)[h].at(i, j));
        lrow[j] = static_cast<float>(l);
      }
    }
    Matrix probs = softmax_rows(logits);
    if (sup.enabled) {
      for (std::size_t i = 0; i < probs.rows(); ++i) {
        std::vector<float> s = weak_attention_suppress(probs.row_span(i), sup.gamma);
        std::copy(s.begin(), s.end(), probs.row(i));
      }
    }
    for (std::size_t i = 0; i < q.rows(); ++i) {
      const float* prow = probs.row(i);
      float* crow = ctx.row(i) + off;
      for (std::size_t c = 0; c < dh; ++c) {
        double acc = 0.0;
        for (std::size_t j = 0; j < k.rows(); ++j)
          acc += static_cast<double>(prow[j]) * static_cast<double>(v.at(j, off + c));
        crow[c] = static_cast<float>(acc);
      }
    }
    res.probs.push_back(std::move(probs));
  }
  res.out = linear(ctx, wout, {});
  return res;
}

void update_memory(MemoryBank& mem, const std::vector<std::vector<float>>& summary_probs,
                   const Matrix& v, std::size_t heads, const Matrix& wout) {
  const std::size_t d = v.cols();
  if (summary_probs.size() != heads) throw ShapeError("update_memory: probs count != heads");
  if (heads == 0 || d % heads != 0) throw ConfigError("update_memory: bad head count");
  const std::size_t dh = d / heads;
  Matrix ctx(1, d);
  for (std::size_t h = 0; h < heads; ++h) {
    const auto& prow = summary_probs[h];
    if (prow.size() != v.rows()) throw ShapeError("update_memory: probs length != value rows");
    const std::size_t off = h * dh;
    for (std::size_t c = 0; c < dh; ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j < v.rows(); ++j)
        acc += static_cast<double>(prow[j]) * static_cast<double>(v.at(j, off + c));
      ctx.at(0, off + c) = static_cast<float>(acc);
    }
  }
  Matrix slot = linear(ctx, wout, {});
  mem.push(std::vector<float>(slot.row(0), slot.row(0) + d));
}

SegmentInput augmem_layer_forward(const SegmentInput& seg, MemoryBank& mem,
                                  const AttentionWeights& w, const SuppressionConfig& sup) {
  seg.validate();
  w.validate(seg.dim());
  const std::size_t l = seg.left.rows();
  const std::size_t c = seg.center.rows();
  const std::size_t r = seg.right.rows();

  Matrix q = build_query(seg, w.wq);
  auto [k, v] = build_key_value(seg, mem, w.wk, w.wv);
  std::vector<Matrix> bias = build_head_bias(w, mem.size(), l, c, r);
  AttendResult res = attend(q, k, v, w.heads, w.wout, sup, &bias);

  std::vector<std::vector<float>> summary(w.heads);
  for (std::size_t h = 0; h < w.heads; ++h) {
    const Matrix& p = res.probs[h];
    const float* last = p.row(p.rows() - 1);
    summary[h].assign(last, last + p.cols());
  }
  update_memory(mem, summary, v, w.heads, w.wout);

  SegmentInput out;
  out.left = res.out.slice_rows(0, l);
  out.center = res.out.slice_rows(l, l + c);
  out.right = res.out.slice_rows(l + c, l + c + r);
  return out;
}

}  // namespace scrt
