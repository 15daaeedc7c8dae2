#pragma once

#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "scrt/matrix.hpp"

namespace scrt {

/// One segment of frames entering an attention layer: left context, central
/// body, right context. All parts share the model width; left/right may have
/// zero rows, the center must not.
struct SegmentInput {
  Matrix left;    // L x d
  Matrix center;  // C x d, C >= 1
  Matrix right;   // R x d

  std::size_t dim() const { return center.cols(); }
  std::size_t frame_rows() const { return left.rows() + center.rows() + right.rows(); }
  void validate() const;
};

/// Per-layer bank of summarization slots, oldest first. A cap of n keeps the
/// newest n slots (FIFO eviction); cap 0 disables the bank entirely.
class MemoryBank {
 public:
  explicit MemoryBank(std::size_t dim, std::optional<std::size_t> cap = std::nullopt);

  std::size_t size() const { return slots_.size(); }
  std::size_t dim() const { return dim_; }
  std::optional<std::size_t> cap() const { return cap_; }
  std::span<const float> slot(std::size_t i) const { return slots_[i]; }

  void push(std::vector<float> slot);

  /// All slots stacked as a size() x dim matrix.
  Matrix as_matrix() const;

 private:
  std::size_t dim_;
  std::optional<std::size_t> cap_;
  std::deque<std::vector<float>> slots_;
};

struct SuppressionConfig {
  float gamma = 0.5f;
  bool enabled = true;
};

// Relative-position buckets: signed frame distance clipped to [-16, 16]
// (buckets 0..32) plus one shared bucket for memory slots.
inline constexpr int kRelPositionWindow = 16;
inline constexpr std::size_t kMemoryBucket = 2 * kRelPositionWindow + 1;  // 33
inline constexpr std::size_t kNumPositionBuckets = kMemoryBucket + 1;     // 34

std::size_t relative_bucket(long query_pos, long key_pos);

struct AttentionWeights {
  Matrix wq, wk, wv, wout;  // d x d, applied as x * W^T, no bias
  std::size_t heads = 4;
  Matrix position_bias;     // heads x kNumPositionBuckets

  void validate(std::size_t dim) const;
};

/// Queries for one segment: projected [left; center; right; summary] where
/// the summary row is the mean over the center. Memory never contributes.
Matrix build_query(const SegmentInput& seg, const Matrix& wq);

/// Keys/values over [memory slots; left; center; right], memory rows first.
std::pair<Matrix, Matrix> build_key_value(const SegmentInput& seg, const MemoryBank& mem,
                                          const Matrix& wk, const Matrix& wv);

/// Suppress weakly attended entries of one probability row: drop p_i below
/// mean - gamma * stddev (population), renormalize the survivors. Entries
/// exactly at the threshold survive; the row maximum always survives.
std::vector<float> weak_attention_suppress(std::span<const float> p, float gamma);

/// Additive logit biases per head, one (query rows) x (key rows) matrix each,
/// from the layer's bucket table. Query rows are the L+C+R frames followed by
/// the summary row (positioned at the middle center frame).
std::vector<Matrix> build_head_bias(const AttentionWeights& w, std::size_t mem_rows,
                                    std::size_t left, std::size_t center, std::size_t right);

struct AttendResult {
  Matrix out;                // q_rows x d, after the output projection
  std::vector<Matrix> probs; // per head, q_rows x k_rows, post-suppression
};

/// Multi-head scaled dot-product attention over already-projected Q/K/V with
/// optional per-head logit biases and weak-attention suppression.
AttendResult attend(const Matrix& q, const Matrix& k, const Matrix& v, std::size_t heads,
                    const Matrix& wout, const SuppressionConfig& sup,
                    const std::vector<Matrix>* head_bias = nullptr);

/// Append one slot computed from the summary row's attention: per-head
/// weighted value sums, concatenated and output-projected. The value-side
/// nonlinearity is the identity here (inference form).
void update_memory(MemoryBank& mem, const std::vector<std::vector<float>>& summary_probs,
                   const Matrix& v, std::size_t heads, const Matrix& wout);

/// One full augmented-memory attention layer: build Q/K/V, attend, append the
/// new memory slot, and return the frame rows re-split as a segment. The
/// summary row feeds only the memory bank.
SegmentInput augmem_layer_forward(const SegmentInput& seg, MemoryBank& mem,
                                  const AttentionWeights& w, const SuppressionConfig& sup);

}  // namespace scrt
