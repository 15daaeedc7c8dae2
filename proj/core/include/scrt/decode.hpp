#pragma once

#include <memory>
#include <span>
#include <vector>

#include "scrt/lm.hpp"
#include "scrt/matrix.hpp"
#include "scrt/transducer.hpp"

namespace scrt {

/// Frame-conditioned token distribution used by the decoders. The last class
/// index (num_classes() - 1) is blank. States are immutable and shared, so a
/// hypothesis can be advanced without copying its ancestors.
class TransducerScorer {
 public:
  using State = std::shared_ptr<const void>;

  virtual ~TransducerScorer() = default;
  virtual std::size_t num_frames() const = 0;
  virtual std::size_t num_classes() const = 0;
  virtual State start() const = 0;
  virtual State advance(const State& state, int token) const = 0;
  virtual std::vector<double> log_dist(std::size_t frame, const State& state) const = 0;
};

/// Scores with the real predictor and joiner over a finished encoder output.
/// Encoder rows are projected once up front; each state caches the projected
/// predictor output for its prefix.
class ModelScorer final : public TransducerScorer {
 public:
  ModelScorer(const Matrix& encoder_out, const Predictor& predictor, const Joiner& joiner);

  std::size_t num_frames() const override { return frames_.size(); }
  std::size_t num_classes() const override;
  State start() const override;
  State advance(const State& state, int token) const override;
  std::vector<double> log_dist(std::size_t frame, const State& state) const override;

 private:
  struct Node;
  const Predictor* predictor_;
  const Joiner* joiner_;
  std::vector<std::vector<float>> frames_;
};

struct DecodeHyp {
  std::vector<int> tokens;
  double score = 0.0;     // acoustic + lambda * lm_score
  double lm_score = 0.0;  // sum of fused LM log probabilities
  double acoustic = 0.0;  // score with the fusion term removed
};

/// Per frame, repeatedly takes the argmax class (lowest id on ties), emitting
/// tokens until blank wins or max_symbols_per_frame tokens have been emitted.
std::vector<int> greedy_decode(const TransducerScorer& scorer, std::size_t max_symbols_per_frame);

/// Greedy decoding over encoder frames as they arrive. Feeding rows one at a
/// time yields exactly the tokens of greedy_decode over the full matrix.
class StreamingGreedyDecoder {
 public:
  StreamingGreedyDecoder(const Predictor& predictor, const Joiner& joiner,
                         std::size_t max_symbols_per_frame);

  /// Consumes one encoder frame, returns the tokens it emitted.
  std::vector<int> feed(std::span<const float> encoder_row);
  const std::vector<int>& tokens() const { return tokens_; }

 private:
  const Predictor* predictor_;
  const Joiner* joiner_;
  std::size_t max_symbols_;
  PredictorState state_;
  std::vector<float> pred_out_;
  std::vector<int> tokens_;
};

/// Step-synchronous prefix-merged beam search with optional shallow LM
/// fusion. A hypothesis is (token prefix, frame index); every step each
/// live hypothesis spends one transition, either blank (advances its frame
/// index) or a token (appends, bounded by max_symbols_per_frame tokens per
/// frame), and the pool is pruned to beam_size by score. Hypotheses that
/// land on the same (prefix, frame) pair merge by log-sum-exp. The fused LM
/// term lambda * log p_lm(token | prefix) is added on token transitions
/// only; blank is never fused. Ties break deterministically toward lower
/// token ids, so with beam_size 1 and lambda 0 each step reproduces the
/// greedy argmax and the output equals greedy_decode. Returns up to
/// beam_size hypotheses, best first.
std::vector<DecodeHyp> beam_decode(const TransducerScorer& scorer, std::size_t beam_size,
                                   std::size_t max_symbols_per_frame,
                                   const LmInterface* lm = nullptr, double lambda = 0.0);

std::vector<int> greedy_decode(const Matrix& encoder_out, const Predictor& predictor,
                               const Joiner& joiner, std::size_t max_symbols_per_frame);

std::vector<DecodeHyp> beam_decode(const Matrix& encoder_out, const Predictor& predictor,
                                   const Joiner& joiner, std::size_t beam_size,
                                   std::size_t max_symbols_per_frame,
                                   const LmInterface* lm = nullptr, double lambda = 0.0);

}  // namespace scrt
