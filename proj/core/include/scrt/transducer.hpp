#pragma once

#include <span>
#include <vector>

#include "scrt/matrix.hpp"

namespace scrt {

inline constexpr std::size_t kEmbedDim = 256;
inline constexpr std::size_t kPredHidden = 320;
inline constexpr std::size_t kJointDim = 640;

/// Output space: target tokens 0..size-1 plus a trailing blank class.
struct Vocab {
  std::size_t size = 1024;

  std::size_t blank_id() const { return size; }
  std::size_t num_classes() const { return size + 1; }
  /// Embedding row used before the first token; the table has size+1 rows.
  std::size_t sos_row() const { return size; }
};

struct PredictorWeights {
  Matrix embedding;          // (vocab+1) x 256, last row = start-of-sequence
  Matrix lstm_wx, lstm_wh;   // 1280 x 256, 1280 x 320 (gate order i, f, g, o)
  Matrix lstm_b;             // 1 x 1280
  Matrix proj_w, proj_b;     // 640 x 320, 1 x 640
};

struct PredictorState {
  std::vector<float> h, c;  // 320 each
};

/// Single-layer LSTM label predictor with a 640-wide output projection.
class Predictor {
 public:
  Predictor(const PredictorWeights& w, Vocab vocab);

  /// State after consuming only the start-of-sequence marker (empty prefix).
  PredictorState start() const;
  /// Consume one target token (0..vocab-1).
  void advance(PredictorState& state, int token) const;
  /// 640-dim output for the current state.
  std::vector<float> output(const PredictorState& state) const;

  /// Convenience: run SOS + all prefix tokens. Returns (output, state).
  std::pair<std::vector<float>, PredictorState> forward(std::span<const int> prefix) const;

  const Vocab& vocab() const { return vocab_; }

 private:
  void step(PredictorState& state, std::size_t embedding_row) const;

  const PredictorWeights* w_;
  Vocab vocab_;
};

struct JoinerWeights {
  Matrix enc_proj_w, enc_proj_b;  // 640 x d, 1 x 640
  Matrix out_w, out_b;            // (vocab+1) x 640, 1 x (vocab+1)
};

/// Combines one encoder frame and one predictor output into a log
/// distribution over vocab+1 classes: log_softmax(W * tanh(f + g) + b).
class Joiner {
 public:
  Joiner(const JoinerWeights& w, Vocab vocab);

  /// Map a d-dim encoder row into the 640-dim joint space.
  std::vector<float> project_encoder(std::span<const float> encoder_row) const;
  /// f and g are 640-dim; the result is a log distribution (vocab+1).
  std::vector<float> join(std::span<const float> f, std::span<const float> g) const;

  const Vocab& vocab() const { return vocab_; }

 private:
  const JoinerWeights* w_;
  Vocab vocab_;
};

/// Per-node log distributions of a transduction lattice, plus the DP tables
/// rnnt_loss fills in. Node (t, u) covers t consumed frames and u emitted
/// tokens; distributions exist for t in [0, T). Label transitions remain
/// available at t == T and are scored with the final frame's distribution,
/// so every interleaving of T blanks and U labels is a valid path
/// (C(T+U, U) of them).
struct RnntLattice {
  std::size_t frames = 0;      // T >= 1
  std::size_t target_len = 0;  // U
  std::size_t classes = 0;     // vocab + 1; blank is the last class

  std::vector<double> log_probs;  // T * (U+1) * classes
  std::vector<double> alpha;      // (T+1) * (U+1), filled by rnnt_loss
  std::vector<double> beta;       // (T+1) * (U+1), filled by rnnt_loss

  double& lp(std::size_t t, std::size_t u, std::size_t k) {
    return log_probs[(t * (target_len + 1) + u) * classes + k];
  }
  double lp(std::size_t t, std::size_t u, std::size_t k) const {
    return log_probs[(t * (target_len + 1) + u) * classes + k];
  }
  std::size_t node(std::size_t t, std::size_t u) const { return t * (target_len + 1) + u; }
  void validate(std::span<const int> targets) const;
};

/// Evaluate joiner(encoder_t, predictor_u) for every lattice node.
RnntLattice make_rnnt_lattice(const Matrix& encoder_out, const Predictor& predictor,
                              const Joiner& joiner, std::span<const int> targets);

struct RnntLoss {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d log_probs, same layout as lattice.log_probs
};

/// Negative log marginal over all monotonic alignments, forward DP in log
/// space; the gradient comes from the alpha/beta tables (entries of
/// unreachable nodes are exactly 0). Fills lattice.alpha / lattice.beta.
RnntLoss rnnt_loss(RnntLattice& lattice, std::span<const int> targets);

}  // namespace scrt
