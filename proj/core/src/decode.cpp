#include "scrt/decode.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "scrt/errors.hpp"

namespace scrt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

struct ModelScorer::Node {
  PredictorState pred;
  std::vector<float> out;  // projected predictor output for this prefix
};

ModelScorer::ModelScorer(const Matrix& encoder_out, const Predictor& predictor,
                         const Joiner& joiner)
    : predictor_(&predictor), joiner_(&joiner) {
  frames_.reserve(encoder_out.rows());
  for (std::size_t t = 0; t < encoder_out.rows(); ++t) {
    frames_.push_back(joiner.project_encoder(encoder_out.row_span(t)));
  }
}

std::size_t ModelScorer::num_classes() const { return predictor_->vocab().num_classes(); }

TransducerScorer::State ModelScorer::start() const {
  auto node = std::make_shared<Node>();
  node->pred = predictor_->start();
  node->out = predictor_->output(node->pred);
  return node;
}

TransducerScorer::State ModelScorer::advance(const State& state, int token) const {
  const auto* cur = static_cast<const Node*>(state.get());
  auto node = std::make_shared<Node>();
  node->pred = cur->pred;
  predictor_->advance(node->pred, token);
  node->out = predictor_->output(node->pred);
  return node;
}

std::vector<double> ModelScorer::log_dist(std::size_t frame, const State& state) const {
  const auto* cur = static_cast<const Node*>(state.get());
  const std::vector<float> d = joiner_->join(frames_.at(frame), cur->out);
  return std::vector<double>(d.begin(), d.end());
}

std::vector<int> greedy_decode(const TransducerScorer& scorer, std::size_t max_symbols_per_frame) {
  if (max_symbols_per_frame == 0) {
    throw ConfigError("greedy_decode: max_symbols_per_frame must be positive");
  }
  const std::size_t blank = scorer.num_classes() - 1;
  TransducerScorer::State state = scorer.start();
  std::vector<int> tokens;
  for (std::size_t t = 0; t < scorer.num_frames(); ++t) {
    for (std::size_t emitted = 0; emitted < max_symbols_per_frame; ++emitted) {
      const std::vector<double> dist = scorer.log_dist(t, state);
      std::size_t best = 0;
      for (std::size_t k = 1; k < dist.size(); ++k) {
        if (dist[k] > dist[best]) {
          best = k;
        }
      }
      if (best == blank) {
        break;
      }
      tokens.push_back(static_cast<int>(best));
      state = scorer.advance(state, static_cast<int>(best));
    }
  }
  return tokens;
}

StreamingGreedyDecoder::StreamingGreedyDecoder(const Predictor& predictor, const Joiner& joiner,
                                               std::size_t max_symbols_per_frame)
    : predictor_(&predictor), joiner_(&joiner), max_symbols_(max_symbols_per_frame) {
  if (max_symbols_ == 0) {
    throw ConfigError("StreamingGreedyDecoder: max_symbols_per_frame must be positive");
  }
  state_ = predictor_->start();
  pred_out_ = predictor_->output(state_);
}

std::vector<int> StreamingGreedyDecoder::feed(std::span<const float> encoder_row) {
  const std::vector<float> f = joiner_->project_encoder(encoder_row);
  const std::size_t blank = predictor_->vocab().blank_id();
  std::vector<int> emitted;
  for (std::size_t n = 0; n < max_symbols_; ++n) {
    const std::vector<float> dist = joiner_->join(f, pred_out_);
    std::size_t best = 0;
    for (std::size_t k = 1; k < dist.size(); ++k) {
      if (dist[k] > dist[best]) {
        best = k;
      }
    }
    if (best == blank) {
      break;
    }
    emitted.push_back(static_cast<int>(best));
    tokens_.push_back(static_cast<int>(best));
    predictor_->advance(state_, static_cast<int>(best));
    pred_out_ = predictor_->output(state_);
  }
  return emitted;
}

namespace {

// (prefix, frame index); map order gives the lexicographic part of ties.
using BeamKey = std::pair<std::vector<int>, std::size_t>;

struct BeamHyp {
  double score = kNegInf;
  double lm_score = 0.0;
  TransducerScorer::State state;
  std::size_t frame_symbols = 0;
};

using BeamMap = std::map<BeamKey, BeamHyp>;

// Tie order: lower frame index first (a token transition outranks blank,
// matching greedy's argmax over class ids), then token sequence.
bool beats(const BeamMap::value_type& a, const BeamMap::value_type& b) {
  if (a.second.score != b.second.score) return a.second.score > b.second.score;
  if (a.first.second != b.first.second) return a.first.second < b.first.second;
  return a.first.first < b.first.first;
}

void merge(BeamMap& beam, BeamKey key, const BeamHyp& hyp) {
  auto [it, inserted] = beam.emplace(std::move(key), hyp);
  if (!inserted) {
    assert(it->second.lm_score == hyp.lm_score);
    it->second.score = log_add(it->second.score, hyp.score);
    it->second.frame_symbols = std::min(it->second.frame_symbols, hyp.frame_symbols);
  }
}

void prune_to(BeamMap& beam, std::size_t keep) {
  while (beam.size() > keep) {
    auto worst = beam.begin();
    for (auto it = std::next(beam.begin()); it != beam.end(); ++it) {
      if (!beats(*it, *worst)) {
        worst = it;
      }
    }
    beam.erase(worst);
  }
}

}  // namespace

std::vector<DecodeHyp> beam_decode(const TransducerScorer& scorer, std::size_t beam_size,
                                   std::size_t max_symbols_per_frame, const LmInterface* lm,
                                   double lambda) {
  if (beam_size == 0) {
    throw ConfigError("beam_decode: beam_size must be positive");
  }
  if (max_symbols_per_frame == 0) {
    throw ConfigError("beam_decode: max_symbols_per_frame must be positive");
  }
  if (lambda < 0.0) {
    throw ConfigError("beam_decode: lambda must be non-negative");
  }
  const std::size_t num_frames = scorer.num_frames();
  const std::size_t blank = scorer.num_classes() - 1;
  const bool fuse = lm != nullptr && lambda > 0.0;

  BeamMap beam;
  merge(beam, BeamKey{{}, 0}, BeamHyp{.score = 0.0, .lm_score = 0.0, .state = scorer.start()});

  // Each step every live hypothesis consumes one transition, and a lineage
  // makes at most max_symbols_per_frame + 1 transitions per frame, so every
  // survivor reaches the terminal frame index within the loop bound.
  const std::size_t max_steps = num_frames * (max_symbols_per_frame + 1);
  for (std::size_t step = 0; step < max_steps; ++step) {
    bool live = false;
    for (const auto& entry : beam) {
      if (entry.first.second < num_frames) {
        live = true;
        break;
      }
    }
    if (!live) {
      break;
    }
    BeamMap next;
    for (const auto& [key, hyp] : beam) {
      const std::vector<int>& tokens = key.first;
      const std::size_t t = key.second;
      if (t == num_frames) {
        merge(next, key, hyp);
        continue;
      }
      const std::vector<double> dist = scorer.log_dist(t, hyp.state);

      BeamHyp after_blank = hyp;
      after_blank.score += dist[blank];
      after_blank.frame_symbols = 0;
      merge(next, BeamKey{tokens, t + 1}, after_blank);

      if (hyp.frame_symbols >= max_symbols_per_frame) {
        continue;
      }
      std::vector<double> fused(blank);
      for (std::size_t k = 0; k < blank; ++k) {
        fused[k] = dist[k];
        if (fuse) {
          fused[k] += lambda * lm->score(tokens, static_cast<int>(k));
        }
      }
      // Only the strongest few token transitions can survive the prune.
      std::vector<std::size_t> order(blank);
      for (std::size_t k = 0; k < blank; ++k) {
        order[k] = k;
      }
      const std::size_t expand = std::min(beam_size + 1, blank);
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(expand),
                        order.end(), [&](std::size_t a, std::size_t b) {
                          if (fused[a] != fused[b]) return fused[a] > fused[b];
                          return a < b;
                        });
      for (std::size_t i = 0; i < expand; ++i) {
        const std::size_t k = order[i];
        BeamHyp ext;
        ext.score = hyp.score + fused[k];
        ext.lm_score = hyp.lm_score + (fuse ? lm->score(tokens, static_cast<int>(k)) : 0.0);
        ext.state = scorer.advance(hyp.state, static_cast<int>(k));
        ext.frame_symbols = hyp.frame_symbols + 1;
        std::vector<int> ext_tokens = tokens;
        ext_tokens.push_back(static_cast<int>(k));
        merge(next, BeamKey{std::move(ext_tokens), t}, ext);
      }
    }
    prune_to(next, beam_size);
    beam = std::move(next);
  }

  std::vector<DecodeHyp> out;
  out.reserve(beam.size());
  for (const auto& [key, hyp] : beam) {
    assert(key.second == num_frames);
    DecodeHyp d;
    d.tokens = key.first;
    d.score = hyp.score;
    d.lm_score = hyp.lm_score;
    d.acoustic = hyp.score - lambda * hyp.lm_score;
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const DecodeHyp& a, const DecodeHyp& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.tokens < b.tokens;
  });
  return out;
}

std::vector<int> greedy_decode(const Matrix& encoder_out, const Predictor& predictor,
                               const Joiner& joiner, std::size_t max_symbols_per_frame) {
  ModelScorer scorer(encoder_out, predictor, joiner);
  return greedy_decode(scorer, max_symbols_per_frame);
}

std::vector<DecodeHyp> beam_decode(const Matrix& encoder_out, const Predictor& predictor,
                                   const Joiner& joiner, std::size_t beam_size,
                                   std::size_t max_symbols_per_frame, const LmInterface* lm,
                                   double lambda) {
  ModelScorer scorer(encoder_out, predictor, joiner);
  return beam_decode(scorer, beam_size, max_symbols_per_frame, lm, lambda);
}

}  // namespace scrt
