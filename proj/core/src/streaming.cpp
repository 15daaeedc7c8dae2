#include "scrt/streaming.hpp"

#include <cassert>
#include <chrono>

#include "scrt/errors.hpp"
#include "scrt/model.hpp"
#include "scrt/synth.hpp"

namespace scrt {

void SegmenterConfig::validate() const {
  if (center == 0) {
    throw ConfigError("segmenter: center must be >= 1");
  }
  if (subsample_factor == 0) {
    throw ConfigError("segmenter: subsample_factor must be >= 1");
  }
  if (!(frame_shift_ms > 0.0)) {
    throw ConfigError("segmenter: frame_shift_ms must be positive");
  }
}

double lookahead_ms(const SegmenterConfig& cfg) {
  cfg.validate();
  return static_cast<double>(cfg.right) * static_cast<double>(cfg.subsample_factor) *
         cfg.frame_shift_ms;
}

EncoderStream::EncoderStream(const EncoderWeights& weights, const EncoderConfig& config)
    : weights_(&weights), config_(config), buffer_(0, config.model_dim) {
  config_.validate();
  if (weights.layers.size() != config_.num_layers) {
    throw ShapeError("EncoderStream: weight stack does not match configured layer count");
  }
  banks_ = make_banks(config_);
}

Matrix EncoderStream::push(const Matrix& encoder_frames) {
  if (finalized_) {
    throw StateError("EncoderStream: push after finalize");
  }
  if (encoder_frames.rows() > 0) {
    if (encoder_frames.cols() != config_.model_dim) {
      throw ShapeError("EncoderStream: frame width does not match model_dim");
    }
    buffer_.append_rows(encoder_frames);
    total_seen_ += encoder_frames.rows();
  }
  return process_ready(false);
}

Matrix EncoderStream::finalize() {
  if (finalized_) {
    throw StateError("EncoderStream: finalize called twice");
  }
  finalized_ = true;
  return process_ready(true);
}

std::vector<std::size_t> EncoderStream::memory_slot_counts() const {
  std::vector<std::size_t> counts;
  counts.reserve(banks_.size());
  for (const MemoryBank& b : banks_) {
    counts.push_back(b.size());
  }
  return counts;
}

Matrix EncoderStream::process_ready(bool at_end) {
  const std::size_t c = config_.center;
  const std::size_t r = config_.right;
  Matrix out(0, config_.model_dim);
  while (total_seen_ >= (segments_ + 1) * c + r) {
    const std::size_t begin = segments_ * c;
    out.append_rows(run_segment(begin, begin + c, begin + c + r));
  }
  if (at_end) {
    // Tail: full centers first, with whatever right context is left, then
    // one short-center segment for the remainder.
    while (total_seen_ - segments_ * c >= c) {
      const std::size_t begin = segments_ * c;
      out.append_rows(run_segment(begin, begin + c, std::min(total_seen_, begin + c + r)));
    }
    if (total_seen_ > segments_ * c) {
      out.append_rows(run_segment(segments_ * c, total_seen_, total_seen_));
    }
  }
  return out;
}

Matrix EncoderStream::run_segment(std::size_t center_begin, std::size_t center_end,
                                  std::size_t right_end) {
  const std::size_t left_begin = center_begin - std::min(config_.left, center_begin);
  assert(left_begin >= base_ && right_end <= base_ + buffer_.rows());

  SegmentInput seg;
  seg.left = buffer_.slice_rows(left_begin - base_, center_begin - base_);
  seg.center = buffer_.slice_rows(center_begin - base_, center_end - base_);
  seg.right = buffer_.slice_rows(center_end - base_, right_end - base_);
  Matrix emitted = encoder_forward_segment(seg, banks_, *weights_, config_);
  segments_ += 1;

  const std::size_t keep_from = center_end - std::min(config_.left, center_end);
  if (keep_from > base_) {
    buffer_ = buffer_.slice_rows(keep_from - base_, buffer_.rows());
    base_ = keep_from;
  }
  return emitted;
}

StreamSession::StreamSession(const EncoderWeights& weights, const EncoderConfig& config)
    : vgg_(weights, config.model_dim), encoder_(weights, config) {}

Matrix StreamSession::push_features(const Matrix& features) {
  raw_frames_ += features.rows();
  return encoder_.push(vgg_.push(features));
}

Matrix StreamSession::finalize() {
  Matrix out = encoder_.push(vgg_.finalize());
  out.append_rows(encoder_.finalize());
  return out;
}

Matrix encode_utterance(const Matrix& features, const EncoderWeights& weights,
                        const EncoderConfig& config) {
  StreamSession session(weights, config);
  Matrix out = session.push_features(features);
  out.append_rows(session.finalize());
  return out;
}

std::vector<SegmentCost> bench_segment_costs(const EncoderConfig& config,
                                             std::size_t num_segments,
                                             std::optional<std::size_t> memory_cap) {
  if (num_segments == 0) {
    throw ConfigError("bench_segment_costs: num_segments must be >= 1");
  }
  EncoderConfig cfg = config;
  cfg.memory_cap = memory_cap;
  cfg.validate();

  ModelWeights model = make_model(cfg);
  init_uniform(model, 0x5eedu);
  std::vector<MemoryBank> banks = make_banks(cfg);

  // Every benchmark segment carries full left/center/right context so the
  // only cost variable across segments is the memory-bank size.
  SplitMix64 rng(1u);
  auto next_rows = [&](std::size_t n) {
    Matrix m(n, cfg.model_dim);
    float* p = m.data().data();
    for (std::size_t i = 0; i < m.size(); ++i) {
      p[i] = rng.next_uniform(-1.0f, 1.0f);
    }
    return m;
  };

  Matrix left = next_rows(cfg.left);
  std::vector<SegmentCost> report;
  report.reserve(num_segments);
  for (std::size_t n = 1; n <= num_segments; ++n) {
    SegmentInput seg;
    seg.left = left;
    seg.center = next_rows(cfg.center);
    seg.right = next_rows(cfg.right);

    SegmentCost cost;
    cost.segment = n;
    cost.key_len = banks.empty() ? cfg.left + cfg.center + cfg.right
                                 : banks[0].size() + cfg.left + cfg.center + cfg.right;
    const auto t0 = std::chrono::steady_clock::now();
    encoder_forward_segment(seg, banks, model.encoder, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    cost.micros = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count());
    report.push_back(cost);

    if (cfg.left > 0) {
      Matrix window = seg.center;
      const std::size_t keep = std::min(cfg.left, window.rows());
      left = window.slice_rows(window.rows() - keep, window.rows());
    }
  }
  return report;
}

}  // namespace scrt
