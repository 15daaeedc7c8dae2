#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scrt/encoder.hpp"
#include "scrt/vgg.hpp"

namespace scrt {

/// Segment geometry in encoder frames plus the raw-frame timing facts needed
/// to express lookahead in milliseconds.
struct SegmenterConfig {
  std::size_t left = 16;
  std::size_t center = 32;
  std::size_t right = 8;
  std::size_t subsample_factor = 4;
  double frame_shift_ms = 10.0;

  void validate() const;  // center >= 1, subsample_factor >= 1, shift > 0

  bool operator==(const SegmenterConfig&) const = default;
};

/// Algorithmic latency contributed by the right context: right x
/// subsample_factor x frame_shift_ms. Defaults give 320 ms.
double lookahead_ms(const SegmenterConfig& cfg);

/// Drives the layer stack over already-subsampled encoder frames. Segment n
/// (1-based) is processed once n*center + right frames have arrived: its
/// center is frames [(n-1)*center, n*center), its left context the previous
/// `left` frames (shorter for early segments), its right context the `right`
/// frames after the center. finalize() flushes the tail: full-center
/// segments run with whatever right context remains, then the leftover
/// frames form one last short-center segment with no right context. Every
/// frame is emitted as exactly one center row.
class EncoderStream {
 public:
  EncoderStream(const EncoderWeights& weights, const EncoderConfig& config);

  Matrix push(const Matrix& encoder_frames);  // returns newly emitted center rows
  Matrix finalize();

  std::size_t frames_seen() const { return total_seen_; }
  std::size_t segments_emitted() const { return segments_; }
  bool finalized() const { return finalized_; }
  std::vector<std::size_t> memory_slot_counts() const;  // one entry per layer

 private:
  Matrix process_ready(bool at_end);
  Matrix run_segment(std::size_t center_begin, std::size_t center_end, std::size_t right_end);

  const EncoderWeights* weights_;
  EncoderConfig config_;
  std::vector<MemoryBank> banks_;
  Matrix buffer_;           // frames [base_, base_ + buffer_.rows())
  std::size_t base_ = 0;
  std::size_t total_seen_ = 0;
  std::size_t segments_ = 0;
  bool finalized_ = false;
};

/// One streaming utterance: incremental VGG subsampling feeding an
/// EncoderStream. Weights are shared and immutable; all mutable state lives
/// in the session, so any number of sessions can run concurrently.
class StreamSession {
 public:
  StreamSession(const EncoderWeights& weights, const EncoderConfig& config);

  /// Raw log-mel rows in; newly available encoder output rows out.
  Matrix push_features(const Matrix& features);
  Matrix finalize();

  std::size_t raw_frames_pushed() const { return raw_frames_; }
  std::size_t encoder_frames() const { return encoder_.frames_seen(); }
  std::size_t segments_emitted() const { return encoder_.segments_emitted(); }
  bool finalized() const { return encoder_.finalized(); }
  std::vector<std::size_t> memory_slot_counts() const { return encoder_.memory_slot_counts(); }

 private:
  VggStream vgg_;
  EncoderStream encoder_;
  std::size_t raw_frames_ = 0;
};

/// Runs the whole utterance through a fresh session in one push.
Matrix encode_utterance(const Matrix& features, const EncoderWeights& weights,
                        const EncoderConfig& config);

struct SegmentCost {
  std::size_t segment = 0;  // 1-based
  std::size_t key_len = 0;  // attention key rows: memory slots + L + C + R
  std::uint64_t micros = 0;
};

/// Times the layer stack on synthetic full-context segments. Segment n
/// attends over min(n-1, cap) memory slots plus L+C+R frame rows, so the
/// reported key length is constant when the cap is 0, ramps by one per
/// segment when uncapped, and plateaus at cap + L + C + R otherwise.
std::vector<SegmentCost> bench_segment_costs(const EncoderConfig& config,
                                             std::size_t num_segments,
                                             std::optional<std::size_t> memory_cap);

}  // namespace scrt
