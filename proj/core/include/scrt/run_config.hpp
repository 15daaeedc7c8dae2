#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "scrt/encoder.hpp"
#include "scrt/streaming.hpp"

namespace scrt {

struct DecodeOptions {
  std::string mode = "greedy";  // greedy | beam | fusion
  std::size_t beam = 4;
  double lambda = 0.25;
  std::size_t max_symbols_per_frame = 8;

  bool operator==(const DecodeOptions&) const = default;
};

struct RunPaths {
  std::string weights;
  std::string tokens;
  std::string lm_text;

  bool operator==(const RunPaths&) const = default;
};

/// Tool configuration: a model preset plus the streaming and decoding knobs.
/// JSON with a strict schema; unknown keys are rejected, absent keys take
/// the defaults below. parse(serialize(x)) == x.
struct RunConfig {
  std::string arch = "conformer";  // conformer | transformer
  std::string size = "S";          // S | M
  SegmenterConfig segmenter;
  float gamma = 0.5f;
  bool was_enabled = true;
  std::optional<std::size_t> memory_cap;  // absent/null = unbounded
  DecodeOptions decode;
  std::uint64_t seed = 1;
  RunPaths paths;

  static RunConfig parse(const std::string& json_text);
  static RunConfig load(const std::string& path);
  std::string serialize() const;  // pretty JSON with every field explicit
  void save(const std::string& path) const;

  /// Resolves the preset and folds in segmenter geometry, suppression, and
  /// memory cap.
  EncoderConfig encoder_config() const;

  bool operator==(const RunConfig&) const = default;
};

}  // namespace scrt
