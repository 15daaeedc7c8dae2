#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "scrt/encoder.hpp"
#include "scrt/transducer.hpp"

namespace scrt {

/// Full inference model: encoder plus predictor and joiner.
struct ModelWeights {
  EncoderConfig config;
  Vocab vocab;
  EncoderWeights encoder;
  PredictorWeights predictor;
  JoinerWeights joiner;
};

/// Visits every parameter matrix in a fixed, documented order under a stable
/// dotted name ("layers.3.ffn1.w1", "joiner.out.w", ...). Serialization,
/// initialization, and parameter counting all share this enumeration.
void for_each_parameter(ModelWeights& model,
                        const std::function<void(const std::string&, Matrix&)>& fn);
void for_each_parameter(const ModelWeights& model,
                        const std::function<void(const std::string&, const Matrix&)>& fn);

/// Allocates zero-valued weights with the exact shapes for config and vocab.
ModelWeights make_model(const EncoderConfig& config, const Vocab& vocab = Vocab{});

/// Fills every parameter with uniform(-0.1, 0.1) draws from one seeded
/// stream, in enumeration order.
void init_uniform(ModelWeights& model, std::uint64_t seed);

std::size_t param_count(const ModelWeights& model);
std::size_t param_count(const EncoderConfig& config, const Vocab& vocab = Vocab{});

}  // namespace scrt
