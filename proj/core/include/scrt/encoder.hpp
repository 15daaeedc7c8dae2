#pragma once

#include <optional>
#include <vector>

#include "scrt/attention.hpp"
#include "scrt/matrix.hpp"

namespace scrt {

inline constexpr float kLayerNormEps = 1e-5f;

// Front-end geometry: two conv stages, each halving time and frequency.
inline constexpr std::size_t kMelBins = 80;
inline constexpr std::size_t kVggStage1Ch = 32;
inline constexpr std::size_t kVggStage2Ch = 64;
inline constexpr std::size_t kVggFreqOut = kMelBins / 4;                 // 20
inline constexpr std::size_t kVggFlatDim = kVggStage2Ch * kVggFreqOut;   // 1280
inline constexpr std::size_t kSubsampleFactor = 4;

enum class EncoderVariant { transformer, conformer };

struct EncoderConfig {
  EncoderVariant variant = EncoderVariant::conformer;
  std::size_t num_layers = 16;
  std::size_t model_dim = 144;
  std::size_t heads = 4;
  std::size_t conv_kernel = 32;
  std::size_t ffn_expansion = 4;
  std::size_t left = 16;    // context sizes in encoder frames
  std::size_t center = 32;
  std::size_t right = 8;
  SuppressionConfig suppression{};
  std::optional<std::size_t> memory_cap;

  /// Published model sizes: conformer S/M (d=144/256), transformer S/M (d=160/288).
  static EncoderConfig preset(EncoderVariant variant, char size);
  void validate() const;
};

struct NormParams {
  Matrix gain, bias;  // 1 x d each
};

struct FfnWeights {
  NormParams norm;
  Matrix w1, b1;  // (e*d) x d, 1 x (e*d)
  Matrix w2, b2;  // d x (e*d), 1 x d
};

struct ConvModuleWeights {
  NormParams norm;
  Matrix pw1_w, pw1_b;  // 2d x d, 1 x 2d
  Matrix dw_w;          // d x kernel
  NormParams dw_norm;
  Matrix pw2_w, pw2_b;  // d x d, 1 x d
};

struct LayerWeights {
  FfnWeights ffn1;
  NormParams attn_norm;
  AttentionWeights attn;
  std::optional<ConvModuleWeights> conv;  // absent in the transformer variant
  FfnWeights ffn2;
  NormParams post_norm;
};

struct VggWeights {
  Matrix c1_w, c1_b;  // 32 x 9,   1 x 32   (3x3 taps: col = in_ch*9 + (dt+1)*3 + (df+1))
  Matrix c2_w, c2_b;  // 32 x 288, 1 x 32
  Matrix c3_w, c3_b;  // 64 x 288, 1 x 64
  Matrix c4_w, c4_b;  // 64 x 576, 1 x 64
};

struct EncoderWeights {
  VggWeights vgg;
  Matrix input_proj_w;  // d x 1280
  Matrix input_proj_b;  // 1 x d
  std::vector<LayerWeights> layers;
};

/// x + 0.5 * (pre-norm -> expand -> swish -> contract), the half-step
/// feed-forward used twice per block.
Matrix feed_forward_module(const Matrix& x, const FfnWeights& w);

/// x + (pre-norm -> pointwise d->2d -> glu -> depthwise conv -> layer norm ->
/// swish -> pointwise d->d). The convolution sees only this segment's rows.
Matrix conv_module(const Matrix& x, const ConvModuleWeights& w);

/// One block: FFN half, attention with memory, conv module (conformer only),
/// FFN half, post layer norm. Advances the layer's memory bank by one slot.
SegmentInput conformer_block(const SegmentInput& seg, MemoryBank& bank, const LayerWeights& w,
                             const EncoderConfig& cfg);

std::vector<MemoryBank> make_banks(const EncoderConfig& cfg);

/// Run all layers over one segment; contexts are carried between layers and
/// stripped at the top. Returns the center rows of the last layer's output.
Matrix encoder_forward_segment(const SegmentInput& seg, std::vector<MemoryBank>& banks,
                               const EncoderWeights& w, const EncoderConfig& cfg);

}  // namespace scrt
