#include "scrt/encoder.hpp"

#include <string>

#include "scrt/errors.hpp"

namespace scrt {

EncoderConfig EncoderConfig::preset(EncoderVariant variant, char size) {
  EncoderConfig cfg;
  cfg.variant = variant;
  if (size == 'S') {
    cfg.model_dim = (variant == EncoderVariant::conformer) ? 144 : 160;
  } else if (size == 'M') {
    cfg.model_dim = (variant == EncoderVariant::conformer) ? 256 : 288;
  } else {
    throw ConfigError(std::string("unknown model size '") + size + "', expected S or M");
  }
  return cfg;
}

void EncoderConfig::validate() const {
  if (num_layers == 0) throw ConfigError("num_layers must be >= 1");
  if (model_dim == 0) throw ConfigError("model_dim must be >= 1");
  if (heads == 0 || model_dim % heads != 0)
    throw ConfigError("model_dim must be divisible by heads");
  if (ffn_expansion == 0) throw ConfigError("ffn_expansion must be >= 1");
  if (variant == EncoderVariant::conformer && conv_kernel == 0)
    throw ConfigError("conv_kernel must be >= 1");
  if (center == 0) throw ConfigError("segment center size must be >= 1");
  if (suppression.gamma < 0.0f) throw ConfigError("suppression gamma must be >= 0");
}

namespace {

Matrix norm(const Matrix& x, const NormParams& p) {
  return layer_norm(x, p.gain.row_span(0), p.bias.row_span(0), kLayerNormEps);
}

}  // namespace

Matrix feed_forward_module(const Matrix& x, const FfnWeights& w) {
  Matrix h = norm(x, w.norm);
  h = linear(h, w.w1, w.b1.row_span(0));
  h = swish(h);
  h = linear(h, w.w2, w.b2.row_span(0));
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.data().size(); ++i)
    out.data()[i] = x.data()[i] + 0.5f * h.data()[i];
  return out;
}

Matrix conv_module(const Matrix& x, const ConvModuleWeights& w) {
  Matrix h = norm(x, w.norm);
  h = linear(h, w.pw1_w, w.pw1_b.row_span(0));
  h = glu(h);
  h = depthwise_conv1d_padded(h, w.dw_w);
  h = norm(h, w.dw_norm);
  h = swish(h);
  h = linear(h, w.pw2_w, w.pw2_b.row_span(0));
  return add(x, h);
}

SegmentInput conformer_block(const SegmentInput& seg, MemoryBank& bank, const LayerWeights& w,
                             const EncoderConfig& cfg) {
  seg.validate();
  const std::size_t l = seg.left.rows();
  const std::size_t c = seg.center.rows();
  const std::size_t r = seg.right.rows();

  Matrix x = concat_rows(seg.left, seg.center, seg.right);
  x = feed_forward_module(x, w.ffn1);

  Matrix pre = norm(x, w.attn_norm);
  SegmentInput attn_in;
  attn_in.left = pre.slice_rows(0, l);
  attn_in.center = pre.slice_rows(l, l + c);
  attn_in.right = pre.slice_rows(l + c, l + c + r);
  SegmentInput attn_out = augmem_layer_forward(attn_in, bank, w.attn, cfg.suppression);
  x = add(x, concat_rows(attn_out.left, attn_out.center, attn_out.right));

  if (cfg.variant == EncoderVariant::conformer) {
    if (!w.conv) throw ConfigError("conformer layer is missing conv module weights");
    x = conv_module(x, *w.conv);
  }
  x = feed_forward_module(x, w.ffn2);
  x = norm(x, w.post_norm);

  SegmentInput out;
  out.left = x.slice_rows(0, l);
  out.center = x.slice_rows(l, l + c);
  out.right = x.slice_rows(l + c, l + c + r);
  return out;
}

std::vector<MemoryBank> make_banks(const EncoderConfig& cfg) {
  cfg.validate();
  return std::vector<MemoryBank>(cfg.num_layers, MemoryBank(cfg.model_dim, cfg.memory_cap));
}

Matrix encoder_forward_segment(const SegmentInput& seg, std::vector<MemoryBank>& banks,
                               const EncoderWeights& w, const EncoderConfig& cfg) {
  if (banks.size() != cfg.num_layers || w.layers.size() != cfg.num_layers)
    throw ShapeError("bank/layer count does not match num_layers");
  SegmentInput cur = seg;
  for (std::size_t i = 0; i < cfg.num_layers; ++i)
    cur = conformer_block(cur, banks[i], w.layers[i], cfg);
  return cur.center;
}

}  // namespace scrt
