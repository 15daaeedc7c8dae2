#include "scrt/model.hpp"

#include "scrt/synth.hpp"

namespace scrt {

namespace {

void visit_norm(const std::string& prefix, NormParams& n,
                const std::function<void(const std::string&, Matrix&)>& fn) {
  fn(prefix + ".gain", n.gain);
  fn(prefix + ".bias", n.bias);
}

void visit_ffn(const std::string& prefix, FfnWeights& f,
               const std::function<void(const std::string&, Matrix&)>& fn) {
  visit_norm(prefix + ".norm", f.norm, fn);
  fn(prefix + ".w1", f.w1);
  fn(prefix + ".b1", f.b1);
  fn(prefix + ".w2", f.w2);
  fn(prefix + ".b2", f.b2);
}

}  // namespace

void for_each_parameter(ModelWeights& model,
                        const std::function<void(const std::string&, Matrix&)>& fn) {
  VggWeights& v = model.encoder.vgg;
  fn("vgg.conv1.w", v.c1_w);
  fn("vgg.conv1.b", v.c1_b);
  fn("vgg.conv2.w", v.c2_w);
  fn("vgg.conv2.b", v.c2_b);
  fn("vgg.conv3.w", v.c3_w);
  fn("vgg.conv3.b", v.c3_b);
  fn("vgg.conv4.w", v.c4_w);
  fn("vgg.conv4.b", v.c4_b);
  fn("vgg.proj.w", model.encoder.input_proj_w);
  fn("vgg.proj.b", model.encoder.input_proj_b);

  for (std::size_t i = 0; i < model.encoder.layers.size(); ++i) {
    LayerWeights& layer = model.encoder.layers[i];
    const std::string p = "layers." + std::to_string(i) + ".";
    visit_ffn(p + "ffn1", layer.ffn1, fn);
    visit_norm(p + "attn.norm", layer.attn_norm, fn);
    fn(p + "attn.wq", layer.attn.wq);
    fn(p + "attn.wk", layer.attn.wk);
    fn(p + "attn.wv", layer.attn.wv);
    fn(p + "attn.wout", layer.attn.wout);
    fn(p + "attn.pos_bias", layer.attn.position_bias);
    if (layer.conv.has_value()) {
      ConvModuleWeights& c = *layer.conv;
      visit_norm(p + "conv.norm", c.norm, fn);
      fn(p + "conv.pw1.w", c.pw1_w);
      fn(p + "conv.pw1.b", c.pw1_b);
      fn(p + "conv.dw.w", c.dw_w);
      visit_norm(p + "conv.dw_norm", c.dw_norm, fn);
      fn(p + "conv.pw2.w", c.pw2_w);
      fn(p + "conv.pw2.b", c.pw2_b);
    }
    visit_ffn(p + "ffn2", layer.ffn2, fn);
    visit_norm(p + "post_norm", layer.post_norm, fn);
  }

  fn("predictor.embedding", model.predictor.embedding);
  fn("predictor.lstm.wx", model.predictor.lstm_wx);
  fn("predictor.lstm.wh", model.predictor.lstm_wh);
  fn("predictor.lstm.b", model.predictor.lstm_b);
  fn("predictor.proj.w", model.predictor.proj_w);
  fn("predictor.proj.b", model.predictor.proj_b);

  fn("joiner.enc.w", model.joiner.enc_proj_w);
  fn("joiner.enc.b", model.joiner.enc_proj_b);
  fn("joiner.out.w", model.joiner.out_w);
  fn("joiner.out.b", model.joiner.out_b);
}

void for_each_parameter(const ModelWeights& model,
                        const std::function<void(const std::string&, const Matrix&)>& fn) {
  for_each_parameter(const_cast<ModelWeights&>(model),
                     [&fn](const std::string& name, Matrix& m) { fn(name, m); });
}

ModelWeights make_model(const EncoderConfig& config, const Vocab& vocab) {
  config.validate();
  ModelWeights m;
  m.config = config;
  m.vocab = vocab;

  const std::size_t d = config.model_dim;
  const std::size_t ffn = config.ffn_expansion * d;

  VggWeights& v = m.encoder.vgg;
  v.c1_w = Matrix(kVggStage1Ch, 9);
  v.c1_b = Matrix(1, kVggStage1Ch);
  v.c2_w = Matrix(kVggStage1Ch, kVggStage1Ch * 9);
  v.c2_b = Matrix(1, kVggStage1Ch);
  v.c3_w = Matrix(kVggStage2Ch, kVggStage1Ch * 9);
  v.c3_b = Matrix(1, kVggStage2Ch);
  v.c4_w = Matrix(kVggStage2Ch, kVggStage2Ch * 9);
  v.c4_b = Matrix(1, kVggStage2Ch);
  m.encoder.input_proj_w = Matrix(d, kVggFlatDim);
  m.encoder.input_proj_b = Matrix(1, d);

  auto make_norm = [d] { return NormParams{Matrix(1, d), Matrix(1, d)}; };
  auto make_ffn = [&] {
    FfnWeights f;
    f.norm = make_norm();
    f.w1 = Matrix(ffn, d);
    f.b1 = Matrix(1, ffn);
    f.w2 = Matrix(d, ffn);
    f.b2 = Matrix(1, d);
    return f;
  };

  m.encoder.layers.resize(config.num_layers);
  for (LayerWeights& layer : m.encoder.layers) {
    layer.ffn1 = make_ffn();
    layer.attn_norm = make_norm();
    layer.attn.heads = config.heads;
    layer.attn.wq = Matrix(d, d);
    layer.attn.wk = Matrix(d, d);
    layer.attn.wv = Matrix(d, d);
    layer.attn.wout = Matrix(d, d);
    layer.attn.position_bias = Matrix(config.heads, kNumPositionBuckets);
    if (config.variant == EncoderVariant::conformer) {
      ConvModuleWeights c;
      c.norm = make_norm();
      c.pw1_w = Matrix(2 * d, d);
      c.pw1_b = Matrix(1, 2 * d);
      c.dw_w = Matrix(d, config.conv_kernel);
      c.dw_norm = make_norm();
      c.pw2_w = Matrix(d, d);
      c.pw2_b = Matrix(1, d);
      layer.conv = std::move(c);
    }
    layer.ffn2 = make_ffn();
    layer.post_norm = make_norm();
  }

  const std::size_t classes = vocab.num_classes();
  m.predictor.embedding = Matrix(classes, kEmbedDim);
  m.predictor.lstm_wx = Matrix(4 * kPredHidden, kEmbedDim);
  m.predictor.lstm_wh = Matrix(4 * kPredHidden, kPredHidden);
  m.predictor.lstm_b = Matrix(1, 4 * kPredHidden);
  m.predictor.proj_w = Matrix(kJointDim, kPredHidden);
  m.predictor.proj_b = Matrix(1, kJointDim);

  m.joiner.enc_proj_w = Matrix(kJointDim, d);
  m.joiner.enc_proj_b = Matrix(1, kJointDim);
  m.joiner.out_w = Matrix(classes, kJointDim);
  m.joiner.out_b = Matrix(1, classes);
  return m;
}

void init_uniform(ModelWeights& model, std::uint64_t seed) {
  SplitMix64 rng(seed);
  for_each_parameter(model, [&rng](const std::string&, Matrix& m) {
    float* p = m.data().data();
    for (std::size_t i = 0; i < m.size(); ++i) {
      p[i] = rng.next_uniform(-0.1f, 0.1f);
    }
  });
}

std::size_t param_count(const ModelWeights& model) {
  std::size_t n = 0;
  for_each_parameter(model, [&n](const std::string&, const Matrix& m) { n += m.size(); });
  return n;
}

std::size_t param_count(const EncoderConfig& config, const Vocab& vocab) {
  const ModelWeights m = make_model(config, vocab);
  return param_count(m);
}

}  // namespace scrt
