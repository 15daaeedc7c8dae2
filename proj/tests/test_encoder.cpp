#include <cmath>
#include <vector>

#include "doctest.h"
#include "scrt/encoder.hpp"
#include "scrt/matrix.hpp"
#include "scrt/model.hpp"
#include "scrt/synth.hpp"
#include "scrt/vgg.hpp"

using scrt::Matrix;

namespace {

scrt::EncoderConfig small_config() {
  scrt::EncoderConfig cfg;
  cfg.variant = scrt::EncoderVariant::conformer;
  cfg.num_layers = 1;
  cfg.model_dim = 8;
  cfg.heads = 2;
  cfg.conv_kernel = 4;
  cfg.ffn_expansion = 2;
  return cfg;
}

scrt::FfnWeights zero_ffn(std::size_t d, std::size_t e) {
  scrt::FfnWeights w;
  w.norm.gain = Matrix(1, d);
  w.norm.bias = Matrix(1, d);
  w.w1 = Matrix(e * d, d);
  w.b1 = Matrix(1, e * d);
  w.w2 = Matrix(d, e * d);
  w.b2 = Matrix(1, d);
  return w;
}

scrt::FfnWeights synth_ffn(std::uint64_t seed, std::size_t d, std::size_t e) {
  scrt::FfnWeights w;
  w.norm.gain = scrt::synth_matrix(seed + 1, 1, d, 0.5f, 1.5f);
  w.norm.bias = scrt::synth_matrix(seed + 2, 1, d, -0.5f, 0.5f);
  w.w1 = scrt::synth_matrix(seed + 3, e * d, d, -0.5f, 0.5f);
  w.b1 = scrt::synth_matrix(seed + 4, 1, e * d, -0.5f, 0.5f);
  w.w2 = scrt::synth_matrix(seed + 5, d, e * d, -0.5f, 0.5f);
  w.b2 = scrt::synth_matrix(seed + 6, 1, d, -0.5f, 0.5f);
  return w;
}

scrt::ConvModuleWeights zero_conv(std::size_t d, std::size_t kernel) {
  scrt::ConvModuleWeights w;
  w.norm.gain = Matrix(1, d);
  w.norm.bias = Matrix(1, d);
  w.pw1_w = Matrix(2 * d, d);
  w.pw1_b = Matrix(1, 2 * d);
  w.dw_w = Matrix(d, kernel);
  w.dw_norm.gain = Matrix(1, d);
  w.dw_norm.bias = Matrix(1, d);
  w.pw2_w = Matrix(d, d);
  w.pw2_b = Matrix(1, d);
  return w;
}

scrt::ConvModuleWeights synth_conv(std::uint64_t seed, std::size_t d, std::size_t kernel) {
  scrt::ConvModuleWeights w = zero_conv(d, kernel);
  w.norm.gain = scrt::synth_matrix(seed + 1, 1, d, 0.5f, 1.5f);
  w.norm.bias = scrt::synth_matrix(seed + 2, 1, d, -0.5f, 0.5f);
  w.pw1_w = scrt::synth_matrix(seed + 3, 2 * d, d, -0.5f, 0.5f);
  w.pw1_b = scrt::synth_matrix(seed + 4, 1, 2 * d, -0.5f, 0.5f);
  w.dw_w = scrt::synth_matrix(seed + 5, d, kernel, -0.5f, 0.5f);
  w.dw_norm.gain = scrt::synth_matrix(seed + 6, 1, d, 0.5f, 1.5f);
  w.dw_norm.bias = scrt::synth_matrix(seed + 7, 1, d, -0.5f, 0.5f);
  w.pw2_w = scrt::synth_matrix(seed + 8, d, d, -0.5f, 0.5f);
  w.pw2_b = scrt::synth_matrix(seed + 9, 1, d, -0.5f, 0.5f);
  return w;
}

scrt::AttentionWeights zero_attention(std::size_t d, std::size_t heads) {
  scrt::AttentionWeights w;
  w.wq = Matrix(d, d);
  w.wk = Matrix(d, d);
  w.wv = Matrix(d, d);
  w.wout = Matrix(d, d);
  w.heads = heads;
  w.position_bias = Matrix(heads, scrt::kNumPositionBuckets);
  return w;
}

}  // namespace

TEST_CASE("published presets") {
  scrt::EncoderConfig cs = scrt::EncoderConfig::preset(scrt::EncoderVariant::conformer, 'S');
  CHECK(cs.variant == scrt::EncoderVariant::conformer);
  CHECK(cs.model_dim == 144);
  CHECK(cs.num_layers == 16);
  CHECK(cs.heads == 4);
  CHECK(cs.left == 16);
  CHECK(cs.center == 32);
  CHECK(cs.right == 8);

  CHECK(scrt::EncoderConfig::preset(scrt::EncoderVariant::conformer, 'M').model_dim == 256);
  CHECK(scrt::EncoderConfig::preset(scrt::EncoderVariant::transformer, 'S').model_dim == 160);
  CHECK(scrt::EncoderConfig::preset(scrt::EncoderVariant::transformer, 'M').model_dim == 288);
}

TEST_CASE("front-end output lengths") {
  CHECK(scrt::vgg_output_length(100) == 25);
  CHECK(scrt::vgg_output_length(1) == 1);
  CHECK(scrt::vgg_output_length(101) == 26);

  scrt::EncoderConfig cfg = small_config();
  scrt::ModelWeights model = scrt::make_model(cfg);
  scrt::init_uniform(model, 0x11);

  Matrix feats = scrt::synth_features(0x12, 37);
  Matrix one_shot = scrt::vgg_subsample(feats, model.encoder, cfg.model_dim);
  CHECK(one_shot.rows() == scrt::vgg_output_length(37));
  CHECK(one_shot.cols() == cfg.model_dim);

  scrt::VggStream stream(model.encoder, cfg.model_dim);
  Matrix streamed = stream.push(feats);
  streamed.append_rows(stream.finalize());
  CHECK(streamed == one_shot);
  CHECK(stream.finalized());
  CHECK(stream.frames_in() == 37);
  CHECK(stream.frames_out() == scrt::vgg_output_length(37));
}

TEST_CASE("feed-forward half-step") {
  const std::size_t d = 8;
  Matrix x = scrt::synth_matrix(0x21, 5, d, -1.0f, 1.0f);

  SUBCASE("zero weights pass the input through") {
    CHECK(scrt::feed_forward_module(x, zero_ffn(d, 2)) == x);
  }

  SUBCASE("shape is preserved") {
    Matrix y = scrt::feed_forward_module(x, synth_ffn(0x22, d, 2));
    CHECK(y.rows() == 5);
    CHECK(y.cols() == d);
  }

  SUBCASE("residual branch is linear in the output projection") {
    scrt::FfnWeights w = synth_ffn(0x23, d, 2);
    Matrix y1 = scrt::feed_forward_module(x, w);
    scrt::FfnWeights doubled = w;
    for (std::size_t i = 0; i < doubled.w2.size(); ++i) doubled.w2.data()[i] *= 2.0f;
    for (std::size_t i = 0; i < doubled.b2.size(); ++i) doubled.b2.data()[i] *= 2.0f;
    Matrix y2 = scrt::feed_forward_module(x, doubled);
    for (std::size_t i = 0; i < x.size(); ++i) {
      float lhs = y2.data()[i] - x.data()[i];
      float rhs = 2.0f * (y1.data()[i] - x.data()[i]);
      CHECK(std::fabs(lhs - rhs) <= 1e-6f);
    }
  }
}

TEST_CASE("convolution module") {
  const std::size_t d = 8;
  Matrix x = scrt::synth_matrix(0x31, 5, d, -1.0f, 1.0f);

  SUBCASE("zero output projection passes the input through") {
    scrt::ConvModuleWeights w = synth_conv(0x32, d, 4);
    w.pw2_w = Matrix(d, d);
    w.pw2_b = Matrix(1, d);
    CHECK(scrt::conv_module(x, w) == x);
  }

  SUBCASE("shape is preserved") {
    Matrix y = scrt::conv_module(x, synth_conv(0x33, d, 4));
    CHECK(y.rows() == 5);
    CHECK(y.cols() == d);
  }

  SUBCASE("hand-composed pipeline on a three-frame input") {
    // Weights chosen so each stage is easy to replay by hand: unit norms, a
    // pointwise stage that copies the input and feeds zeros to the gate, a
    // centered-delta depthwise kernel, and an identity output projection.
    const std::size_t hd = 2;
    scrt::ConvModuleWeights w = zero_conv(hd, 3);
    for (std::size_t c = 0; c < hd; ++c) {
      w.norm.gain.at(0, c) = 1.0f;
      w.dw_norm.gain.at(0, c) = 1.0f;
      w.pw1_w.at(c, c) = 1.0f;
      w.dw_w.at(c, 1) = 1.0f;
      w.pw2_w.at(c, c) = 1.0f;
    }
    Matrix in = Matrix::from_rows({{1.0f, 2.0f}, {3.0f, 5.0f}, {-1.0f, 0.0f}});
    Matrix got = scrt::conv_module(in, w);

    auto normalize = [](const std::vector<double>& row) {
      double mean = 0.0;
      for (double v : row) mean += v;
      mean /= row.size();
      double var = 0.0;
      for (double v : row) var += (v - mean) * (v - mean);
      var /= row.size();
      std::vector<double> out(row.size());
      for (std::size_t i = 0; i < row.size(); ++i) {
        out[i] = (row[i] - mean) / std::sqrt(var + scrt::kLayerNormEps);
      }
      return out;
    };
    for (std::size_t r = 0; r < in.rows(); ++r) {
      std::vector<double> row = {in.at(r, 0), in.at(r, 1)};
      std::vector<double> t = normalize(row);
      for (double& v : t) v *= 0.5;  // gate input is zero, sigmoid(0) halves
      std::vector<double> u = normalize(t);
      for (std::size_t c = 0; c < hd; ++c) {
        double s = u[c] / (1.0 + std::exp(-u[c]));
        CHECK(got.at(r, c) == doctest::Approx(in.at(r, c) + s).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("conformer block") {
  scrt::EncoderConfig cfg = small_config();
  scrt::ModelWeights model = scrt::make_model(cfg);
  scrt::init_uniform(model, 0x41);
  const scrt::LayerWeights& lw = model.encoder.layers[0];

  scrt::SegmentInput seg;
  seg.left = scrt::synth_matrix(0x42, 4, cfg.model_dim, -1.0f, 1.0f);
  seg.center = scrt::synth_matrix(0x43, 6, cfg.model_dim, -1.0f, 1.0f);
  seg.right = scrt::synth_matrix(0x44, 2, cfg.model_dim, -1.0f, 1.0f);

  SUBCASE("shape preserved, one slot added") {
    scrt::MemoryBank bank(cfg.model_dim, cfg.memory_cap);
    scrt::SegmentInput out = scrt::conformer_block(seg, bank, lw, cfg);
    CHECK(out.left.rows() == 4);
    CHECK(out.center.rows() == 6);
    CHECK(out.right.rows() == 2);
    CHECK(bank.size() == 1);
    scrt::SegmentInput out2 = scrt::conformer_block(out, bank, lw, cfg);
    CHECK(bank.size() == 2);
    CHECK(out2.frame_rows() == 12);
  }

  SUBCASE("zero residual branches reduce to the closing layer norm") {
    const std::size_t d = cfg.model_dim;
    scrt::LayerWeights zeroed;
    zeroed.ffn1 = zero_ffn(d, cfg.ffn_expansion);
    zeroed.attn_norm.gain = Matrix(1, d);
    zeroed.attn_norm.bias = Matrix(1, d);
    zeroed.attn = zero_attention(d, cfg.heads);
    zeroed.conv = zero_conv(d, cfg.conv_kernel);
    zeroed.ffn2 = zero_ffn(d, cfg.ffn_expansion);
    zeroed.post_norm.gain = scrt::synth_matrix(0x45, 1, d, 0.5f, 1.5f);
    zeroed.post_norm.bias = scrt::synth_matrix(0x46, 1, d, -0.5f, 0.5f);

    scrt::MemoryBank bank(d, cfg.memory_cap);
    scrt::SegmentInput out = scrt::conformer_block(seg, bank, zeroed, cfg);
    Matrix got = scrt::concat_rows(out.left, out.center, out.right);
    Matrix stacked = scrt::concat_rows(seg.left, seg.center, seg.right);
    Matrix want = scrt::layer_norm(stacked, zeroed.post_norm.gain.row_span(0),
                                   zeroed.post_norm.bias.row_span(0), scrt::kLayerNormEps);
    REQUIRE(got.rows() == want.rows());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-6));
    }
  }

  SUBCASE("transformer variant equals the block without its convolution") {
    scrt::EncoderConfig tcfg = cfg;
    tcfg.variant = scrt::EncoderVariant::transformer;
    scrt::LayerWeights no_conv = lw;
    no_conv.conv.reset();

    scrt::LayerWeights muted = lw;
    muted.conv->pw2_w = Matrix(cfg.model_dim, cfg.model_dim);
    muted.conv->pw2_b = Matrix(1, cfg.model_dim);

    scrt::MemoryBank bank_a(cfg.model_dim);
    scrt::MemoryBank bank_b(cfg.model_dim);
    scrt::SegmentInput a = scrt::conformer_block(seg, bank_a, no_conv, tcfg);
    scrt::SegmentInput b = scrt::conformer_block(seg, bank_b, muted, cfg);
    CHECK(a.left == b.left);
    CHECK(a.center == b.center);
    CHECK(a.right == b.right);
  }
}

TEST_CASE("segment pass across layers") {
  scrt::EncoderConfig cfg = small_config();
  scrt::ModelWeights model = scrt::make_model(cfg);
  scrt::init_uniform(model, 0x51);

  scrt::SegmentInput seg;
  seg.center = scrt::synth_matrix(0x52, cfg.center, cfg.model_dim, -1.0f, 1.0f);
  seg.right = scrt::synth_matrix(0x53, cfg.right, cfg.model_dim, -1.0f, 1.0f);

  SUBCASE("single layer matches one block call") {
    std::vector<scrt::MemoryBank> banks = scrt::make_banks(cfg);
    REQUIRE(banks.size() == 1);
    Matrix got = scrt::encoder_forward_segment(seg, banks, model.encoder, cfg);

    scrt::MemoryBank lone(cfg.model_dim, cfg.memory_cap);
    scrt::SegmentInput blocked =
        scrt::conformer_block(seg, lone, model.encoder.layers[0], cfg);
    CHECK(got == blocked.center);
  }

  SUBCASE("each layer's bank gains one slot per segment") {
    scrt::EncoderConfig deep = cfg;
    deep.num_layers = 3;
    scrt::ModelWeights dm = scrt::make_model(deep);
    scrt::init_uniform(dm, 0x54);
    std::vector<scrt::MemoryBank> banks = scrt::make_banks(deep);
    REQUIRE(banks.size() == 3);
    scrt::encoder_forward_segment(seg, banks, dm.encoder, deep);
    for (const scrt::MemoryBank& b : banks) CHECK(b.size() == 1);
    scrt::encoder_forward_segment(seg, banks, dm.encoder, deep);
    for (const scrt::MemoryBank& b : banks) CHECK(b.size() == 2);
  }

  SUBCASE("emitted rows equal the center size") {
    std::vector<scrt::MemoryBank> banks = scrt::make_banks(cfg);
    Matrix got = scrt::encoder_forward_segment(seg, banks, model.encoder, cfg);
    CHECK(got.rows() == cfg.center);
    CHECK(got.cols() == cfg.model_dim);
  }
}
