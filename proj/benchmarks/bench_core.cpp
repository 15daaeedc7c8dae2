#include <benchmark/benchmark.h>

#include "scrt/attention.hpp"
#include "scrt/encoder.hpp"
#include "scrt/matrix.hpp"
#include "scrt/model.hpp"
#include "scrt/streaming.hpp"
#include "scrt/synth.hpp"

namespace {

void BM_matmul(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  scrt::Matrix a = scrt::synth_matrix(0xb001, n, n, -1.0f, 1.0f);
  scrt::Matrix b = scrt::synth_matrix(0xb002, n, n, -1.0f, 1.0f);
  for (auto _ : state) {
    scrt::Matrix c = scrt::matmul(a, b);
    benchmark::DoNotOptimize(c.data());
  }
}
BENCHMARK(BM_matmul)->Arg(64)->Arg(128)->Arg(256);

void BM_vgg_push(benchmark::State& state) {
  scrt::EncoderConfig cfg = scrt::EncoderConfig::preset(scrt::EncoderVariant::conformer, 'S');
  cfg.num_layers = 1;
  scrt::ModelWeights model = scrt::make_model(cfg);
  scrt::init_uniform(model, 0xb003);
  scrt::Matrix chunk = scrt::synth_features(0xb004, 32);
  for (auto _ : state) {
    scrt::VggStream stream(model.encoder, cfg.model_dim);
    scrt::Matrix out = stream.push(chunk);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_vgg_push);

void BM_augmem_layer(benchmark::State& state) {
  const std::size_t d = 144;
  scrt::AttentionWeights w;
  w.wq = scrt::synth_matrix(0xb010, d, d, -0.1f, 0.1f);
  w.wk = scrt::synth_matrix(0xb011, d, d, -0.1f, 0.1f);
  w.wv = scrt::synth_matrix(0xb012, d, d, -0.1f, 0.1f);
  w.wout = scrt::synth_matrix(0xb013, d, d, -0.1f, 0.1f);
  w.heads = 4;
  w.position_bias = scrt::synth_matrix(0xb014, 4, scrt::kNumPositionBuckets, -0.5f, 0.5f);
  scrt::SegmentInput seg;
  seg.left = scrt::synth_matrix(0xb015, 16, d, -1.0f, 1.0f);
  seg.center = scrt::synth_matrix(0xb016, 32, d, -1.0f, 1.0f);
  seg.right = scrt::synth_matrix(0xb017, 8, d, -1.0f, 1.0f);
  scrt::SuppressionConfig sup;
  for (auto _ : state) {
    scrt::MemoryBank bank(d);
    scrt::SegmentInput out = seg;
    for (int i = 0; i < 4; ++i) {
      out = scrt::augmem_layer_forward(out, bank, w, sup);
    }
    benchmark::DoNotOptimize(out.center.data());
  }
}
BENCHMARK(BM_augmem_layer);

void BM_stream_segment(benchmark::State& state) {
  scrt::EncoderConfig cfg = scrt::EncoderConfig::preset(scrt::EncoderVariant::conformer, 'S');
  scrt::ModelWeights model = scrt::make_model(cfg);
  scrt::init_uniform(model, 0xb005);
  scrt::Matrix feats = scrt::synth_features(0xb006, 160);
  for (auto _ : state) {
    scrt::StreamSession session(model.encoder, cfg);
    scrt::Matrix out = session.push_features(feats);
    scrt::Matrix tail = session.finalize();
    benchmark::DoNotOptimize(out.data());
    benchmark::DoNotOptimize(tail.data());
  }
}
BENCHMARK(BM_stream_segment);

}  // namespace

BENCHMARK_MAIN();
