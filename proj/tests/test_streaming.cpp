#include <vector>

#include "doctest.h"
#include "scrt/encoder.hpp"
#include "scrt/errors.hpp"
#include "scrt/matrix.hpp"
#include "scrt/model.hpp"
#include "scrt/streaming.hpp"
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

scrt::ModelWeights small_model(std::uint64_t seed) {
  scrt::ModelWeights model = scrt::make_model(small_config());
  scrt::init_uniform(model, seed);
  return model;
}

}  // namespace

TEST_CASE("segment schedule over encoder frames") {
  scrt::EncoderConfig cfg = small_config();
  scrt::ModelWeights model = small_model(0x61);

  SUBCASE("64 frames split into two segments") {
    scrt::EncoderStream stream(model.encoder, cfg);
    Matrix pushed = stream.push(scrt::synth_matrix(0x62, 64, cfg.model_dim, -1.0f, 1.0f));
    CHECK(pushed.rows() == 32);
    CHECK(stream.segments_emitted() == 1);
    Matrix tail = stream.finalize();
    CHECK(tail.rows() == 32);
    CHECK(stream.segments_emitted() == 2);
  }

  SUBCASE("exactly one center plus lookahead emits the first segment") {
    scrt::EncoderStream stream(model.encoder, cfg);
    Matrix first = stream.push(scrt::synth_matrix(0x63, 39, cfg.model_dim, -1.0f, 1.0f));
    CHECK(first.rows() == 0);
    Matrix second = stream.push(scrt::synth_matrix(0x64, 1, cfg.model_dim, -1.0f, 1.0f));
    CHECK(second.rows() == 32);
  }

  SUBCASE("32 frames finalize into one lookahead-free segment") {
    scrt::EncoderStream stream(model.encoder, cfg);
    Matrix pushed = stream.push(scrt::synth_matrix(0x65, 32, cfg.model_dim, -1.0f, 1.0f));
    CHECK(pushed.rows() == 0);
    Matrix tail = stream.finalize();
    CHECK(tail.rows() == 32);
    CHECK(stream.segments_emitted() == 1);
  }

  SUBCASE("a multiple of the center size ends on a full segment") {
    scrt::EncoderStream stream(model.encoder, cfg);
    Matrix pushed = stream.push(scrt::synth_matrix(0x66, 96, cfg.model_dim, -1.0f, 1.0f));
    CHECK(pushed.rows() == 64);
    Matrix tail = stream.finalize();
    CHECK(tail.rows() == 32);
    CHECK(stream.segments_emitted() == 3);
  }

  SUBCASE("a short remainder becomes a final partial center") {
    scrt::EncoderStream stream(model.encoder, cfg);
    Matrix pushed = stream.push(scrt::synth_matrix(0x67, 35, cfg.model_dim, -1.0f, 1.0f));
    CHECK(pushed.rows() == 0);
    Matrix tail = stream.finalize();
    CHECK(tail.rows() == 35);
    CHECK(stream.segments_emitted() == 2);
  }

  SUBCASE("an empty stream finalizes to nothing") {
    scrt::EncoderStream stream(model.encoder, cfg);
    Matrix tail = stream.finalize();
    CHECK(tail.rows() == 0);
    CHECK(stream.segments_emitted() == 0);
  }

  SUBCASE("pushing after finalize is rejected") {
    scrt::EncoderStream stream(model.encoder, cfg);
    stream.push(scrt::synth_matrix(0x68, 10, cfg.model_dim, -1.0f, 1.0f));
    stream.finalize();
    CHECK(stream.finalized());
    CHECK_THROWS_AS(stream.push(scrt::synth_matrix(0x69, 1, cfg.model_dim, -1.0f, 1.0f)),
                    scrt::StateError);
  }

  SUBCASE("chunking does not change the output") {
    Matrix frames = scrt::synth_matrix(0x6a, 77, cfg.model_dim, -1.0f, 1.0f);
    scrt::EncoderStream whole(model.encoder, cfg);
    Matrix a = whole.push(frames);
    a.append_rows(whole.finalize());

    scrt::EncoderStream parts(model.encoder, cfg);
    Matrix b = parts.push(frames.slice_rows(0, 13));
    b.append_rows(parts.push(frames.slice_rows(13, 50)));
    b.append_rows(parts.push(frames.slice_rows(50, 77)));
    b.append_rows(parts.finalize());

    CHECK(a == b);
    CHECK(a.rows() == 77);
  }

  SUBCASE("uncapped banks hold one slot per segment") {
    scrt::EncoderStream stream(model.encoder, cfg);
    stream.push(scrt::synth_matrix(0x6b, 100, cfg.model_dim, -1.0f, 1.0f));
    stream.finalize();
    std::vector<std::size_t> slots = stream.memory_slot_counts();
    REQUIRE(slots.size() == cfg.num_layers);
    for (std::size_t s : slots) CHECK(s == stream.segments_emitted());
  }
}

TEST_CASE("algorithmic lookahead") {
  scrt::SegmenterConfig seg;
  CHECK(scrt::lookahead_ms(seg) == 320.0);

  seg.right = 0;
  CHECK(scrt::lookahead_ms(seg) == 0.0);

  seg.right = 4;
  CHECK(scrt::lookahead_ms(seg) == 160.0);
}

TEST_CASE("session runs features through the front end") {
  scrt::EncoderConfig cfg = small_config();
  scrt::ModelWeights model = small_model(0x71);

  Matrix feats = scrt::synth_features(0x72, 150);
  Matrix whole = scrt::encode_utterance(feats, model.encoder, cfg);
  CHECK(whole.rows() == scrt::vgg_output_length(150));
  CHECK(whole.cols() == cfg.model_dim);

  scrt::StreamSession session(model.encoder, cfg);
  Matrix out = session.push_features(feats.slice_rows(0, 70));
  out.append_rows(session.push_features(feats.slice_rows(70, 150)));
  out.append_rows(session.finalize());
  CHECK(out == whole);
  CHECK(session.raw_frames_pushed() == 150);
  CHECK(session.encoder_frames() == scrt::vgg_output_length(150));
}

TEST_CASE("per-segment query cost follows the memory law") {
  scrt::EncoderConfig cfg = small_config();
  const std::size_t ctx = cfg.left + cfg.center + cfg.right;

  std::vector<scrt::SegmentCost> open = scrt::bench_segment_costs(cfg, 3, std::nullopt);
  REQUIRE(open.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(open[i].segment == i + 1);
    CHECK(open[i].key_len == i + ctx);
  }

  std::vector<scrt::SegmentCost> capped = scrt::bench_segment_costs(cfg, 3, 0);
  for (const scrt::SegmentCost& c : capped) CHECK(c.key_len == ctx);
}
