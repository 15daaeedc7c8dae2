#include <cmath>
#include <vector>

#include "doctest.h"
#include "scrt/attention.hpp"
#include "scrt/errors.hpp"
#include "scrt/matrix.hpp"
#include "scrt/synth.hpp"

using scrt::Matrix;

namespace {

Matrix identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0f;
  return m;
}

scrt::AttentionWeights make_weights(std::uint64_t seed, std::size_t d, std::size_t heads) {
  scrt::AttentionWeights w;
  w.wq = scrt::synth_matrix(seed + 1, d, d, -0.1f, 0.1f);
  w.wk = scrt::synth_matrix(seed + 2, d, d, -0.1f, 0.1f);
  w.wv = scrt::synth_matrix(seed + 3, d, d, -0.1f, 0.1f);
  w.wout = scrt::synth_matrix(seed + 4, d, d, -0.1f, 0.1f);
  w.heads = heads;
  w.position_bias = scrt::synth_matrix(seed + 5, heads, scrt::kNumPositionBuckets, -0.5f, 0.5f);
  return w;
}

scrt::SegmentInput make_segment(std::uint64_t seed, std::size_t l, std::size_t c, std::size_t r,
                                std::size_t d) {
  scrt::SegmentInput seg;
  seg.left = scrt::synth_matrix(seed + 1, l, d, -1.0f, 1.0f);
  seg.center = scrt::synth_matrix(seed + 2, c, d, -1.0f, 1.0f);
  seg.right = scrt::synth_matrix(seed + 3, r, d, -1.0f, 1.0f);
  return seg;
}

}  // namespace

TEST_CASE("relative position buckets") {
  CHECK(scrt::relative_bucket(0, 0) == 16);
  CHECK(scrt::relative_bucket(0, 1) == 17);
  CHECK(scrt::relative_bucket(1, 0) == 15);
  CHECK(scrt::relative_bucket(0, 16) == 32);
  CHECK(scrt::relative_bucket(0, 100) == 32);
  CHECK(scrt::relative_bucket(100, 0) == 0);
  CHECK(scrt::kMemoryBucket == 33);
  CHECK(scrt::kNumPositionBuckets == 34);
}

TEST_CASE("memory bank keeps newest slots up to the cap") {
  scrt::MemoryBank bank(2, 2);
  std::vector<std::vector<float>> pushed;
  for (int i = 0; i < 5; ++i) {
    pushed.push_back({static_cast<float>(i), static_cast<float>(-i)});
    bank.push(pushed.back());
    CHECK(bank.size() == std::min<std::size_t>(i + 1, 2));
  }
  CHECK(bank.slot(0)[0] == 3.0f);
  CHECK(bank.slot(1)[0] == 4.0f);

  Matrix stacked = bank.as_matrix();
  CHECK(stacked.rows() == 2);
  CHECK(stacked.at(0, 1) == -3.0f);
  CHECK(stacked.at(1, 1) == -4.0f);

  scrt::MemoryBank off(2, 0);
  off.push({1.0f, 2.0f});
  CHECK(off.size() == 0);

  scrt::MemoryBank unbounded(2);
  for (int i = 0; i < 7; ++i) unbounded.push({0.0f, 0.0f});
  CHECK(unbounded.size() == 7);
}

TEST_CASE("query block has one summary row after the frames") {
  const std::size_t d = 8;
  scrt::AttentionWeights w = make_weights(0x100, d, 2);

  scrt::SegmentInput seg = make_segment(0x200, 16, 32, 8, d);
  Matrix q = scrt::build_query(seg, w.wq);
  CHECK(q.rows() == 57);
  CHECK(q.cols() == d);

  scrt::SegmentInput tiny = make_segment(0x300, 0, 1, 0, d);
  Matrix q_tiny = scrt::build_query(tiny, w.wq);
  CHECK(q_tiny.rows() == 2);

  // With all center rows identical, the summary equals the projected row.
  scrt::SegmentInput flat;
  flat.center = Matrix(3, d);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < d; ++c) flat.center.at(r, c) = 0.25f * (c + 1);
  }
  Matrix q_flat = scrt::build_query(flat, w.wq);
  CHECK(q_flat.rows() == 4);
  for (std::size_t c = 0; c < d; ++c) {
    CHECK(q_flat.at(3, c) == q_flat.at(0, c));
  }
}

TEST_CASE("key and value blocks put memory slots first") {
  const std::size_t d = 8;
  scrt::AttentionWeights w = make_weights(0x400, d, 2);

  scrt::MemoryBank bank(d);
  scrt::SplitMix64 rng(0x42);
  for (int i = 0; i < 3; ++i) {
    std::vector<float> slot(d);
    for (float& x : slot) x = static_cast<float>(rng.next_uniform(-1.0, 1.0));
    bank.push(slot);
  }

  scrt::SegmentInput seg = make_segment(0x500, 16, 32, 8, d);
  auto [k, v] = scrt::build_key_value(seg, bank, w.wk, w.wv);
  CHECK(k.rows() == 59);
  CHECK(v.rows() == 59);

  // Leading rows are the projected slots, in insertion order.
  Matrix proj = scrt::linear(bank.as_matrix(), w.wk, std::vector<float>(d, 0.0f));
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      CHECK(k.at(r, c) == doctest::Approx(proj.at(r, c)).epsilon(1e-6));
    }
  }

  scrt::MemoryBank empty(d);
  scrt::SegmentInput no_left = make_segment(0x600, 0, 32, 8, d);
  auto [k2, v2] = scrt::build_key_value(no_left, empty, w.wk, w.wv);
  CHECK(k2.rows() == 40);

  scrt::SegmentInput one = make_segment(0x700, 0, 1, 0, d);
  auto [k3, v3] = scrt::build_key_value(one, empty, w.wk, w.wv);
  CHECK(k3.rows() == 1);
}

TEST_CASE("attention over a single key concentrates all weight") {
  const std::size_t d = 4;
  Matrix q = scrt::synth_matrix(0x800, 1, d, -1.0f, 1.0f);
  Matrix k = scrt::synth_matrix(0x801, 1, d, -1.0f, 1.0f);
  Matrix v = scrt::synth_matrix(0x802, 1, d, -1.0f, 1.0f);
  Matrix wout = scrt::synth_matrix(0x803, d, d, -0.5f, 0.5f);

  scrt::SuppressionConfig sup;
  scrt::AttendResult res = scrt::attend(q, k, v, 2, wout, sup);
  CHECK(res.probs.size() == 2);
  CHECK(res.probs[0].at(0, 0) == 1.0f);
  CHECK(res.probs[1].at(0, 0) == 1.0f);

  Matrix expected = scrt::linear(v, wout, std::vector<float>(d, 0.0f));
  for (std::size_t c = 0; c < d; ++c) {
    CHECK(res.out.at(0, c) == doctest::Approx(expected.at(0, c)).epsilon(1e-6));
  }
}

TEST_CASE("equal logits give uniform rows that suppression leaves intact") {
  const std::size_t d = 4;
  Matrix q(3, d);  // zero queries, so every logit is zero
  Matrix k = scrt::synth_matrix(0x900, 5, d, -1.0f, 1.0f);
  Matrix v = scrt::synth_matrix(0x901, 5, d, -1.0f, 1.0f);
  Matrix wout = identity(d);

  scrt::SuppressionConfig off{0.5f, false};
  scrt::AttendResult plain = scrt::attend(q, k, v, 1, wout, off);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 5; ++c) {
      CHECK(plain.probs[0].at(r, c) == doctest::Approx(0.2).epsilon(1e-6));
    }
  }

  // A uniform row has zero spread, and ties at the threshold survive.
  scrt::SuppressionConfig on;
  scrt::AttendResult kept = scrt::attend(q, k, v, 1, wout, on);
  for (std::size_t c = 0; c < 5; ++c) {
    CHECK(kept.probs[0].at(0, c) == plain.probs[0].at(0, c));
  }
}

TEST_CASE("weak attention suppression hand values") {
  std::vector<float> p = {0.4f, 0.3f, 0.2f, 0.1f};

  std::vector<float> half = scrt::weak_attention_suppress(p, 0.5f);
  CHECK(half[0] == doctest::Approx(4.0 / 9.0).epsilon(1e-4));
  CHECK(half[1] == doctest::Approx(3.0 / 9.0).epsilon(1e-4));
  CHECK(half[2] == doctest::Approx(2.0 / 9.0).epsilon(1e-4));
  CHECK(half[3] == 0.0f);

  std::vector<float> strict = scrt::weak_attention_suppress(p, 0.0f);
  CHECK(strict[0] == doctest::Approx(0.5714).epsilon(1e-4));
  CHECK(strict[1] == doctest::Approx(0.4286).epsilon(1e-4));
  CHECK(strict[2] == 0.0f);
  CHECK(strict[3] == 0.0f);

  std::vector<float> uniform = {0.25f, 0.25f, 0.25f, 0.25f};
  std::vector<float> same = scrt::weak_attention_suppress(uniform, 0.5f);
  for (std::size_t i = 0; i < 4; ++i) CHECK(same[i] == 0.25f);

  // The maximum survives even when the threshold would cut everything.
  std::vector<float> lone = {1.0f};
  CHECK(scrt::weak_attention_suppress(lone, 0.0f)[0] == 1.0f);
  std::vector<float> pair = {0.9f, 0.1f};
  std::vector<float> cut = scrt::weak_attention_suppress(pair, 0.0f);
  CHECK(cut[0] == 1.0f);
  CHECK(cut[1] == 0.0f);
}

TEST_CASE("memory slot formation hand values") {
  const std::size_t d = 4;

  SUBCASE("identical value rows reproduce the row") {
    Matrix v(3, d);
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < d; ++c) v.at(r, c) = 0.5f * (c + 1);
    }
    std::vector<std::vector<float>> probs = {{0.2f, 0.3f, 0.5f}, {0.6f, 0.1f, 0.3f}};
    scrt::MemoryBank bank(d);
    scrt::update_memory(bank, probs, v, 2, identity(d));
    REQUIRE(bank.size() == 1);
    for (std::size_t c = 0; c < d; ++c) {
      CHECK(bank.slot(0)[c] == doctest::Approx(0.5f * (c + 1)).epsilon(1e-6));
    }
  }

  SUBCASE("one-hot weights pick out the projected row") {
    Matrix v = scrt::synth_matrix(0xa00, 3, d, -1.0f, 1.0f);
    Matrix wout = scrt::synth_matrix(0xa01, d, d, -0.5f, 0.5f);
    std::vector<std::vector<float>> probs = {{0.0f, 1.0f, 0.0f}};
    scrt::MemoryBank bank(d);
    scrt::update_memory(bank, probs, v, 1, wout);
    REQUIRE(bank.size() == 1);
    Matrix expected = scrt::linear(v.slice_rows(1, 2), wout, std::vector<float>(d, 0.0f));
    for (std::size_t c = 0; c < d; ++c) {
      CHECK(bank.slot(0)[c] == doctest::Approx(expected.at(0, c)).epsilon(1e-6));
    }
  }

  SUBCASE("uniform weights average the rows") {
    Matrix v = Matrix::from_rows({{2.0f, 0.0f}, {0.0f, 2.0f}});
    std::vector<std::vector<float>> probs = {{0.5f, 0.5f}};
    scrt::MemoryBank bank(2);
    scrt::update_memory(bank, probs, v, 1, identity(2));
    REQUIRE(bank.size() == 1);
    CHECK(bank.slot(0)[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(bank.slot(0)[1] == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("full layer preserves the segment shape and grows the bank") {
  const std::size_t d = 8;
  scrt::AttentionWeights w = make_weights(0xb00, d, 2);
  scrt::SuppressionConfig sup;

  scrt::MemoryBank bank(d);
  scrt::SplitMix64 rng(0x7e57);
  for (int i = 0; i < 3; ++i) {
    std::vector<float> slot(d);
    for (float& x : slot) x = static_cast<float>(rng.next_uniform(-1.0, 1.0));
    bank.push(slot);
  }

  scrt::SegmentInput seg = make_segment(0xc00, 4, 6, 2, d);
  scrt::SegmentInput out = scrt::augmem_layer_forward(seg, bank, w, sup);
  CHECK(out.left.rows() == 4);
  CHECK(out.center.rows() == 6);
  CHECK(out.right.rows() == 2);
  CHECK(out.dim() == d);
  CHECK(bank.size() == 4);

  scrt::MemoryBank fresh(d);
  scrt::SegmentInput no_left = make_segment(0xd00, 0, 6, 2, d);
  scrt::SegmentInput out2 = scrt::augmem_layer_forward(no_left, fresh, w, sup);
  CHECK(out2.left.rows() == 0);
  CHECK(out2.center.rows() == 6);
  CHECK(fresh.size() == 1);
}

TEST_CASE("attention rows stay normalized after suppression") {
  const std::size_t d = 8;
  scrt::AttentionWeights w = make_weights(0xe00, d, 2);
  scrt::SegmentInput seg = make_segment(0xf00, 4, 8, 2, d);
  scrt::MemoryBank bank(d);

  Matrix q = scrt::build_query(seg, w.wq);
  auto [k, v] = scrt::build_key_value(seg, bank, w.wk, w.wv);
  std::vector<Matrix> bias = scrt::build_head_bias(w, bank.size(), 4, 8, 2);
  scrt::SuppressionConfig sup;
  scrt::AttendResult res = scrt::attend(q, k, v, w.heads, w.wout, sup, &bias);

  for (const Matrix& head : res.probs) {
    for (std::size_t r = 0; r < head.rows(); ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < head.cols(); ++c) sum += head.at(r, c);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}
