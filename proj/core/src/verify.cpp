#include "scrt/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "scrt/attention.hpp"
#include "scrt/decode.hpp"
#include "scrt/encoder.hpp"
#include "scrt/errors.hpp"
#include "scrt/lm.hpp"
#include "scrt/matrix.hpp"
#include "scrt/model.hpp"
#include "scrt/run_config.hpp"
#include "scrt/streaming.hpp"
#include "scrt/synth.hpp"
#include "scrt/table_scorer.hpp"
#include "scrt/transducer.hpp"
#include "scrt/vgg.hpp"
#include "scrt/wer.hpp"

namespace scrt {
namespace {

std::string fnum(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}

/// Accumulates expectations; keeps the first few failure messages so a broken
/// check reports something actionable instead of a bare flag.
class Checker {
 public:
  void expect(bool cond, const std::string& msg) {
    ++total_;
    if (cond) return;
    ++failed_;
    if (failed_ <= 4) {
      if (!detail_.empty()) detail_ += "; ";
      detail_ += msg;
    }
  }

  bool ok() const { return failed_ == 0; }

  std::string detail() const {
    if (failed_ == 0) return {};
    return std::to_string(failed_) + " of " + std::to_string(total_) +
           " expectations failed: " + detail_;
  }

 private:
  std::size_t total_ = 0;
  std::size_t failed_ = 0;
  std::string detail_;
};

CheckResult run_check(int id, const char* name, double budget_seconds,
                      const std::function<void(Checker&)>& body) {
  CheckResult r;
  r.id = id;
  r.name = name;
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("unexpected exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_seconds > 0.0 && r.seconds > budget_seconds) {
    c.expect(false, "runtime " + fnum(r.seconds) + " s exceeded the " + fnum(budget_seconds) +
                        " s budget");
  }
  r.pass = c.ok();
  r.detail = c.detail();
  return r;
}

AttentionWeights make_attention_weights(std::uint64_t seed, std::size_t d, std::size_t heads) {
  AttentionWeights w;
  w.wq = synth_matrix(seed + 1, d, d, -0.1f, 0.1f);
  w.wk = synth_matrix(seed + 2, d, d, -0.1f, 0.1f);
  w.wv = synth_matrix(seed + 3, d, d, -0.1f, 0.1f);
  w.wout = synth_matrix(seed + 4, d, d, -0.1f, 0.1f);
  w.heads = heads;
  w.position_bias = synth_matrix(seed + 5, heads, kNumPositionBuckets, -0.5f, 0.5f);
  return w;
}

SegmentInput make_segment(std::uint64_t seed, std::size_t l, std::size_t c, std::size_t r,
                          std::size_t d) {
  SegmentInput seg;
  seg.left = synth_matrix(seed * 4 + 1, l, d, -1.0f, 1.0f);
  seg.center = synth_matrix(seed * 4 + 2, c, d, -1.0f, 1.0f);
  seg.right = synth_matrix(seed * 4 + 3, r, d, -1.0f, 1.0f);
  return seg;
}

EncoderConfig small_encoder_config() {
  EncoderConfig cfg;
  cfg.variant = EncoderVariant::conformer;
  cfg.num_layers = 2;
  cfg.model_dim = 32;
  cfg.heads = 2;
  cfg.conv_kernel = 8;
  cfg.ffn_expansion = 2;
  return cfg;  // contexts stay at the 16/32/8 defaults
}

/// Brute-force dense attention over the frame rows of one segment: every
/// projection, score, softmax, and weighted sum is written out as nested
/// loops in double precision, independent of the production kernels. No
/// memory rows, no suppression.
Matrix dense_attention_oracle(const SegmentInput& seg, const AttentionWeights& w) {
  const std::size_t l = seg.left.rows();
  const std::size_t cn = seg.center.rows();
  const std::size_t n = l + cn + seg.right.rows();
  const std::size_t d = seg.dim();
  const std::size_t heads = w.heads;
  const std::size_t dh = d / heads;

  std::vector<std::vector<double>> x(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const float* src = i < l            ? seg.left.row(i)
                       : i < l + cn     ? seg.center.row(i - l)
                                        : seg.right.row(i - l - cn);
    for (std::size_t j = 0; j < d; ++j) x[i][j] = src[j];
  }

  auto project = [&](const std::vector<double>& v, const Matrix& wm) {
    std::vector<double> out(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += static_cast<double>(wm.at(i, j)) * v[j];
      out[i] = acc;
    }
    return out;
  };

  std::vector<std::vector<double>> q(n), k(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = project(x[i], w.wq);
    k[i] = project(x[i], w.wk);
    v[i] = project(x[i], w.wv);
  }

  Matrix out(n, d);
  std::vector<double> y(d);
  std::vector<double> s(n), p(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t h = 0; h < heads; ++h) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t t = 0; t < dh; ++t) acc += q[i][h * dh + t] * k[j][h * dh + t];
        long diff = static_cast<long>(j) - static_cast<long>(i);
        diff = std::clamp(diff, -16L, 16L);
        acc = acc / std::sqrt(static_cast<double>(dh)) +
              static_cast<double>(w.position_bias.at(h, static_cast<std::size_t>(diff + 16)));
        s[j] = acc;
        mx = std::max(mx, acc);
      }
      double denom = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        p[j] = std::exp(s[j] - mx);
        denom += p[j];
      }
      for (std::size_t j = 0; j < n; ++j) {
        const double pj = p[j] / denom;
        for (std::size_t t = 0; t < dh; ++t) y[h * dh + t] += pj * v[j][h * dh + t];
      }
    }
    for (std::size_t a = 0; a < d; ++a) {
      double acc = 0.0;
      for (std::size_t b = 0; b < d; ++b) acc += static_cast<double>(w.wout.at(a, b)) * y[b];
      out.at(i, a) = static_cast<float>(acc);
    }
  }
  return out;
}

RnntLattice make_direct_lattice(std::uint64_t seed, std::size_t frames, std::size_t target_len,
                                std::size_t classes) {
  RnntLattice lat;
  lat.frames = frames;
  lat.target_len = target_len;
  lat.classes = classes;
  lat.log_probs.assign(frames * (target_len + 1) * classes, 0.0);
  SplitMix64 rng(seed);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t u = 0; u <= target_len; ++u) {
      std::vector<double> w(classes);
      double sum = 0.0;
      for (std::size_t kk = 0; kk < classes; ++kk) {
        w[kk] = 0.05 + rng.next_unit();
        sum += w[kk];
      }
      for (std::size_t kk = 0; kk < classes; ++kk) lat.lp(t, u, kk) = std::log(w[kk] / sum);
    }
  }
  return lat;
}

/// Sum of all alignment-path probabilities in linear space by explicit
/// recursion: blank consumes one frame, a label consumes one target symbol
/// at the frame index clamped to the last frame.
double enumerate_paths(const RnntLattice& lat, std::span<const int> targets, std::size_t t,
                       std::size_t u) {
  const std::size_t T = lat.frames;
  const std::size_t U = lat.target_len;
  if (t == T && u == U) return 1.0;
  double total = 0.0;
  if (t < T) total += std::exp(lat.lp(t, u, lat.classes - 1)) * enumerate_paths(lat, targets, t + 1, u);
  if (u < U) {
    const std::size_t tc = std::min(t, T - 1);
    total += std::exp(lat.lp(tc, u, static_cast<std::size_t>(targets[u]))) *
             enumerate_paths(lat, targets, t, u + 1);
  }
  return total;
}

PredictorWeights synth_predictor_weights(std::uint64_t seed, const Vocab& vocab) {
  PredictorWeights w;
  w.embedding = synth_matrix(seed + 1, vocab.size + 1, kEmbedDim, -0.1f, 0.1f);
  w.lstm_wx = synth_matrix(seed + 2, 4 * kPredHidden, kEmbedDim, -0.1f, 0.1f);
  w.lstm_wh = synth_matrix(seed + 3, 4 * kPredHidden, kPredHidden, -0.1f, 0.1f);
  w.lstm_b = synth_matrix(seed + 4, 1, 4 * kPredHidden, -0.1f, 0.1f);
  w.proj_w = synth_matrix(seed + 5, kJointDim, kPredHidden, -0.1f, 0.1f);
  w.proj_b = synth_matrix(seed + 6, 1, kJointDim, -0.1f, 0.1f);
  return w;
}

JoinerWeights synth_joiner_weights(std::uint64_t seed, const Vocab& vocab, std::size_t enc_dim) {
  JoinerWeights w;
  w.enc_proj_w = synth_matrix(seed + 1, kJointDim, enc_dim, -0.1f, 0.1f);
  w.enc_proj_b = synth_matrix(seed + 2, 1, kJointDim, -0.1f, 0.1f);
  w.out_w = synth_matrix(seed + 3, vocab.num_classes(), kJointDim, -0.1f, 0.1f);
  w.out_b = synth_matrix(seed + 4, 1, vocab.num_classes(), -0.1f, 0.1f);
  return w;
}

double logsumexp(std::span<const float> v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (float x : v) mx = std::max(mx, static_cast<double>(x));
  double s = 0.0;
  for (float x : v) s += std::exp(static_cast<double>(x) - mx);
  return mx + std::log(s);
}

}  // namespace

CheckResult check_param_counts() {
  return run_check(1, "parameter-counts", 1.0, [](Checker& c) {
    const struct {
      char size;
      double target;
    } cases[] = {{'S', 10.3e6}, {'M', 27.9e6}};
    for (const auto& cs : cases) {
      const auto cfg = EncoderConfig::preset(EncoderVariant::conformer, cs.size);
      const double n = static_cast<double>(param_count(cfg));
      const double rel = std::abs(n - cs.target) / cs.target;
      c.expect(rel <= 0.10, std::string("conformer ") + cs.size + " has " + fnum(n) +
                                " parameters, " + fnum(rel * 100.0) + "% from the " +
                                fnum(cs.target) + " target");
    }
  });
}

CheckResult check_lookahead() {
  return run_check(2, "lookahead", 1.0, [](Checker& c) {
    const SegmenterConfig cfg;
    const double ms = lookahead_ms(cfg);
    c.expect(ms == 320.0, "default lookahead is " + fnum(ms) + " ms, expected exactly 320");
    const double viaRun = lookahead_ms(RunConfig{}.segmenter);
    c.expect(viaRun == 320.0, "run-config default lookahead is " + fnum(viaRun) + " ms");
  });
}

CheckResult check_was_suite() {
  return run_check(3, "weak-attention-suppression", 5.0, [](Checker& c) {
    const float gammas[] = {0.0f, 0.25f, 0.5f, 1.0f};
    SplitMix64 rng(0x5afe5eed);
    for (std::size_t row = 0; row < 1000; ++row) {
      const std::size_t len = 2 + rng.next() % 511;  // lengths 2..512
      std::vector<float> p(len);
      double sum = 0.0;
      for (auto& x : p) {
        x = static_cast<float>(0.001 + rng.next_unit());
        sum += x;
      }
      for (auto& x : p) x = static_cast<float>(x / sum);
      const std::size_t arg =
          static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());

      std::vector<std::vector<bool>> survivors;
      for (float gamma : gammas) {
        const auto out = weak_attention_suppress(std::span<const float>(p), gamma);
        c.expect(out.size() == len, "row " + std::to_string(row) + ": size changed");

        double mean = 0.0;
        for (float x : p) mean += x;
        mean /= static_cast<double>(len);
        double var = 0.0;
        for (float x : p) var += (x - mean) * (x - mean);
        var /= static_cast<double>(len);
        const double theta = mean - static_cast<double>(gamma) * std::sqrt(var);

        double osum = 0.0;
        std::vector<bool> alive(len);
        bool zeros_exact = true;
        for (std::size_t i = 0; i < len; ++i) {
          osum += out[i];
          alive[i] = out[i] != 0.0f;
          if (static_cast<double>(p[i]) < theta && i != arg && out[i] != 0.0f)
            zeros_exact = false;
        }
        c.expect(std::abs(osum - 1.0) <= 1e-6,
                 "row " + std::to_string(row) + " gamma " + fnum(gamma) + ": sum " + fnum(osum));
        c.expect(zeros_exact,
                 "row " + std::to_string(row) + " gamma " + fnum(gamma) + ": sub-threshold entry not exactly 0");
        c.expect(out[arg] != 0.0f,
                 "row " + std::to_string(row) + " gamma " + fnum(gamma) + ": argmax suppressed");
        survivors.push_back(std::move(alive));
      }
      // Larger gamma lowers the threshold, so survivor sets must be nested
      // ascending across the gamma grid.
      for (std::size_t g = 1; g < survivors.size(); ++g) {
        bool nested = true;
        for (std::size_t i = 0; i < len; ++i)
          if (survivors[g - 1][i] && !survivors[g][i]) nested = false;
        c.expect(nested, "row " + std::to_string(row) + ": survivor sets not gamma-monotone");
      }
    }

    const std::vector<float> hand = {0.4f, 0.3f, 0.2f, 0.1f};
    const auto out = weak_attention_suppress(std::span<const float>(hand), 0.5f);
    const double expect[] = {0.4444, 0.3333, 0.2222, 0.0};
    for (std::size_t i = 0; i < 4; ++i) {
      c.expect(std::abs(out[i] - expect[i]) <= 1e-4,
               "hand vector entry " + std::to_string(i) + " = " + fnum(out[i]));
    }
  });
}

CheckResult check_causality() {
  return run_check(4, "causality", 60.0, [](Checker& c) {
    // Toy width d=64; segment 1 covers encoder frames [0, 32) with right
    // context [32, 40), so any perturbation at frame >= 40 is strictly
    // beyond its lookahead and must leave its output bit-identical.
    for (std::size_t layers : {1u, 4u, 16u}) {
      EncoderConfig cfg;
      cfg.variant = EncoderVariant::conformer;
      cfg.num_layers = layers;
      cfg.model_dim = 64;
      cfg.heads = 4;
      cfg.conv_kernel = 16;
      cfg.ffn_expansion = 2;
      ModelWeights model = make_model(cfg, Vocab{4});
      init_uniform(model, 0x900d + layers);

      const Matrix base = synth_matrix(0xcafe00 + layers, 72, 64, -1.0f, 1.0f);
      EncoderStream ref(model.encoder, cfg);
      const Matrix ref_out = ref.push(base);
      c.expect(ref_out.rows() == 64,
               "layers " + std::to_string(layers) + ": expected 2 emitted segments");
      const Matrix ref_seg1 = ref_out.slice_rows(0, 32);

      SplitMix64 rng(0xab1e + layers);
      std::size_t mismatches = 0;
      for (int trial = 0; trial < 200; ++trial) {
        const std::size_t frame = 40 + rng.next() % 32;  // strictly beyond segment 1
        Matrix mod = base;
        for (std::size_t col = 0; col < 64; ++col)
          mod.at(frame, col) = rng.next_uniform(-1.0f, 1.0f);
        EncoderStream s(model.encoder, cfg);
        const Matrix out = s.push(mod);
        if (!(out.rows() == 64 && out.slice_rows(0, 32) == ref_seg1)) ++mismatches;
      }
      c.expect(mismatches == 0, "layers " + std::to_string(layers) + ": " +
                                    std::to_string(mismatches) +
                                    "/200 perturbations changed segment 1 bits");
    }
  });
}

CheckResult check_chunk_invariance() {
  return run_check(5, "chunk-invariance", 60.0, [](Checker& c) {
    const EncoderConfig cfg = small_encoder_config();
    ModelWeights model = make_model(cfg, Vocab{4});
    init_uniform(model, 0x5ca1ab1e);

    SplitMix64 rng(0xfeed5);
    for (int u = 0; u < 50; ++u) {
      const std::size_t frames =
          u == 0 ? 50 : (u == 1 ? 1000 : 50 + rng.next() % 951);
      const Matrix feats = synth_features(1000 + static_cast<std::uint64_t>(u), frames);

      StreamSession whole(model.encoder, cfg);
      Matrix out_whole = whole.push_features(feats);
      out_whole.append_rows(whole.finalize());

      StreamSession stepped(model.encoder, cfg);
      Matrix out_stepped;
      for (std::size_t i = 0; i < frames; ++i)
        out_stepped.append_rows(stepped.push_features(feats.slice_rows(i, i + 1)));
      out_stepped.append_rows(stepped.finalize());

      c.expect(out_whole == out_stepped, "utterance " + std::to_string(u) + " (" +
                                             std::to_string(frames) +
                                             " frames): one-shot and framewise outputs differ");
      c.expect(out_whole.rows() == vgg_output_length(frames),
               "utterance " + std::to_string(u) + ": emitted " +
                   std::to_string(out_whole.rows()) + " rows");
    }
  });
}

CheckResult check_memory_law() {
  return run_check(6, "memory-bank-law", 30.0, [](Checker& c) {
    const EncoderConfig cfg = small_encoder_config();
    ModelWeights model = make_model(cfg, Vocab{4});
    init_uniform(model, 0xba5e);
    const std::size_t ctx = cfg.left + cfg.center + cfg.right;  // 56 at defaults

    const std::optional<std::size_t> caps[] = {std::nullopt, std::size_t{0}, std::size_t{10}};
    for (const auto& cap : caps) {
      const std::string cap_name = cap ? std::to_string(*cap) : "unset";
      const auto costs = bench_segment_costs(cfg, 15, cap);
      c.expect(costs.size() == 15, "cap " + cap_name + ": bench returned " +
                                       std::to_string(costs.size()) + " segments");
      for (std::size_t i = 0; i < costs.size(); ++i) {
        const std::size_t n = i + 1;
        const std::size_t slots_before = cap ? std::min(n - 1, *cap) : n - 1;
        c.expect(costs[i].segment == n, "cap " + cap_name + ": segment ids out of order");
        c.expect(costs[i].key_len == slots_before + ctx,
                 "cap " + cap_name + " segment " + std::to_string(n) + ": key length " +
                     std::to_string(costs[i].key_len) + " != " +
                     std::to_string(slots_before + ctx));
      }

      EncoderConfig capped = cfg;
      capped.memory_cap = cap;
      EncoderStream stream(model.encoder, capped);
      SplitMix64 rng(0x10ad + (cap ? *cap : 99));
      for (std::size_t n = 1; n <= 15; ++n) {
        const std::size_t push_rows = n == 1 ? cfg.center + cfg.right : cfg.center;
        stream.push(synth_matrix(rng.next(), push_rows, cfg.model_dim, -1.0f, 1.0f));
        c.expect(stream.segments_emitted() == n, "cap " + cap_name + ": segment count drifted");
        const std::size_t want = cap ? std::min(n, *cap) : n;
        for (std::size_t slots : stream.memory_slot_counts()) {
          c.expect(slots == want, "cap " + cap_name + " after segment " + std::to_string(n) +
                                      ": layer holds " + std::to_string(slots) +
                                      " slots, expected " + std::to_string(want));
        }
      }
    }
  });
}

CheckResult check_dense_equivalence() {
  return run_check(7, "dense-attention-equivalence", 10.0, [](Checker& c) {
    const struct {
      std::size_t d, heads, l, cn, r;
    } shapes[] = {
        {16, 2, 4, 8, 2},  {16, 1, 0, 6, 0},  {32, 4, 16, 32, 8}, {32, 2, 2, 1, 2},
        {48, 4, 8, 16, 4}, {24, 2, 5, 9, 3},  {64, 4, 16, 32, 8}, {64, 8, 0, 12, 6},
        {40, 4, 3, 20, 0}, {16, 4, 16, 32, 8},
    };
    std::uint64_t seed = 0x0dd5;
    for (const auto& sh : shapes) {
      for (int rep = 0; rep < 2; ++rep) {
        ++seed;
        const auto w = make_attention_weights(seed * 100, sh.d, sh.heads);
        const auto seg = make_segment(seed, sh.l, sh.cn, sh.r, sh.d);
        MemoryBank mem(sh.d);
        const SuppressionConfig off{0.5f, false};
        const SegmentInput got = augmem_layer_forward(seg, mem, w, off);
        const Matrix want = dense_attention_oracle(seg, w);
        const Matrix got_rows = concat_rows(got.left, got.center, got.right);

        double max_err = 0.0;
        for (std::size_t i = 0; i < want.rows(); ++i)
          for (std::size_t j = 0; j < want.cols(); ++j)
            max_err = std::max(max_err, std::abs(static_cast<double>(got_rows.at(i, j)) -
                                                 static_cast<double>(want.at(i, j))));
        c.expect(got_rows.rows() == want.rows(), "case seed " + std::to_string(seed) +
                                                     ": row count mismatch");
        c.expect(max_err <= 1e-5, "case seed " + std::to_string(seed) + " (d=" +
                                      std::to_string(sh.d) + "): max abs error " + fnum(max_err));
      }
    }
  });
}

CheckResult check_rnnt_oracle() {
  return run_check(8, "transducer-loss-oracle", 10.0, [](Checker& c) {
    const std::size_t classes = 5;  // V=4 plus blank
    const Vocab voc{4};
    const PredictorWeights pw = synth_predictor_weights(0x9100, voc);
    const JoinerWeights jw = synth_joiner_weights(0x9200, voc, 16);
    const Predictor predictor(pw, voc);
    const Joiner joiner(jw, voc);

    for (std::size_t T = 1; T <= 4; ++T) {
      for (std::size_t U = 0; U <= 3; ++U) {
        for (int seed = 1; seed <= 5; ++seed) {
          SplitMix64 rng(0x7000 + T * 100 + U * 10 + static_cast<std::uint64_t>(seed));
          std::vector<int> targets(U);
          for (auto& t : targets) t = static_cast<int>(rng.next() % 4);

          RnntLattice lat;
          if (seed < 5) {
            lat = make_direct_lattice(rng.next(), T, U, classes);
          } else {
            const Matrix enc = synth_matrix(rng.next(), T, 16, -1.0f, 1.0f);
            lat = make_rnnt_lattice(enc, predictor, joiner, targets);
          }
          const double dp = rnnt_loss(lat, targets).loss;
          const double brute = -std::log(enumerate_paths(lat, targets, 0, 0));
          c.expect(std::abs(dp - brute) <= 1e-6,
                   "T=" + std::to_string(T) + " U=" + std::to_string(U) + " seed " +
                       std::to_string(seed) + ": dp " + fnum(dp) + " vs enumeration " +
                       fnum(brute));
        }

        // Uniform distributions: the alignment count times the per-path
        // probability gives the loss in closed form.
        RnntLattice uni;
        uni.frames = T;
        uni.target_len = U;
        uni.classes = classes;
        uni.log_probs.assign(T * (U + 1) * classes, -std::log(5.0));
        std::vector<int> targets(U, 1);
        double binom = 1.0;
        for (std::size_t i = 1; i <= U; ++i)
          binom = binom * static_cast<double>(T + i) / static_cast<double>(i);
        const double want = static_cast<double>(T + U) * std::log(5.0) - std::log(binom);
        const double got = rnnt_loss(uni, targets).loss;
        c.expect(std::abs(got - want) <= 1e-9, "uniform T=" + std::to_string(T) +
                                                   " U=" + std::to_string(U) + ": loss " +
                                                   fnum(got) + " vs closed form " + fnum(want));
      }
    }
  });
}

CheckResult check_rnnt_gradient() {
  return run_check(9, "transducer-gradient", 10.0, [](Checker& c) {
    const double eps = 1e-4;
    for (int i = 0; i < 10; ++i) {
      const std::size_t T = 2 + static_cast<std::size_t>(i) % 3;
      const std::size_t U = 1 + static_cast<std::size_t>(i) % 3;
      SplitMix64 rng(0x6a4d + static_cast<std::uint64_t>(i));
      std::vector<int> targets(U);
      for (auto& t : targets) t = static_cast<int>(rng.next() % 4);
      RnntLattice lat = make_direct_lattice(rng.next(), T, U, 5);

      const RnntLoss analytic = rnnt_loss(lat, targets);
      double max_rel = 0.0;
      for (std::size_t e = 0; e < lat.log_probs.size(); ++e) {
        const double saved = lat.log_probs[e];
        lat.log_probs[e] = saved + eps;
        const double up = rnnt_loss(lat, targets).loss;
        lat.log_probs[e] = saved - eps;
        const double down = rnnt_loss(lat, targets).loss;
        lat.log_probs[e] = saved;
        const double fd = (up - down) / (2.0 * eps);
        const double a = analytic.grad[e];
        const double rel = std::abs(a - fd) / std::max({1e-8, std::abs(a), std::abs(fd)});
        max_rel = std::max(max_rel, rel);
      }
      c.expect(max_rel <= 1e-3, "lattice " + std::to_string(i) + ": max relative error " +
                                    fnum(max_rel));
    }
  });
}

CheckResult check_decoder_sanity() {
  return run_check(10, "decoder-sanity", 10.0, [](Checker& c) {
    const Vocab voc{1024};
    const PredictorWeights pw = synth_predictor_weights(0x0700, voc);
    const JoinerWeights jw = synth_joiner_weights(0x0800, voc, 32);
    const Predictor predictor(pw, voc);
    const Joiner joiner(jw, voc);

    SplitMix64 rng(0xdec0de);
    for (int u = 0; u < 20; ++u) {
      const std::size_t frames = 4 + rng.next() % 7;
      const Matrix enc = synth_matrix(7000 + static_cast<std::uint64_t>(u), frames, 32, -1.0f, 1.0f);
      const ModelScorer scorer(enc, predictor, joiner);
      const auto greedy = greedy_decode(scorer, 8);
      const auto beam = beam_decode(scorer, 1, 8);
      c.expect(!beam.empty() && beam[0].tokens == greedy,
               "utterance " + std::to_string(u) + ": width-1 beam differs from greedy");
    }

    const UniformLm uniform(voc.size);
    for (int u = 0; u < 5; ++u) {
      const Matrix enc = synth_matrix(7600 + static_cast<std::uint64_t>(u), 5 + static_cast<std::size_t>(u), 32, -1.0f, 1.0f);
      const ModelScorer scorer(enc, predictor, joiner);
      const auto plain = beam_decode(scorer, 3, 8);
      const auto fused0 = beam_decode(scorer, 3, 8, &uniform, 0.0);
      bool same = plain.size() == fused0.size();
      for (std::size_t i = 0; same && i < plain.size(); ++i)
        same = plain[i].tokens == fused0[i].tokens && plain[i].score == fused0[i].score;
      c.expect(same, "utterance " + std::to_string(u) + ": lambda=0 fusion changed the n-best");
    }

    // One frame, two tokens in an exact acoustic tie. Unfused search must
    // break toward the lower token id; a bigram trained on token 1 must
    // flip the winner once fused.
    TableScorer table(1, 4);
    table.set_default({0.01, 0.01, 0.01, 0.97});
    table.set_dist(0, {}, {0.45, 0.45, 0.04, 0.06});
    const auto greedy_tie = greedy_decode(table, 8);
    c.expect(greedy_tie == std::vector<int>{0}, "tie case: greedy picked a different token");
    const auto beam_tie = beam_decode(table, 1, 8);
    c.expect(!beam_tie.empty() && beam_tie[0].tokens == greedy_tie,
             "tie case: width-1 beam differs from greedy");
    const auto plain = beam_decode(table, 2, 8);
    c.expect(!plain.empty() && plain[0].tokens == std::vector<int>{0},
             "tie case: unfused beam did not pick token 0");

    CountBigramLm bigram(3);
    const std::vector<int> sentence{1};
    for (int i = 0; i < 9; ++i) bigram.add_sentence(sentence);
    const auto fused = beam_decode(table, 2, 8, &bigram, 0.25);
    c.expect(!fused.empty() && fused[0].tokens == std::vector<int>{1},
             "tie case: biased bigram did not flip the winner to token 1");
  });
}

CheckResult check_subsampling_law() {
  return run_check(11, "subsampling-law", 5.0, [](Checker& c) {
    for (std::size_t t = 1; t <= 1000; ++t) {
      const std::size_t half = (t + 1) / 2;       // ceil(t / 2)
      const std::size_t want = (half + 1) / 2;    // ceil(half / 2)
      c.expect(vgg_output_length(t) == want,
               "T=" + std::to_string(t) + ": length " + std::to_string(vgg_output_length(t)) +
                   " != " + std::to_string(want));
    }

    const EncoderConfig cfg = small_encoder_config();
    ModelWeights model = make_model(cfg, Vocab{4});
    init_uniform(model, 0x5b5a);

    // Frame-at-a-time front end: after t raw frames exactly the prefix-stable
    // rows are out, and finalize tops the total up to the closed form.
    const Matrix feats = synth_features(0x11a7, 1000);
    VggStream stream(model.encoder, cfg.model_dim);
    bool prefix_ok = true;
    for (std::size_t i = 0; i < 1000; ++i) {
      stream.push(feats.slice_rows(i, i + 1));
      if (stream.frames_out() != vgg_stable_length(i + 1)) prefix_ok = false;
    }
    c.expect(prefix_ok, "incremental emission count left the prefix-stable law");
    stream.finalize();
    c.expect(stream.frames_out() == vgg_output_length(1000),
             "finalize emitted " + std::to_string(stream.frames_out()) + " of " +
                 std::to_string(vgg_output_length(1000)) + " rows");

    for (std::size_t t : {1u, 2u, 3u, 4u, 5u, 6u, 7u, 8u, 9u, 10u, 11u, 12u, 63u, 64u, 65u,
                          127u, 128u}) {
      const Matrix out = vgg_subsample(synth_features(0x2000 + t, t), model.encoder, cfg.model_dim);
      c.expect(out.rows() == vgg_output_length(t),
               "T=" + std::to_string(t) + ": one-shot front end emitted " +
                   std::to_string(out.rows()) + " rows");
    }
  });
}

CheckResult check_kernel_invariants() {
  return run_check(0, "kernel-invariants", 20.0, [](Checker& c) {
    SplitMix64 rng(0x4e71);

    for (std::size_t len : {1u, 2u, 3u, 7u, 64u, 512u, 4096u}) {
      const Matrix logits = synth_matrix(rng.next(), 3, len, -20.0f, 20.0f);
      const Matrix probs = softmax_rows(logits);
      for (std::size_t i = 0; i < probs.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < len; ++j) sum += probs.at(i, j);
        c.expect(std::abs(sum - 1.0) <= 1e-6,
                 "softmax row of length " + std::to_string(len) + " sums to " + fnum(sum));
      }
    }
    Matrix masked(1, 3);
    masked.at(0, 0) = 0.0f;
    masked.at(0, 1) = -std::numeric_limits<float>::infinity();
    masked.at(0, 2) = std::log(3.0f);
    const Matrix mprobs = softmax_rows(masked);
    c.expect(mprobs.at(0, 1) == 0.0f, "softmax of -inf is not exactly 0");
    c.expect(std::abs(mprobs.at(0, 2) - 0.75f) <= 1e-6f, "softmax masked row misweighted");

    const std::size_t d = 32;
    const Matrix gain = synth_matrix(rng.next(), 1, d, 0.5f, 1.5f);
    const Matrix bias = synth_matrix(rng.next(), 1, d, -0.5f, 0.5f);
    const Matrix x = synth_matrix(rng.next(), 8, d, -1.0f, 1.0f);
    const Matrix base = layer_norm(x, gain.row_span(0), bias.row_span(0), kLayerNormEps);
    for (float shift : {0.5f, 1.0f}) {
      Matrix shifted = x;
      for (float& v : shifted.data()) v += shift;
      const Matrix out = layer_norm(shifted, gain.row_span(0), bias.row_span(0), kLayerNormEps);
      double max_err = 0.0;
      for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < d; ++j)
          max_err = std::max(max_err,
                             std::abs(static_cast<double>(out.at(i, j)) - base.at(i, j)));
      c.expect(max_err <= 1e-6,
               "layer norm shift by " + fnum(shift) + " moved outputs by " + fnum(max_err));
    }

    const Matrix kx = synth_matrix(rng.next(), 10, 16, -1.0f, 1.0f);
    const Matrix ky = synth_matrix(rng.next(), 10, 16, -1.0f, 1.0f);
    const Matrix kern = synth_matrix(rng.next(), 16, 6, -0.5f, 0.5f);
    const float a = 0.75f, b = -0.5f;
    Matrix mix(10, 16);
    for (std::size_t i = 0; i < mix.size(); ++i)
      mix.data()[i] = a * kx.data()[i] + b * ky.data()[i];
    const Matrix conv_mix = depthwise_conv1d_padded(mix, kern);
    const Matrix cx = depthwise_conv1d_padded(kx, kern);
    const Matrix cy = depthwise_conv1d_padded(ky, kern);
    double lin_err = 0.0;
    for (std::size_t i = 0; i < conv_mix.size(); ++i)
      lin_err = std::max(lin_err, std::abs(static_cast<double>(conv_mix.data()[i]) -
                                           (static_cast<double>(a) * cx.data()[i] +
                                            static_cast<double>(b) * cy.data()[i])));
    c.expect(lin_err <= 1e-6, "depthwise convolution linearity error " + fnum(lin_err));

    for (int rep = 0; rep < 5; ++rep) {
      const Matrix A = synth_matrix(rng.next(), 4, 4, -0.5f, 0.5f);
      const Matrix B = synth_matrix(rng.next(), 4, 4, -0.5f, 0.5f);
      const Matrix C = synth_matrix(rng.next(), 4, 4, -0.5f, 0.5f);
      const Matrix left = matmul(matmul(A, B), C);
      const Matrix right = matmul(A, matmul(B, C));
      double err = 0.0;
      for (std::size_t i = 0; i < left.size(); ++i)
        err = std::max(err, std::abs(static_cast<double>(left.data()[i]) - right.data()[i]));
      c.expect(err <= 1e-5, "matmul associativity error " + fnum(err));
    }
  });
}

CheckResult check_attention_invariants() {
  return run_check(0, "attention-invariants", 20.0, [](Checker& c) {
    const std::size_t d = 32, heads = 4;
    const auto w = make_attention_weights(0xa11e, d, heads);
    const auto seg = make_segment(0xbee, 4, 8, 2, d);

    // Queries come only from the segment frames plus the summary row, no
    // matter how many memory slots exist; keys and values put memory first.
    MemoryBank mem(d);
    SplitMix64 rng(0x17);
    for (int i = 0; i < 3; ++i) {
      std::vector<float> slot(d);
      for (auto& v : slot) v = rng.next_uniform(-1.0f, 1.0f);
      mem.push(std::move(slot));
    }
    const Matrix q = build_query(seg, w.wq);
    c.expect(q.rows() == seg.frame_rows() + 1, "query row count depends on memory");
    const auto [k, v] = build_key_value(seg, mem, w.wk, w.wv);
    c.expect(k.rows() == mem.size() + seg.frame_rows() && v.rows() == k.rows(),
             "key/value row count wrong");
    const Matrix mem_rows = mem.as_matrix();
    const Matrix mem_keys = matmul(mem_rows, [&] {
      Matrix wt(w.wk.cols(), w.wk.rows());
      for (std::size_t i = 0; i < w.wk.rows(); ++i)
        for (std::size_t j = 0; j < w.wk.cols(); ++j) wt.at(j, i) = w.wk.at(i, j);
      return wt;
    }());
    const Matrix lead = k.slice_rows(0, mem.size());
    double mem_err = 0.0;
    for (std::size_t i = 0; i < lead.size(); ++i)
      mem_err = std::max(mem_err, std::abs(static_cast<double>(lead.data()[i]) -
                                           static_cast<double>(mem_keys.data()[i])));
    c.expect(mem_err <= 1e-6, "memory keys are not the leading rows, error " + fnum(mem_err));

    const auto bias = build_head_bias(w, mem.size(), 4, 8, 2);
    const auto res = attend(q, k, v, heads, w.wout, SuppressionConfig{0.5f, true}, &bias);
    c.expect(res.out.rows() == q.rows() && res.out.cols() == d, "attend output shape wrong");
    c.expect(res.probs.size() == heads, "attend must report one probability matrix per head");
    bool sums_ok = true, any_zero = false;
    for (const auto& pm : res.probs) {
      if (pm.rows() != q.rows() || pm.cols() != k.rows()) sums_ok = false;
      for (std::size_t i = 0; i < pm.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < pm.cols(); ++j) {
          s += pm.at(i, j);
          if (pm.at(i, j) == 0.0f) any_zero = true;
        }
        if (std::abs(s - 1.0) > 1e-6) sums_ok = false;
      }
    }
    c.expect(sums_ok, "suppressed attention rows do not renormalize to 1");
    c.expect(any_zero, "suppression on random rows produced no exact zeros");

    // A layer pass preserves the context shape and appends exactly one slot.
    MemoryBank layer_mem(d);
    const SegmentInput out = augmem_layer_forward(seg, layer_mem, w, SuppressionConfig{});
    c.expect(out.left.rows() == seg.left.rows() && out.center.rows() == seg.center.rows() &&
                 out.right.rows() == seg.right.rows() && out.dim() == d,
             "layer pass changed the segment shape");
    c.expect(layer_mem.size() == 1, "layer pass must append exactly one memory slot");

    // FIFO eviction at the cap: the bank keeps the newest slots in order.
    MemoryBank fifo(2, std::size_t{2});
    std::vector<std::vector<float>> pushed;
    for (int i = 0; i < 5; ++i) {
      std::vector<float> slot = {static_cast<float>(i), static_cast<float>(-i)};
      pushed.push_back(slot);
      fifo.push(std::move(slot));
      c.expect(fifo.size() == std::min<std::size_t>(i + 1, 2), "capped bank size wrong");
    }
    c.expect(std::equal(fifo.slot(0).begin(), fifo.slot(0).end(), pushed[3].begin()) &&
                 std::equal(fifo.slot(1).begin(), fifo.slot(1).end(), pushed[4].begin()),
             "capped bank did not keep the newest slots in order");

    // Same inputs, fresh state: a block is deterministic to the bit.
    EncoderConfig cfg = small_encoder_config();
    ModelWeights model = make_model(cfg, Vocab{4});
    init_uniform(model, 0xd00d);
    const auto seg32 = make_segment(0x5e9, cfg.left, cfg.center, cfg.right, cfg.model_dim);
    MemoryBank bank_a(cfg.model_dim), bank_b(cfg.model_dim);
    const SegmentInput on_a = conformer_block(seg32, bank_a, model.encoder.layers[0], cfg);
    const SegmentInput on_b = conformer_block(seg32, bank_b, model.encoder.layers[0], cfg);
    c.expect(on_a.left == on_b.left && on_a.center == on_b.center && on_a.right == on_b.right,
             "repeated block run is not bit-identical");
    c.expect(bank_a.as_matrix() == bank_b.as_matrix(), "repeated block run diverged in memory");
  });
}

CheckResult check_streaming_invariants() {
  return run_check(0, "streaming-invariants", 40.0, [](Checker& c) {
    const EncoderConfig cfg = small_encoder_config();
    ModelWeights model = make_model(cfg, Vocab{4});
    init_uniform(model, 0x57e4);

    // Conservation: every encoder frame is emitted exactly once, across
    // arbitrary push splits, and memory grows one slot per segment.
    SplitMix64 rng(0xc0);
    for (int rep = 0; rep < 4; ++rep) {
      const std::size_t total = 40 + rng.next() % 200;
      const Matrix frames = synth_matrix(rng.next(), total, cfg.model_dim, -1.0f, 1.0f);
      EncoderStream stream(model.encoder, cfg);
      Matrix out;
      std::size_t at = 0;
      while (at < total) {
        const std::size_t step = std::min<std::size_t>(1 + rng.next() % 50, total - at);
        out.append_rows(stream.push(frames.slice_rows(at, at + step)));
        at += step;
      }
      out.append_rows(stream.finalize());
      c.expect(out.rows() == total, "conservation: emitted " + std::to_string(out.rows()) +
                                        " of " + std::to_string(total) + " frames");
      for (std::size_t slots : stream.memory_slot_counts())
        c.expect(slots == stream.segments_emitted(),
                 "uncapped memory should hold one slot per segment");
    }

    // Session isolation: 64 sessions fed round-robin must each match a solo
    // run of the same utterance to the bit.
    const std::size_t kSessions = 64;
    std::vector<std::size_t> lengths(kSessions);
    std::vector<Matrix> feats(kSessions);
    std::vector<Matrix> solo(kSessions);
    for (std::size_t s = 0; s < kSessions; ++s) {
      lengths[s] = 50 + rng.next() % 71;
      feats[s] = synth_features(0x4000 + s, lengths[s]);
      StreamSession session(model.encoder, cfg);
      solo[s] = session.push_features(feats[s]);
      solo[s].append_rows(session.finalize());
    }
    std::vector<StreamSession> sessions;
    sessions.reserve(kSessions);
    for (std::size_t s = 0; s < kSessions; ++s) sessions.emplace_back(model.encoder, cfg);
    std::vector<Matrix> outs(kSessions);
    std::vector<std::size_t> cursor(kSessions, 0);
    bool pending = true;
    while (pending) {
      pending = false;
      for (std::size_t s = 0; s < kSessions; ++s) {
        if (cursor[s] >= lengths[s]) continue;
        const std::size_t step = std::min<std::size_t>(1 + rng.next() % 32, lengths[s] - cursor[s]);
        outs[s].append_rows(sessions[s].push_features(feats[s].slice_rows(cursor[s], cursor[s] + step)));
        cursor[s] += step;
        pending = true;
      }
    }
    std::size_t interleave_mismatch = 0;
    for (std::size_t s = 0; s < kSessions; ++s) {
      outs[s].append_rows(sessions[s].finalize());
      if (!(outs[s] == solo[s])) ++interleave_mismatch;
    }
    c.expect(interleave_mismatch == 0, std::to_string(interleave_mismatch) + " of " +
                                           std::to_string(kSessions) +
                                           " interleaved sessions diverged from solo runs");

    // Two sessions on two threads share the same read-only weights.
    Matrix threaded[2];
    std::thread t0([&] {
      StreamSession session(model.encoder, cfg);
      threaded[0] = session.push_features(feats[0]);
      threaded[0].append_rows(session.finalize());
    });
    std::thread t1([&] {
      StreamSession session(model.encoder, cfg);
      threaded[1] = session.push_features(feats[1]);
      threaded[1].append_rows(session.finalize());
    });
    t0.join();
    t1.join();
    c.expect(threaded[0] == solo[0] && threaded[1] == solo[1],
             "threaded sessions diverged from solo runs");

    // Determinism: one utterance, two fresh sessions, identical bits.
    StreamSession again(model.encoder, cfg);
    Matrix rerun = again.push_features(feats[2]);
    rerun.append_rows(again.finalize());
    c.expect(rerun == solo[2], "repeated session run is not bit-identical");
  });
}

CheckResult check_transducer_invariants() {
  return run_check(0, "transducer-invariants", 20.0, [](Checker& c) {
    // Total alignment probability for one fixed target never exceeds 1, and
    // a lattice that routes all mass through blank reaches it exactly.
    SplitMix64 rng(0xc0de);
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<int> targets = {static_cast<int>(rng.next() % 4),
                                  static_cast<int>(rng.next() % 4)};
      RnntLattice lat = make_direct_lattice(rng.next(), 3, 2, 5);
      const double loss = rnnt_loss(lat, targets).loss;
      c.expect(std::exp(-loss) <= 1.0 + 1e-12,
               "alignment mass " + fnum(std::exp(-loss)) + " exceeds 1");
      const double brute = enumerate_paths(lat, targets, 0, 0);
      c.expect(brute <= 1.0 + 1e-12, "enumerated mass " + fnum(brute) + " exceeds 1");
    }
    RnntLattice all_blank;
    all_blank.frames = 3;
    all_blank.target_len = 0;
    all_blank.classes = 5;
    all_blank.log_probs.assign(3 * 1 * 5, -1e30);
    for (std::size_t t = 0; t < 3; ++t) all_blank.lp(t, 0, 4) = 0.0;
    const std::vector<int> empty_targets;
    const double sure = rnnt_loss(all_blank, empty_targets).loss;
    c.expect(std::abs(sure) <= 1e-12, "certain-blank lattice loss " + fnum(sure) + " != 0");

    // The joiner output is a normalized log distribution even under tanh
    // saturation.
    const Vocab voc{4};
    const JoinerWeights jw16 = synth_joiner_weights(0x3300, voc, 16);
    const Joiner joiner(jw16, voc);
    for (float scale : {1.0f, 50.0f}) {
      std::vector<float> f(kJointDim), g(kJointDim);
      SplitMix64 jr(0x77 + static_cast<std::uint64_t>(scale));
      for (auto& x : f) x = jr.next_uniform(-scale, scale);
      for (auto& x : g) x = jr.next_uniform(-scale, scale);
      const auto dist = joiner.join(f, g);
      bool finite = true;
      for (float x : dist) finite = finite && std::isfinite(x);
      c.expect(finite, "joiner log distribution has non-finite entries");
      c.expect(std::abs(logsumexp(dist)) <= 1e-6,
               "joiner log distribution off normalization by " + fnum(logsumexp(dist)));
    }

    // Widening the beam never lowers the best hypothesis score on these
    // fixed inputs, and fused scores decompose additively.
    const PredictorWeights pw = synth_predictor_weights(0x3400, voc);
    const JoinerWeights jw32 = synth_joiner_weights(0x3500, voc, 32);
    const Predictor predictor(pw, voc);
    const Joiner joiner32(jw32, voc);
    const UniformLm uniform(voc.size);
    for (int u = 0; u < 5; ++u) {
      const Matrix enc = synth_matrix(0x3a00 + static_cast<std::uint64_t>(u), 6, 32, -1.0f, 1.0f);
      const ModelScorer scorer(enc, predictor, joiner32);
      double prev = -std::numeric_limits<double>::infinity();
      for (std::size_t width = 1; width <= 4; ++width) {
        const auto hyps = beam_decode(scorer, width, 4);
        c.expect(!hyps.empty() && hyps[0].score >= prev - 1e-12,
                 "utterance " + std::to_string(u) + ": top score fell from " + fnum(prev) +
                     " to " + fnum(hyps[0].score) + " at width " + std::to_string(width));
        if (!hyps.empty()) prev = std::max(prev, hyps[0].score);
      }
      for (const auto& hyp : beam_decode(scorer, 3, 4, &uniform, 0.25)) {
        c.expect(std::abs(hyp.score - (hyp.acoustic + 0.25 * hyp.lm_score)) <= 1e-9,
                 "fused score does not decompose into acoustic + lambda * lm");
        double walked = 0.0;
        std::vector<int> prefix;
        for (int tok : hyp.tokens) {
          walked += uniform.score(prefix, tok);
          prefix.push_back(tok);
        }
        c.expect(std::abs(hyp.lm_score - walked) <= 1e-9,
                 "reported lm score differs from a rescoring walk");
      }
    }
  });
}

CheckResult check_config_invariants() {
  return run_check(0, "config-invariants", 10.0, [](Checker& c) {
    const RunConfig defaults;
    c.expect(RunConfig::parse(defaults.serialize()) == defaults,
             "default config does not round-trip");

    RunConfig custom;
    custom.arch = "transformer";
    custom.size = "M";
    custom.segmenter.left = 8;
    custom.segmenter.center = 16;
    custom.segmenter.right = 4;
    custom.gamma = 0.25f;
    custom.was_enabled = false;
    custom.memory_cap = 5;
    custom.decode.mode = "fusion";
    custom.decode.beam = 7;
    custom.decode.lambda = 0.1;
    custom.seed = 42;
    custom.paths.weights = "model.scrt";
    custom.paths.tokens = "tokens.txt";
    custom.paths.lm_text = "lm.txt";
    c.expect(RunConfig::parse(custom.serialize()) == custom,
             "customized config does not round-trip");

    const auto enc = custom.encoder_config();
    c.expect(enc.variant == EncoderVariant::transformer && enc.model_dim == 288 &&
                 enc.left == 8 && enc.center == 16 && enc.right == 4 &&
                 enc.suppression.gamma == 0.25f && !enc.suppression.enabled &&
                 enc.memory_cap == std::optional<std::size_t>{5},
             "encoder config does not reflect the run config");
    c.expect(lookahead_ms(custom.segmenter) == 160.0, "modified lookahead law broken");

    for (const char* bad : {
             R"({"model":{"arch":"conformer"},"unexpected":1})",
             R"({"decode":{"beam":2,"surprise":true}})",
             R"({"decode":{"beam":"four"}})",
             R"({"decode":{"beam":0}})",
             R"({"gamma":-0.5})",
             R"({"model":{"arch":"rnn"}})",
             "not json",
         }) {
      bool threw = false;
      try {
        RunConfig::parse(bad);
      } catch (const ConfigError&) {
        threw = true;
      }
      c.expect(threw, std::string("malformed config accepted: ") + bad);
    }

    const struct {
      EncoderVariant variant;
      char size;
      std::size_t dim;
    } presets[] = {
        {EncoderVariant::conformer, 'S', 144},
        {EncoderVariant::conformer, 'M', 256},
        {EncoderVariant::transformer, 'S', 160},
        {EncoderVariant::transformer, 'M', 288},
    };
    for (const auto& p : presets) {
      const auto cfg = EncoderConfig::preset(p.variant, p.size);
      c.expect(cfg.model_dim == p.dim && cfg.num_layers == 16 && cfg.heads == 4 &&
                   cfg.left == 16 && cfg.center == 32 && cfg.right == 8,
               std::string("preset table wrong for size ") + p.size);
    }

    const EncoderConfig small = small_encoder_config();
    const ModelWeights model = make_model(small, Vocab{8});
    c.expect(param_count(model) == param_count(small, Vocab{8}),
             "parameter count overloads disagree");
  });
}

std::vector<CheckResult> run_all() {
  return {
      check_param_counts(),   check_lookahead(),        check_was_suite(),
      check_causality(),      check_chunk_invariance(), check_memory_law(),
      check_dense_equivalence(), check_rnnt_oracle(),   check_rnnt_gradient(),
      check_decoder_sanity(), check_subsampling_law(),
  };
}

std::vector<CheckResult> run_suite(const std::string& name) {
  if (name == "was") return {check_was_suite(), check_kernel_invariants()};
  if (name == "causality")
    return {check_causality(), check_dense_equivalence(), check_attention_invariants()};
  if (name == "chunking")
    return {check_chunk_invariance(), check_memory_law(), check_subsampling_law(),
            check_streaming_invariants()};
  if (name == "rnnt")
    return {check_rnnt_oracle(), check_rnnt_gradient(), check_decoder_sanity(),
            check_transducer_invariants()};
  if (name == "params")
    return {check_param_counts(), check_lookahead(), check_config_invariants()};
  throw ConfigError("unknown verify suite '" + name +
                    "', expected was, causality, chunking, rnnt, or params");
}

}  // namespace scrt
