#include "scrt/transducer.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <string>

#include "scrt/errors.hpp"

namespace scrt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_token(int token, const Vocab& vocab) {
  if (token < 0 || static_cast<std::size_t>(token) >= vocab.size)
    throw std::out_of_range("token id " + std::to_string(token) + " outside vocab of " +
                            std::to_string(vocab.size));
}

}  // namespace

Predictor::Predictor(const PredictorWeights& w, Vocab vocab) : w_(&w), vocab_(vocab) {
  if (w.embedding.rows() != vocab.size + 1 || w.embedding.cols() != kEmbedDim)
    throw ShapeError("predictor embedding must be (vocab+1) x 256");
  if (w.lstm_wx.rows() != 4 * kPredHidden || w.lstm_wx.cols() != kEmbedDim ||
      w.lstm_wh.rows() != 4 * kPredHidden || w.lstm_wh.cols() != kPredHidden ||
      w.lstm_b.cols() != 4 * kPredHidden)
    throw ShapeError("predictor LSTM weights have unexpected shape");
  if (w.proj_w.rows() != kJointDim || w.proj_w.cols() != kPredHidden ||
      w.proj_b.cols() != kJointDim)
    throw ShapeError("predictor projection must be 640 x 320");
}

void Predictor::step(PredictorState& state, std::size_t embedding_row) const {
  const float* x = w_->embedding.row(embedding_row);
  std::vector<double> pre(4 * kPredHidden);
  for (std::size_t g = 0; g < 4 * kPredHidden; ++g) {
    double acc = w_->lstm_b.at(0, g);
    const float* wx = w_->lstm_wx.row(g);
    for (std::size_t e = 0; e < kEmbedDim; ++e)
      acc += static_cast<double>(wx[e]) * static_cast<double>(x[e]);
    const float* wh = w_->lstm_wh.row(g);
    for (std::size_t j = 0; j < kPredHidden; ++j)
      acc += static_cast<double>(wh[j]) * static_cast<double>(state.h[j]);
    pre[g] = acc;
  }
  for (std::size_t j = 0; j < kPredHidden; ++j) {
    const double i = sigmoid(pre[j]);
    const double f = sigmoid(pre[kPredHidden + j]);
    const double g = std::tanh(pre[2 * kPredHidden + j]);
    const double o = sigmoid(pre[3 * kPredHidden + j]);
    const double c = f * static_cast<double>(state.c[j]) + i * g;
    state.c[j] = static_cast<float>(c);
    state.h[j] = static_cast<float>(o * std::tanh(c));
  }
}

PredictorState Predictor::start() const {
  PredictorState s;
  s.h.assign(kPredHidden, 0.0f);
  s.c.assign(kPredHidden, 0.0f);
  step(s, vocab_.sos_row());
  return s;
}

void Predictor::advance(PredictorState& state, int token) const {
  check_token(token, vocab_);
  step(state, static_cast<std::size_t>(token));
}

std::vector<float> Predictor::output(const PredictorState& state) const {
  std::vector<float> out(kJointDim);
  for (std::size_t o = 0; o < kJointDim; ++o) {
    double acc = w_->proj_b.at(0, o);
    const float* wr = w_->proj_w.row(o);
    for (std::size_t j = 0; j < kPredHidden; ++j)
      acc += static_cast<double>(wr[j]) * static_cast<double>(state.h[j]);
    out[o] = static_cast<float>(acc);
  }
  return out;
}

std::pair<std::vector<float>, PredictorState> Predictor::forward(
    std::span<const int> prefix) const {
  PredictorState s = start();
  for (int t : prefix) advance(s, t);
  return {output(s), std::move(s)};
}

Joiner::Joiner(const JoinerWeights& w, Vocab vocab) : w_(&w), vocab_(vocab) {
  if (w.enc_proj_w.rows() != kJointDim || w.enc_proj_b.cols() != kJointDim)
    throw ShapeError("joiner encoder projection must map d -> 640");
  if (w.out_w.rows() != vocab.num_classes() || w.out_w.cols() != kJointDim ||
      w.out_b.cols() != vocab.num_classes())
    throw ShapeError("joiner output must be (vocab+1) x 640");
}

std::vector<float> Joiner::project_encoder(std::span<const float> encoder_row) const {
  if (encoder_row.size() != w_->enc_proj_w.cols())
    throw ShapeError("encoder row width " + std::to_string(encoder_row.size()) +
                     " != " + std::to_string(w_->enc_proj_w.cols()));
  std::vector<float> out(kJointDim);
  for (std::size_t o = 0; o < kJointDim; ++o) {
    double acc = w_->enc_proj_b.at(0, o);
    const float* wr = w_->enc_proj_w.row(o);
    for (std::size_t k = 0; k < encoder_row.size(); ++k)
      acc += static_cast<double>(wr[k]) * static_cast<double>(encoder_row[k]);
    out[o] = static_cast<float>(acc);
  }
  return out;
}

std::vector<float> Joiner::join(std::span<const float> f, std::span<const float> g) const {
  if (f.size() != kJointDim || g.size() != kJointDim)
    throw ShapeError("join inputs must both be 640-dim");
  std::vector<double> t(kJointDim);
  for (std::size_t j = 0; j < kJointDim; ++j)
    t[j] = std::tanh(static_cast<double>(f[j]) + static_cast<double>(g[j]));
  const std::size_t n = vocab_.num_classes();
  std::vector<double> logits(n);
  double mx = kNegInf;
  for (std::size_t k = 0; k < n; ++k) {
    double acc = w_->out_b.at(0, k);
    const float* wr = w_->out_w.row(k);
    for (std::size_t j = 0; j < kJointDim; ++j) acc += static_cast<double>(wr[j]) * t[j];
    logits[k] = acc;
    mx = std::max(mx, acc);
  }
  double denom = 0.0;
  for (std::size_t k = 0; k < n; ++k) denom += std::exp(logits[k] - mx);
  const double lse = mx + std::log(denom);
  std::vector<float> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<float>(logits[k] - lse);
  return out;
}

void RnntLattice::validate(std::span<const int> targets) const {
  if (frames == 0) throw ShapeError("lattice needs at least one frame");
  if (classes < 2) throw ShapeError("lattice needs at least two classes");
  if (targets.size() != target_len)
    throw ShapeError("target length " + std::to_string(targets.size()) +
                     " != lattice target_len " + std::to_string(target_len));
  if (log_probs.size() != frames * (target_len + 1) * classes)
    throw ShapeError("lattice log_probs has wrong size");
  for (int y : targets)
    if (y < 0 || static_cast<std::size_t>(y) + 1 >= classes)
      throw std::out_of_range("target id " + std::to_string(y) + " outside vocab of " +
                              std::to_string(classes - 1));
}

RnntLattice make_rnnt_lattice(const Matrix& encoder_out, const Predictor& predictor,
                              const Joiner& joiner, std::span<const int> targets) {
  if (encoder_out.rows() == 0) throw ShapeError("make_rnnt_lattice: no encoder frames");
  RnntLattice lat;
  lat.frames = encoder_out.rows();
  lat.target_len = targets.size();
  lat.classes = joiner.vocab().num_classes();
  lat.log_probs.resize(lat.frames * (lat.target_len + 1) * lat.classes);

  std::vector<std::vector<float>> g(lat.target_len + 1);
  PredictorState s = predictor.start();
  g[0] = predictor.output(s);
  for (std::size_t u = 0; u < lat.target_len; ++u) {
    predictor.advance(s, targets[u]);
    g[u + 1] = predictor.output(s);
  }

  for (std::size_t t = 0; t < lat.frames; ++t) {
    const std::vector<float> f = joiner.project_encoder(encoder_out.row_span(t));
    for (std::size_t u = 0; u <= lat.target_len; ++u) {
      const std::vector<float> dist = joiner.join(f, g[u]);
      for (std::size_t k = 0; k < lat.classes; ++k) lat.lp(t, u, k) = dist[k];
    }
  }
  return lat;
}

RnntLoss rnnt_loss(RnntLattice& lat, std::span<const int> targets) {
  lat.validate(targets);
  const std::size_t T = lat.frames;
  const std::size_t U = lat.target_len;
  const std::size_t blank = lat.classes - 1;
  const auto tl = [&](std::size_t t) { return std::min(t, T - 1); };  // label-time clamp

  lat.alpha.assign((T + 1) * (U + 1), kNegInf);
  lat.beta.assign((T + 1) * (U + 1), kNegInf);
  auto a = [&](std::size_t t, std::size_t u) -> double& { return lat.alpha[t * (U + 1) + u]; };
  auto bt = [&](std::size_t t, std::size_t u) -> double& { return lat.beta[t * (U + 1) + u]; };

  a(0, 0) = 0.0;
  for (std::size_t t = 0; t <= T; ++t) {
    for (std::size_t u = 0; u <= U; ++u) {
      if (t == 0 && u == 0) continue;
      double v = kNegInf;
      if (t > 0) v = log_add(v, a(t - 1, u) + lat.lp(t - 1, u, blank));
      if (u > 0) v = log_add(v, a(t, u - 1) + lat.lp(tl(t), u - 1, targets[u - 1]));
      a(t, u) = v;
    }
  }
  bt(T, U) = 0.0;
  for (std::size_t ti = T + 1; ti-- > 0;) {
    for (std::size_t ui = U + 1; ui-- > 0;) {
      const std::size_t t = ti, u = ui;
      if (t == T && u == U) continue;
      double v = kNegInf;
      if (t < T) v = log_add(v, lat.lp(t, u, blank) + bt(t + 1, u));
      if (u < U) v = log_add(v, lat.lp(tl(t), u, targets[u]) + bt(t, u + 1));
      bt(t, u) = v;
    }
  }

  const double log_p = a(T, U);
  assert(log_p > kNegInf);  // T >= 1 admits a path for every U
  RnntLoss res;
  res.loss = -log_p;
  res.grad.assign(lat.log_probs.size(), 0.0);
  auto g = [&](std::size_t t, std::size_t u, std::size_t k) -> double& {
    return res.grad[(t * (U + 1) + u) * lat.classes + k];
  };
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t u = 0; u <= U; ++u)
      g(t, u, blank) -= std::exp(a(t, u) + lat.lp(t, u, blank) + bt(t + 1, u) - log_p);
  for (std::size_t t = 0; t <= T; ++t)
    for (std::size_t u = 0; u < U; ++u)
      g(tl(t), u, static_cast<std::size_t>(targets[u])) -=
          std::exp(a(t, u) + lat.lp(tl(t), u, targets[u]) + bt(t, u + 1) - log_p);
  return res;
}

}  // namespace scrt
