#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "scrt/decode.hpp"
#include "scrt/errors.hpp"

namespace scrt {

/// Scorer with explicit per-(frame, prefix) distributions, used to drive the
/// decoders through hand-constructed cases. Distributions are given as linear
/// probabilities and stored logged; a (frame, prefix) pair without an entry
/// falls back to the global default.
class TableScorer final : public TransducerScorer {
 public:
  TableScorer(std::size_t frames, std::size_t classes) : frames_(frames), classes_(classes) {}

  void set_default(const std::vector<double>& probs) { default_ = logged(probs); }
  void set_dist(std::size_t frame, std::vector<int> prefix, const std::vector<double>& probs) {
    table_[{frame, std::move(prefix)}] = logged(probs);
  }

  std::size_t num_frames() const override { return frames_; }
  std::size_t num_classes() const override { return classes_; }

  State start() const override { return std::make_shared<std::vector<int>>(); }

  State advance(const State& state, int token) const override {
    auto next = std::make_shared<std::vector<int>>(prefix(state));
    next->push_back(token);
    return next;
  }

  std::vector<double> log_dist(std::size_t frame, const State& state) const override {
    const auto it = table_.find({frame, prefix(state)});
    if (it != table_.end()) return it->second;
    if (default_.empty()) throw StateError("TableScorer: no distribution registered");
    return default_;
  }

 private:
  static const std::vector<int>& prefix(const State& state) {
    return *static_cast<const std::vector<int>*>(state.get());
  }

  std::vector<double> logged(const std::vector<double>& probs) const {
    if (probs.size() != classes_) throw ShapeError("TableScorer: distribution size mismatch");
    std::vector<double> out(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) out[i] = std::log(probs[i]);
    return out;
  }

  std::size_t frames_;
  std::size_t classes_;
  std::map<std::pair<std::size_t, std::vector<int>>, std::vector<double>> table_;
  std::vector<double> default_;
};

}  // namespace scrt
