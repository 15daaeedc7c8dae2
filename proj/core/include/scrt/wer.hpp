#pragma once

#include <string>
#include <vector>

namespace scrt {

struct WerReport {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t ref_words = 0;
  double wer = 0.0;  // (S + I + D) / ref_words
};

/// Levenshtein alignment with unit costs. Ties prefer substitution/match
/// over deletion over insertion, so counts are deterministic. The reference
/// must be nonempty.
WerReport compute_wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

/// Whitespace tokenization for CLI inputs.
std::vector<std::string> split_words(const std::string& text);

}  // namespace scrt
