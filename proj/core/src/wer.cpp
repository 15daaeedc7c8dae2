#include "scrt/wer.hpp"

#include <sstream>

#include "scrt/errors.hpp"

namespace scrt {

WerReport compute_wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  if (ref.empty()) {
    throw ConfigError("compute_wer: reference must be nonempty");
  }
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  // dp[i][j] = edit distance between ref[0..i) and hyp[0..j)
  std::vector<std::vector<std::size_t>> dp(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) {
    dp[i][0] = i;
  }
  for (std::size_t j = 0; j <= m; ++j) {
    dp[0][j] = j;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = dp[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const std::size_t del = dp[i - 1][j] + 1;
      const std::size_t ins = dp[i][j - 1] + 1;
      dp[i][j] = std::min(sub, std::min(del, ins));
    }
  }

  WerReport r;
  r.ref_words = n;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && dp[i][j] == dp[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) {
        r.substitutions += 1;
      }
      --i;
      --j;
    } else if (i > 0 && dp[i][j] == dp[i - 1][j] + 1) {
      r.deletions += 1;
      --i;
    } else {
      r.insertions += 1;
      --j;
    }
  }
  r.wer = static_cast<double>(r.substitutions + r.insertions + r.deletions) /
          static_cast<double>(r.ref_words);
  return r;
}

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) {
    words.push_back(w);
  }
  return words;
}

}  // namespace scrt
