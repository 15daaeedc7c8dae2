#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace scrt {

/// id <-> string table for rendering decode output and reading LM training
/// text. Line i of the file is the string for token id i.
struct TokenTable {
  std::vector<std::string> id_to_str;
  std::map<std::string, int> str_to_id;

  static TokenTable load(const std::string& path);
  static TokenTable from_strings(std::vector<std::string> tokens);

  std::size_t size() const { return id_to_str.size(); }
  int id_of(const std::string& s) const;  // throws ConfigError if unknown
  std::string render(std::span<const int> ids) const;  // space-joined
};

/// Conditional log probability of `token` following `prefix`, over token ids.
class LmInterface {
 public:
  virtual ~LmInterface() = default;
  virtual double score(std::span<const int> prefix, int token) const = 0;
};

/// -log(vocab) for every token regardless of context.
class UniformLm final : public LmInterface {
 public:
  explicit UniformLm(std::size_t vocab_size);
  double score(std::span<const int> prefix, int token) const override;

 private:
  std::size_t vocab_;
  double logp_;
};

/// Add-one smoothed bigram counts over token ids. Context is the previous
/// token, or a start-of-sentence context at the beginning of a prefix.
class CountBigramLm final : public LmInterface {
 public:
  explicit CountBigramLm(std::size_t vocab_size);

  /// Whitespace-tokenized text, one sentence per line, mapped through `table`.
  static CountBigramLm from_text(const std::string& path, const TokenTable& table);

  void add_sentence(std::span<const int> tokens);
  double score(std::span<const int> prefix, int token) const override;

 private:
  std::size_t vocab_;
  std::vector<std::size_t> counts_;    // (vocab+1) x vocab; last row = sentence start
  std::vector<std::size_t> row_sums_;  // vocab + 1
};

}  // namespace scrt
