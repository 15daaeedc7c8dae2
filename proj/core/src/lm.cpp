#include "scrt/lm.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "scrt/errors.hpp"

namespace scrt {

TokenTable TokenTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("token table: cannot open " + path);
  }
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    tokens.push_back(line);
  }
  return from_strings(std::move(tokens));
}

TokenTable TokenTable::from_strings(std::vector<std::string> tokens) {
  TokenTable t;
  t.id_to_str = std::move(tokens);
  for (std::size_t i = 0; i < t.id_to_str.size(); ++i) {
    t.str_to_id.emplace(t.id_to_str[i], static_cast<int>(i));
  }
  return t;
}

int TokenTable::id_of(const std::string& s) const {
  auto it = str_to_id.find(s);
  if (it == str_to_id.end()) {
    throw ConfigError("token table: unknown token '" + s + "'");
  }
  return it->second;
}

std::string TokenTable::render(std::span<const int> ids) const {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const int id = ids[i];
    if (id < 0 || static_cast<std::size_t>(id) >= id_to_str.size()) {
      throw ConfigError("token table: id out of range: " + std::to_string(id));
    }
    if (i > 0) {
      out += ' ';
    }
    out += id_to_str[static_cast<std::size_t>(id)];
  }
  return out;
}

UniformLm::UniformLm(std::size_t vocab_size) : vocab_(vocab_size) {
  if (vocab_ == 0) {
    throw ConfigError("UniformLm: vocab size must be positive");
  }
  logp_ = -std::log(static_cast<double>(vocab_));
}

double UniformLm::score(std::span<const int> prefix, int token) const {
  (void)prefix;
  if (token < 0 || static_cast<std::size_t>(token) >= vocab_) {
    throw std::out_of_range("UniformLm: token out of range");
  }
  return logp_;
}

CountBigramLm::CountBigramLm(std::size_t vocab_size) : vocab_(vocab_size) {
  if (vocab_ == 0) {
    throw ConfigError("CountBigramLm: vocab size must be positive");
  }
  counts_.assign((vocab_ + 1) * vocab_, 0);
  row_sums_.assign(vocab_ + 1, 0);
}

CountBigramLm CountBigramLm::from_text(const std::string& path, const TokenTable& table) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("bigram lm: cannot open " + path);
  }
  CountBigramLm lm(table.size());
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::vector<int> ids;
    std::string w;
    while (words >> w) {
      ids.push_back(table.id_of(w));
    }
    if (!ids.empty()) {
      lm.add_sentence(ids);
    }
  }
  return lm;
}

void CountBigramLm::add_sentence(std::span<const int> tokens) {
  std::size_t ctx = vocab_;  // start-of-sentence context
  for (int tok : tokens) {
    if (tok < 0 || static_cast<std::size_t>(tok) >= vocab_) {
      throw std::out_of_range("CountBigramLm: token out of range");
    }
    counts_[ctx * vocab_ + static_cast<std::size_t>(tok)] += 1;
    row_sums_[ctx] += 1;
    ctx = static_cast<std::size_t>(tok);
  }
}

double CountBigramLm::score(std::span<const int> prefix, int token) const {
  if (token < 0 || static_cast<std::size_t>(token) >= vocab_) {
    throw std::out_of_range("CountBigramLm: token out of range");
  }
  std::size_t ctx = vocab_;
  if (!prefix.empty()) {
    const int last = prefix.back();
    if (last < 0 || static_cast<std::size_t>(last) >= vocab_) {
      throw std::out_of_range("CountBigramLm: prefix token out of range");
    }
    ctx = static_cast<std::size_t>(last);
  }
  const double num = static_cast<double>(counts_[ctx * vocab_ + static_cast<std::size_t>(token)]) + 1.0;
  const double den = static_cast<double>(row_sums_[ctx]) + static_cast<double>(vocab_);
  return std::log(num / den);
}

}  // namespace scrt
