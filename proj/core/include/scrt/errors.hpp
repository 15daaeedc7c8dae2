#pragma once

#include <stdexcept>
#include <string>

namespace scrt {

/// Dimension mismatch or empty input where rows/cols were required.
struct ShapeError : std::invalid_argument {
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid configuration value (bad preset, even kernel where odd is required, ...).
struct ConfigError : std::invalid_argument {
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Operation applied in the wrong lifecycle state (push after finalize, ...).
struct StateError : std::logic_error {
  explicit StateError(const std::string& what) : std::logic_error(what) {}
};

/// File could not be read/written or its contents are malformed.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerically degenerate input (e.g. a softmax row that is entirely -inf).
struct NumericError : std::domain_error {
  explicit NumericError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace scrt
