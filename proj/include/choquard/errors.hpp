#pragma once

#include <stdexcept>
#include <string>

namespace choquard {

/// Invalid parameters, malformed configuration or unsupported geometry.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation that was well-posed but failed numerically: zero norms,
/// non-convergent fits, line-search underflow.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace choquard
