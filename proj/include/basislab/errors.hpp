#pragma once

#include <stdexcept>
#include <string>

namespace basislab {

// Largest admissible magnitude for any iterate entry; beyond it a run is
// declared divergent instead of propagating NaN/Inf.
inline constexpr double kDivergenceLimit = 1e12;

// Bad arguments: dimension mismatches, violated preconditions, malformed
// configuration values.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// An iterate left the representable range.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// File format or filesystem failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace basislab
