#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace snlcl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A kernel, mollifier or regularization width that the grid cannot resolve.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// The characteristic integrator lost monotonicity or Jacobian positivity.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested at a point the operation cannot reach (grid edge, support overlap).
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Carries every violation found while validating a configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace snlcl
