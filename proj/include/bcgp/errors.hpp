#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bcgp {

// Base for every error raised by the library. Subclasses map onto the CLI
// exit codes (config 2, data 3, numeric 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid call arguments (empty composition, mismatched lengths, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Input outside a warping's domain, e.g. y <= 0 for the log transform.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Zero or undefined derivative, or the Box-Cox inverse singular point.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Gauss-Hermite node (or other evaluation) mapped to a non-finite value.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Iterative method failed to converge.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Cholesky failed at every jitter level.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, std::vector<double> jitters)
      : Error(what), jitters_(std::move(jitters)) {}
  const std::vector<double>& attempted_jitter() const noexcept { return jitters_; }

 private:
  std::vector<double> jitters_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace bcgp
