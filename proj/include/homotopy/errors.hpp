#pragma once

#include <stdexcept>
#include <string>

namespace homotopy {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input bytes do not parse under the declared format (ragged CSV, bad NPY header, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Input parses but violates a domain invariant (non-finite value, duplicate id, shape mismatch).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Numerically degenerate input: singular covariance, zero variance, all-zero matrix.
class DegenerateInputError : public Error {
 public:
  DegenerateInputError(const std::string& what, double offending_value = 0.0)
      : Error(what), value_(offending_value) {}

  /// The eigenvalue / variance / norm that triggered the error.
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Every learning rate of an iterative estimator diverged.
class OptimizationError : public Error {
 public:
  using Error::Error;
};

}  // namespace homotopy
