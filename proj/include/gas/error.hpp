#pragma once

#include <stdexcept>
#include <string>

namespace gas {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad sizes, unsupported dimension, missing fields.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Linear-algebra failure (non-convergence, negative spectrum).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo estimation could not complete (e.g. persistent resampling).
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Model evaluation produced a non-finite value or violated a model invariant.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Operation requested for an input measure it does not support.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Least-squares fit failed; carries the estimated condition number.
class FitError : public Error {
 public:
  FitError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Function variance is numerically zero, so normalized indices are undefined.
class DegenerateFunctionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gas
