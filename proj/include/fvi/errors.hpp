#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fvi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A BDF order outside 1..6.
class InvalidOrderError : public Error {
 public:
  using Error::Error;
};

/// Parameters that violate a precondition (non-positive step, bad grid, ...).
class InvalidConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Incompatible lengths or vector dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A linear system that cannot be solved reliably.
class NumericalDegeneracyError : public Error {
 public:
  NumericalDegeneracyError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// Newton iteration did not reach the residual tolerance.
class NewtonFailure : public Error {
 public:
  NewtonFailure(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// An integrator step failed; carries the step index and the last residual.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, std::size_t step, double residual,
              std::string block = {})
      : Error(what), step_(step), residual_(residual), block_(std::move(block)) {}
  std::size_t step() const { return step_; }
  double residual() const { return residual_; }
  /// Equation block that failed ("momentum", "el-main", "el-inner"), may be empty.
  const std::string& block() const { return block_; }

 private:
  std::size_t step_;
  double residual_;
  std::string block_;
};

}  // namespace fvi
