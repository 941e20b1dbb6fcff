#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace glearn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation's usage contract (empty inputs, short series).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Vectors or matrices with inconsistent dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or failed factorizations.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A linear solve inside the backward recursion failed at a given step.
class SolverError : public NumericError {
 public:
  SolverError(int step, const std::string& what)
      : NumericError("backward solve failed at t=" + std::to_string(step) + ": " + what),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// Observed transition violates the deterministic bond growth.
class InconsistentTrajectoryError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Post-trade risky position is zero, so the relative return is undefined.
class DegeneratePositionError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Sharpe ratio requested on a return series with zero dispersion.
class UndefinedSharpeError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Inverse-RL fit diverged; carries the loss history up to the failure.
class FitError : public NumericError {
 public:
  FitError(const std::string& what, std::vector<double> loss_history)
      : NumericError(what), loss_history_(std::move(loss_history)) {}
  const std::vector<double>& loss_history() const { return loss_history_; }

 private:
  std::vector<double> loss_history_;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace glearn
