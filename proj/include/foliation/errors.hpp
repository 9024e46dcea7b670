#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace foliation {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid setup: misaligned grids, bad dimensions, out-of-range parameters.
struct ConfigError : Error {
  using Error::Error;
};

/// An operation was called outside its mathematical domain
/// (off-grid times, backward flow on a stable coordinate, ...).
struct DomainError : Error {
  using Error::Error;
};

/// The truncated noise horizon cannot meet the requested tail tolerance.
/// Carries the horizon that would satisfy it.
struct TruncationError : Error {
  double required_t_min;
  TruncationError(const std::string& msg, double required)
      : Error(msg), required_t_min(required) {}
};

/// A trajectory left the trust region of the solver (or became non-finite).
struct BlowUpError : Error {
  using Error::Error;
};

/// A fixed-point iteration stopped contracting or hit its iteration cap.
struct ConvergenceError : Error {
  std::size_t iterations;
  double residual;
  ConvergenceError(const std::string& msg, std::size_t its, double res)
      : Error(msg), iterations(its), residual(res) {}
};

}  // namespace foliation
