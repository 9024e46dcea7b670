#pragma once

#include <cstddef>

namespace foliation {

/// Uniform grid on [0, horizon] with nodes t_k = k * dt.
/// All solvers in this library share one such grid so that quadrature and
/// integration errors cancel when two routes to the same quantity are compared.
struct TimeGrid {
  double dt{};
  std::size_t nodes{};  // number of grid points; horizon = (nodes - 1) * dt

  double time(std::size_t k) const { return static_cast<double>(k) * dt; }
  double horizon() const { return time(nodes - 1); }

  /// Builds the grid for a horizon that must be an integer multiple of dt.
  /// Throws ConfigError otherwise.
  static TimeGrid from_horizon(double horizon, double dt);
};

}  // namespace foliation
