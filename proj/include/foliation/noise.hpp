#pragma once

#include <cstdint>
#include <cstddef>
#include <functional>
#include <vector>

namespace foliation {

/// One sampled two-sided Wiener path on a uniform grid.
///
/// Grid times are t_k = (k - zero_index) * dt, so t = 0 is always a node and
/// W(0) = 0 exactly. Increments are drawn from a single mt19937_64 stream
/// seeded with `seed`: first the forward increments (0 -> t_max in order),
/// then the backward ones (0 -> t_min), each N(0, dt). Same seed, same grid:
/// bitwise-identical values.
struct BrownianPath {
  std::uint64_t seed{};
  double dt{};
  std::size_t zero_index{};
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double time(std::size_t k) const {
    return (static_cast<double>(k) - static_cast<double>(zero_index)) * dt;
  }
  double t_min() const { return time(0); }
  double t_max() const { return time(size() - 1); }

  /// Grid index of time t. Throws DomainError if t is off-grid or outside
  /// the support.
  std::size_t index_of(double t) const;

  double value_at(double t) const { return values[index_of(t)]; }
};

/// Samples a path on [t_min, t_max]. Requires t_min < 0 < t_max, dt > 0 and
/// both endpoints on the dt-lattice; throws ConfigError otherwise.
BrownianPath generate_brownian_path(std::uint64_t seed, double t_min,
                                    double t_max, double dt);

/// Left-endpoint Ito sum of integrand(t) dW over [t0, t1] (grid nodes).
/// The left-endpoint convention is part of this library's contract: every
/// stochastic integral, including the ones inside OUProcess, uses it.
double ito_integral(const BrownianPath& path,
                    const std::function<double(double)>& integrand, double t0,
                    double t1);

/// Stationary Ornstein-Uhlenbeck functional of the path:
///
///   z0   = integral of e^tau dW(tau) over [t_min, 0]   (left Ito sum)
///   z[k] = same functional of the time-shifted path, evaluated on the grid
///          through the recursion z_{k+1} = e^{-dt} (z_k + dW_k), z(t_min) = 0,
///          which reproduces the shift identity
///          Z(theta_t omega) = e^{-t} (Z(omega) + int_0^t e^tau dW) exactly.
///
/// Values at t close to t_min carry the truncation transient (the path before
/// t_min is unknown); everything downstream only reads t >= 0 where the
/// truncation error is bounded by e^{t_min}.
struct OUProcess {
  BrownianPath path;
  double z0{};
  std::vector<double> z;           // Z(theta_{t_k} omega)
  std::vector<double> z_integral;  // trapezoid of z from 0 to t_k (signed)

  double value(double t) const { return z[path.index_of(t)]; }

  /// Linear interpolation between nodes; exact on nodes. Used by the
  /// Runge-Kutta stages at half-steps.
  double value_interp(double t) const;

  /// Trapezoid integral of Z over [t0, t1]; node-to-node, throws DomainError
  /// if t0 > t1 or either endpoint is off the grid.
  double integral(double t0, double t1) const;
};

/// Builds the OU functional. Throws TruncationError (with the horizon that
/// would work) when e^{t_min} exceeds tail_tolerance.
OUProcess ou_stationary(const BrownianPath& path, double tail_tolerance = 1e-6);

/// Trapezoid integral of the cached Z values; same contract as
/// OUProcess::integral.
double integral_z(const OUProcess& ou, double t0, double t1);

/// Path index of t = 0 for a solver grid of `nodes` points with step `dt`
/// (node k of the grid is node offset + k of the path). Throws ConfigError
/// when the steps disagree or the path ends before the grid horizon.
std::size_t path_offset_for_grid(const OUProcess& ou, double dt,
                                 std::size_t nodes);

/// Rescales the path values by c (so Z and every Ito integral scale by c).
/// Used by linearity checks on the order-1 layer.
BrownianPath scale_path(const BrownianPath& path, double c);

}  // namespace foliation
