#include "foliation/noise.hpp"

#include <cmath>
#include <random>

#include "foliation/errors.hpp"

namespace foliation {

namespace {

// Snaps t to the nearest lattice index; rejects anything further than a
// relative 1e-6 of dt from a node so silent aliasing cannot happen.
std::size_t lattice_index(double t, double dt, std::size_t zero_index,
                          std::size_t size) {
  const double u = t / dt + static_cast<double>(zero_index);
  const double r = std::round(u);
  if (std::abs(u - r) > 1e-6)
    throw DomainError("time " + std::to_string(t) + " is not on the dt grid");
  if (r < 0.0 || r >= static_cast<double>(size))
    throw DomainError("time " + std::to_string(t) + " outside path support");
  return static_cast<std::size_t>(r);
}

}  // namespace

std::size_t BrownianPath::index_of(double t) const {
  return lattice_index(t, dt, zero_index, size());
}

BrownianPath generate_brownian_path(std::uint64_t seed, double t_min,
                                    double t_max, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(t_min < 0.0) || !(t_max > 0.0))
    throw ConfigError("path support must satisfy t_min < 0 < t_max");
  const double back = -t_min / dt;
  const double fwd = t_max / dt;
  if (std::abs(back - std::round(back)) > 1e-9 ||
      std::abs(fwd - std::round(fwd)) > 1e-9)
    throw ConfigError("t_min and t_max must be integer multiples of dt");

  const auto n_back = static_cast<std::size_t>(std::round(back));
  const auto n_fwd = static_cast<std::size_t>(std::round(fwd));

  BrownianPath path;
  path.seed = seed;
  path.dt = dt;
  path.zero_index = n_back;
  path.values.assign(n_back + n_fwd + 1, 0.0);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double root_dt = std::sqrt(dt);

  // Forward increments first, then backward; W(0) stays exactly 0.
  for (std::size_t k = n_back; k + 1 < path.values.size(); ++k)
    path.values[k + 1] = path.values[k] + root_dt * normal(rng);
  for (std::size_t k = n_back; k > 0; --k)
    path.values[k - 1] = path.values[k] + root_dt * normal(rng);

  return path;
}

double ito_integral(const BrownianPath& path,
                    const std::function<double(double)>& integrand, double t0,
                    double t1) {
  const std::size_t i0 = path.index_of(t0);
  const std::size_t i1 = path.index_of(t1);
  if (i0 > i1) throw DomainError("ito_integral requires t0 <= t1");
  double acc = 0.0;
  for (std::size_t k = i0; k < i1; ++k) {
    const double f = integrand(path.time(k));
    if (!std::isfinite(f))
      throw DomainError("ito_integral: integrand not finite on the grid");
    acc += f * (path.values[k + 1] - path.values[k]);
  }
  return acc;
}

double OUProcess::value_interp(double t) const {
  const double u =
      t / path.dt + static_cast<double>(path.zero_index);
  if (u < 0.0 || u > static_cast<double>(z.size() - 1))
    throw DomainError("time outside path support");
  const double f = std::floor(u);
  auto k = static_cast<std::size_t>(f);
  const double frac = u - f;
  if (k + 1 >= z.size()) return z[k];
  return (1.0 - frac) * z[k] + frac * z[k + 1];
}

double OUProcess::integral(double t0, double t1) const {
  const std::size_t i0 = path.index_of(t0);
  const std::size_t i1 = path.index_of(t1);
  if (i0 > i1) throw DomainError("integral_z requires t0 <= t1");
  return z_integral[i1] - z_integral[i0];
}

OUProcess ou_stationary(const BrownianPath& path, double tail_tolerance) {
  if (!(tail_tolerance > 0.0))
    throw ConfigError("tail tolerance must be positive");
  const double tail = std::exp(path.t_min());
  if (tail > tail_tolerance)
    throw TruncationError(
        "truncation tail e^{t_min} = " + std::to_string(tail) +
            " exceeds tolerance; need t_min <= " +
            std::to_string(std::log(tail_tolerance)),
        std::log(tail_tolerance));

  OUProcess ou;
  ou.path = path;
  const std::size_t n = path.size();
  ou.z.assign(n, 0.0);

  // z_{k+1} = e^{-dt} (z_k + dW_k) with z(t_min) = 0 reproduces
  // e^{-t_k} * (left Ito sum of e^tau dW over [t_min, t_k]) exactly.
  const double decay = std::exp(-path.dt);
  for (std::size_t k = 0; k + 1 < n; ++k)
    ou.z[k + 1] = decay * (ou.z[k] + (path.values[k + 1] - path.values[k]));
  ou.z0 = ou.z[path.zero_index];

  ou.z_integral.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k)
    ou.z_integral[k + 1] =
        ou.z_integral[k] + 0.5 * path.dt * (ou.z[k] + ou.z[k + 1]);
  const double at_zero = ou.z_integral[path.zero_index];
  for (double& v : ou.z_integral) v -= at_zero;

  return ou;
}

double integral_z(const OUProcess& ou, double t0, double t1) {
  return ou.integral(t0, t1);
}

std::size_t path_offset_for_grid(const OUProcess& ou, double dt,
                                 std::size_t nodes) {
  const BrownianPath& path = ou.path;
  if (std::abs(path.dt - dt) > 1e-12 * std::max(1.0, dt))
    throw ConfigError("noise path step does not match the solver grid");
  if (path.zero_index + nodes > path.size())
    throw ConfigError("noise path ends before the solver horizon");
  return path.zero_index;
}

BrownianPath scale_path(const BrownianPath& path, double c) {
  BrownianPath scaled = path;
  for (double& v : scaled.values) v *= c;
  return scaled;
}

}  // namespace foliation
