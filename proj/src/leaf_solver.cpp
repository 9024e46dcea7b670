#include "foliation/leaf_solver.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "foliation/dichotomy.hpp"
#include "foliation/errors.hpp"

namespace foliation {

namespace {

// The transformed field is globally Lipschitz (the taper caps the
// nonlinearity), so orbits grow at most exponentially and stay representable;
// the integrator guard only needs to catch non-finite states. Growth past the
// taper is a reportable outcome here, not an abort.
constexpr double kOrbitGuard = 1e300;

constexpr double kDivergedResidual = 1e8;

void check_dim(const ModelSpec& model, const Vec& v, const char* what) {
  if (v.size() != model.dimension)
    throw DomainError(std::string(what) + " has dimension " +
                      std::to_string(v.size()) + ", model expects " +
                      std::to_string(model.dimension));
}

Vec force_stable_support(const DichotomySplit& split, const Vec& v,
                         const char* what) {
  Vec out(v);
  for (std::size_t i : split.unstable_set) {
    if (std::abs(out[i]) > 1e-12)
      throw DomainError(std::string(what) + " must vanish on coordinate " +
                        std::to_string(i));
    out[i] = 0.0;
  }
  return out;
}

// G(z, u) = e^{-eps z} F(e^{eps z} u).
Vec conjugated_field(const ModelSpec& model, double eps, double z,
                     const Vec& u) {
  const double s = std::exp(eps * z);
  return scale(model.F(scale(u, s)), 1.0 / s);
}

// du/dt = A u + eps Z u + G along one orbit of the transformed equation.
Trajectory transformed_orbit(const ModelSpec& model, const Vec& u0, double eps,
                             const OUProcess& ou, const TimeGrid& grid) {
  Rhs rhs = [&model, eps, &ou](double t, const Vec& u, Vec& out) {
    const double z = ou.value_interp(t);
    Vec lin = model.apply_linear(u);
    Vec g = conjugated_field(model, eps, z, u);
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] = lin[i] + eps * z * u[i] + g[i];
  };
  return rk4_integrate(rhs, u0, grid, kOrbitGuard);
}

[[noreturn]] void throw_diverged(const ModelSpec& model, std::size_t sweeps,
                                 double residual) {
  const double eta = select_eta(model.split, model.lipschitz_LF);
  const GapReport gap =
      check_gap_condition(model.split, model.lipschitz_LF, eta);
  throw ConvergenceError(
      "integral operator iteration diverged after " + std::to_string(sweeps) +
          " sweeps (residual " + std::to_string(residual) + "); gap value " +
          std::to_string(gap.value) + " at eta " + std::to_string(eta) +
          (gap.satisfied ? "" : " violates the contraction bound"),
      sweeps, residual);
}

}  // namespace

FixedPointReport lyapunov_perron_leaf(const ModelSpec& model, const Vec& xi,
                                      const Vec& phi0, double eps,
                                      const OUProcess& ou,
                                      const TimeGrid& grid,
                                      const LPConfig& config) {
  check_dim(model, xi, "stable coordinate");
  check_dim(model, phi0, "base point");
  if (eps < 0.0) throw ConfigError("noise amplitude must be nonnegative");

  const DichotomySplit& split = model.split;
  const std::size_t d = model.dimension;
  const std::size_t n = grid.nodes;
  const double dt = grid.dt;
  const std::size_t off = path_offset_for_grid(ou, dt, n);
  const double eta =
      config.eta ? *config.eta : select_eta(split, model.lipschitz_LF);

  const Vec xi_clean = force_stable_support(split, xi, "stable coordinate");
  const Vec xi_rel = sub(xi_clean, project_stable(split, phi0));

  std::vector<double> iz(n), weight(n);
  for (std::size_t k = 0; k < n; ++k) {
    iz[k] = ou.z_integral[off + k];
    weight[k] = std::exp(-eta * grid.time(k) - eps * iz[k]);
  }

  const Trajectory base = transformed_orbit(model, phi0, eps, ou, grid);

  // Seed with the freely decaying stable part; the operator fills the rest.
  Trajectory psi(n, zeros(d));
  for (std::size_t i : split.stable_set) {
    const double lam = split.eigenvalues[i];
    for (std::size_t k = 0; k < n; ++k)
      psi[k][i] =
          xi_rel[i] * std::exp(lam * grid.time(k) + eps * iz[k]);
  }

  FixedPointReport report;
  report.eta = eta;

  std::vector<Vec> g(n);
  for (std::size_t sweep = 0; sweep < config.max_iterations; ++sweep) {
    for (std::size_t k = 0; k < n; ++k) {
      const double z = ou.z[off + k];
      const double s = std::exp(eps * z);
      Vec shifted = scale(add(base[k], psi[k]), s);
      Vec at_base = scale(base[k], s);
      g[k] = scale(sub(model.F(shifted), model.F(at_base)), 1.0 / s);
    }

    Trajectory next(n, zeros(d));
    for (std::size_t i : split.stable_set) {
      const double lam = split.eigenvalues[i];
      double acc = 0.0;
      next[0][i] = xi_rel[i];
      for (std::size_t k = 1; k < n; ++k) {
        const double step = std::exp(lam * dt + eps * (iz[k] - iz[k - 1]));
        acc = step * acc + 0.5 * dt * (step * g[k - 1][i] + g[k][i]);
        next[k][i] =
            xi_rel[i] * std::exp(lam * grid.time(k) + eps * iz[k]) + acc;
      }
    }
    for (std::size_t i : split.unstable_set) {
      const double lam = split.eigenvalues[i];
      double acc = 0.0;
      for (std::size_t k = n - 1; k-- > 0;) {
        const double step = std::exp(-lam * dt + eps * (iz[k] - iz[k + 1]));
        acc = step * acc + 0.5 * dt * (step * g[k + 1][i] + g[k][i]);
        next[k][i] = -acc;
      }
    }

    double residual = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      residual = std::max(residual, weight[k] * max_abs_diff(next[k], psi[k]));

    report.residual_history.push_back(residual);
    report.final_residual = residual;
    ++report.iterations;
    psi = std::move(next);

    if (!std::isfinite(residual) || residual > kDivergedResidual)
      throw_diverged(model, report.iterations, residual);
    if (residual <= config.tol) {
      report.converged = true;
      break;
    }
  }

  report.psi0 = psi.front();
  report.leaf_point = add(phi0, psi.front());
  report.psi = std::move(psi);
  return report;
}

MembershipReport verify_leaf_membership(const ModelSpec& model,
                                        const Vec& point, const Vec& phi0,
                                        double eps, const OUProcess& ou,
                                        const TimeGrid& grid,
                                        std::optional<double> eta) {
  check_dim(model, point, "candidate point");
  check_dim(model, phi0, "base point");
  if (eps < 0.0) throw ConfigError("noise amplitude must be nonnegative");

  const std::size_t d = model.dimension;
  const std::size_t n = grid.nodes;
  const std::size_t off = path_offset_for_grid(ou, grid.dt, n);
  const double rate =
      eta ? *eta : select_eta(model.split, model.lipschitz_LF);

  // One coupled solve keeps the difference orbit and the base orbit on the
  // same Runge-Kutta stages.
  Vec u0(2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    u0[i] = point[i] - phi0[i];
    u0[d + i] = phi0[i];
  }
  Rhs rhs = [&model, eps, &ou, d](double t, const Vec& state, Vec& out) {
    const double z = ou.value_interp(t);
    Vec psi(state.begin(), state.begin() + static_cast<std::ptrdiff_t>(d));
    Vec u(state.begin() + static_cast<std::ptrdiff_t>(d), state.end());
    Vec lin_psi = model.apply_linear(psi);
    Vec lin_u = model.apply_linear(u);
    Vec g_shift = conjugated_field(model, eps, z, add(u, psi));
    Vec g_base = conjugated_field(model, eps, z, u);
    for (std::size_t i = 0; i < d; ++i) {
      out[i] = lin_psi[i] + eps * z * psi[i] + g_shift[i] - g_base[i];
      out[d + i] = lin_u[i] + eps * z * u[i] + g_base[i];
    }
  };
  const Trajectory coupled = rk4_integrate(rhs, u0, grid, kOrbitGuard);

  MembershipReport report;
  report.eta = rate;
  const double core = model.cutoff_radius ? *model.cutoff_radius : kOrbitGuard;
  report.stayed_in_core = true;
  for (std::size_t k = 0; k < n; ++k) {
    Vec psi(coupled[k].begin(),
            coupled[k].begin() + static_cast<std::ptrdiff_t>(d));
    Vec u(coupled[k].begin() + static_cast<std::ptrdiff_t>(d),
          coupled[k].end());
    const double nb = norm(u);
    const double ns = norm(add(u, psi));
    report.max_state_norm = std::max(report.max_state_norm, std::max(nb, ns));
    if (nb > core || ns > core) report.stayed_in_core = false;
  }

  auto weighted = [&](std::size_t k) {
    Vec psi(coupled[k].begin(),
            coupled[k].begin() + static_cast<std::ptrdiff_t>(d));
    return std::exp(-rate * grid.time(k) - eps * ou.z_integral[off + k]) *
           norm(psi);
  };
  report.weighted_norms.resize(n);
  for (std::size_t k = 0; k < n; ++k) report.weighted_norms[k] = weighted(k);
  report.initial_weighted_norm = report.weighted_norms.front();
  report.final_weighted_norm = report.weighted_norms.back();
  report.ratio = report.initial_weighted_norm > 0.0
                     ? report.final_weighted_norm / report.initial_weighted_norm
                     : 0.0;
  report.decaying =
      report.final_weighted_norm <= report.initial_weighted_norm;
  return report;
}

}  // namespace foliation
