#include "foliation/expansion.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "foliation/dichotomy.hpp"
#include "foliation/errors.hpp"

namespace foliation {

namespace {

// Sweep solves tolerate exponential transients: the taper bounds every
// nonlinear forcing term, so nothing blows up in finite time, and early
// iterates may overshoot the trust region before the fixed point pulls the
// orbit back. Only the base trajectory itself runs under the model's trust
// region; everything else is guarded by finiteness alone.
constexpr double kLinearSolveLimit = 1e300;

// A non-contracting sweep on these exponential systems crosses this within a
// few iterations; residuals beyond it are treated as divergence, not as slow
// convergence.
constexpr double kDivergedResidual = 1e8;

void check_dimension(const ModelSpec& model, const Vec& v, const char* what) {
  if (v.size() != model.dimension)
    throw DomainError(std::string(what) + " has dimension " +
                      std::to_string(v.size()) + ", model expects " +
                      std::to_string(model.dimension));
}

void check_trajectory(const TimeGrid& grid, const Trajectory& traj,
                      const char* what) {
  if (traj.size() != grid.nodes)
    throw DomainError(std::string(what) + " has " +
                      std::to_string(traj.size()) + " nodes, grid expects " +
                      std::to_string(grid.nodes));
}

std::size_t noise_offset(const OUProcess& ou, const TimeGrid& grid) {
  return path_offset_for_grid(ou, grid.dt, grid.nodes);
}

// I_i = int_0^T e^{-lambda_i s} f_i(s) ds on the unstable coordinates,
// trapezoid over the grid nodes. lambda_i > 0 and s >= 0 keep the kernel in
// (0, 1], so the sum needs no rescaling.
Vec unstable_weighted_integral(const DichotomySplit& split,
                               const TimeGrid& grid,
                               const std::vector<Vec>& f) {
  Vec out = zeros(split.dimension());
  for (std::size_t i : split.unstable_set) {
    const double lam = split.eigenvalues[i];
    double acc = 0.0;
    for (std::size_t k = 0; k < grid.nodes; ++k) {
      const double w =
          (k == 0 || k + 1 == grid.nodes) ? 0.5 * grid.dt : grid.dt;
      acc += w * std::exp(-lam * grid.time(k)) * f[k][i];
    }
    out[i] = acc;
  }
  return out;
}

void record_sweep(FixedPointInfo& info, double residual) {
  info.history.push_back(residual);
  info.residual = residual;
  ++info.iterations;
}

[[noreturn]] void throw_diverged(const ModelSpec& model, const char* which,
                                 const FixedPointInfo& info) {
  const double eta = select_eta(model.split, model.lipschitz_LF);
  const GapReport gap =
      check_gap_condition(model.split, model.lipschitz_LF, eta);
  std::string msg = std::string(which) + " fixed point diverged after " +
                    std::to_string(info.iterations) + " sweeps (residual " +
                    std::to_string(info.residual) + "); gap value " +
                    std::to_string(gap.value) + " at eta " +
                    std::to_string(eta) +
                    (gap.satisfied ? "" : " violates the contraction bound");
  throw ConvergenceError(msg, info.iterations, info.residual);
}

// Requires v to vanish on the listed coordinates (within 1e-12) and returns
// a copy with exact zeros there.
Vec force_zero(const Vec& v, const std::vector<std::size_t>& coords,
               const char* what) {
  Vec out(v);
  for (std::size_t i : coords) {
    if (std::abs(out[i]) > 1e-12)
      throw DomainError(std::string(what) + " must vanish on coordinate " +
                        std::to_string(i));
    out[i] = 0.0;
  }
  return out;
}

}  // namespace

Trajectory solve_phi_d(const ModelSpec& model, const Vec& phi0,
                       const TimeGrid& grid) {
  check_dimension(model, phi0, "base point");
  Rhs rhs = [&model](double, const Vec& u, Vec& out) {
    Vec lin = model.apply_linear(u);
    Vec f = model.F(u);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = lin[i] + f[i];
  };
  return rk4_integrate(rhs, phi0, grid, model.blowup_limit());
}

Trajectory solve_psi_d(const ModelSpec& model, const Vec& xi, const Vec& phi0,
                       const Vec& l_d_value, const TimeGrid& grid) {
  check_dimension(model, xi, "stable coordinate");
  check_dimension(model, phi0, "base point");
  check_dimension(model, l_d_value, "leaf value");
  const std::size_t d = model.dimension;

  Vec u0(2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    u0[i] = xi[i] + l_d_value[i] - phi0[i];
    u0[d + i] = phi0[i];
  }

  // The phi block sees exactly the arithmetic of solve_phi_d, so the internal
  // copy matches a standalone base solve bitwise.
  Rhs rhs = [&model, d](double, const Vec& u, Vec& out) {
    Vec psi(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(d));
    Vec phi(u.begin() + static_cast<std::ptrdiff_t>(d), u.end());
    Vec lin_psi = model.apply_linear(psi);
    Vec lin_phi = model.apply_linear(phi);
    Vec f_sum = model.F(add(psi, phi));
    Vec f_phi = model.F(phi);
    for (std::size_t i = 0; i < d; ++i) {
      out[i] = lin_psi[i] + f_sum[i] - f_phi[i];
      out[d + i] = lin_phi[i] + f_phi[i];
    }
  };
  Trajectory coupled = rk4_integrate(rhs, u0, grid, kLinearSolveLimit);

  Trajectory psi;
  psi.reserve(coupled.size());
  for (const Vec& node : coupled)
    psi.emplace_back(node.begin(), node.begin() + static_cast<std::ptrdiff_t>(d));
  return psi;
}

LdResult compute_l_d(const ModelSpec& model, const Vec& xi, const Vec& phi0,
                     const TimeGrid& grid, double tol,
                     std::size_t max_iterations) {
  check_dimension(model, xi, "stable coordinate");
  check_dimension(model, phi0, "base point");
  const Vec xi_s =
      force_zero(xi, model.split.unstable_set, "stable coordinate");

  const Trajectory phi_d = solve_phi_d(model, phi0, grid);
  const Vec anchor = project_unstable(model.split, phi0);

  Vec l = anchor;
  FixedPointInfo info;
  std::vector<Vec> delta_f(grid.nodes);
  for (std::size_t sweep = 0; sweep < max_iterations; ++sweep) {
    Trajectory psi = solve_psi_d(model, xi_s, phi0, l, grid);
    for (std::size_t k = 0; k < grid.nodes; ++k)
      delta_f[k] = sub(model.F(add(psi[k], phi_d[k])), model.F(phi_d[k]));
    Vec l_new =
        sub(anchor, unstable_weighted_integral(model.split, grid, delta_f));

    const double residual = max_abs_diff(l_new, l);
    record_sweep(info, residual);
    if (!std::isfinite(residual) || residual > kDivergedResidual)
      throw_diverged(model, "deterministic leaf", info);
    l = std::move(l_new);
    if (residual <= tol) {
      info.converged = true;
      break;
    }
  }

  // Re-solve once with the accepted value so the returned trajectory is
  // exactly consistent with it: psi(0) = xi + l - phi0.
  Trajectory psi = solve_psi_d(model, xi_s, phi0, l, grid);
  return LdResult{std::move(l), std::move(psi), std::move(info)};
}

Trajectory solve_phi_1(const ModelSpec& model, const Trajectory& phi_d,
                       const OUProcess& ou, const TimeGrid& grid) {
  check_trajectory(grid, phi_d, "base trajectory");
  check_dimension(model, phi_d.front(), "base trajectory");
  (void)noise_offset(ou, grid);

  const TrajectorySampler phi{&phi_d, grid.dt};
  Rhs rhs = [&model, phi, &ou](double t, const Vec& u, Vec& out) {
    const Vec p = phi.at(t);
    const double z = ou.value_interp(t);
    Vec lin = model.apply_linear(u);
    Vec tangent = model.derivative(p, u);
    Vec f = model.F(p);
    Vec df_p = model.derivative(p, p);
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] = lin[i] + tangent[i] - z * (-p[i] + f[i] - df_p[i]);
  };
  return rk4_integrate(rhs, zeros(model.dimension), grid, kLinearSolveLimit);
}

Trajectory solve_psi_1(const ModelSpec& model, const Trajectory& phi_d,
                       const Trajectory& psi_d, const Trajectory& phi_1,
                       const OUProcess& ou, const Vec& l1_guess,
                       const TimeGrid& grid) {
  check_trajectory(grid, phi_d, "base trajectory");
  check_trajectory(grid, psi_d, "difference trajectory");
  check_trajectory(grid, phi_1, "base correction trajectory");
  check_dimension(model, l1_guess, "initial correction value");
  (void)noise_offset(ou, grid);

  const Vec u0 =
      force_zero(l1_guess, model.split.stable_set, "initial correction value");

  const TrajectorySampler phi{&phi_d, grid.dt};
  const TrajectorySampler psi{&psi_d, grid.dt};
  const TrajectorySampler phi1{&phi_1, grid.dt};
  Rhs rhs = [&model, phi, psi, phi1, &ou](double t, const Vec& u, Vec& out) {
    const Vec w0 = phi.at(t);
    const Vec v0 = add(psi.at(t), w0);
    const Vec p1 = phi1.at(t);
    const double z = ou.value_interp(t);

    Vec lin = model.apply_linear(u);
    Vec tangent = model.derivative(v0, u);
    // lam = Z [psi + F(Phi) - F(psi + Phi)]
    //     + DF(psi + Phi)(Phi1 + Z (psi + Phi)) - DF(Phi)(Phi1 + Z Phi)
    Vec drop = sub(model.F(w0), model.F(v0));
    Vec along_v = model.derivative(v0, add(p1, scale(v0, z)));
    Vec along_w = model.derivative(w0, add(p1, scale(w0, z)));
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] = lin[i] + tangent[i] + z * (v0[i] - w0[i] + drop[i]) +
               along_v[i] - along_w[i];
  };
  return rk4_integrate(rhs, u0, grid, kLinearSolveLimit);
}

L1Result compute_l_1(const ModelSpec& model, const Trajectory& phi_d,
                     const Trajectory& psi_d, const Trajectory& phi_1,
                     const OUProcess& ou, const TimeGrid& grid, double tol,
                     std::size_t max_iterations) {
  check_trajectory(grid, phi_d, "base trajectory");
  check_trajectory(grid, psi_d, "difference trajectory");
  check_trajectory(grid, phi_1, "base correction trajectory");
  const std::size_t off = noise_offset(ou, grid);

  // Everything in the integrand except DF(psi + Phi) psi1 is fixed across
  // sweeps; precompute it node by node.
  std::vector<Vec> fixed_part(grid.nodes);
  std::vector<Vec> v0s(grid.nodes);
  for (std::size_t k = 0; k < grid.nodes; ++k) {
    const Vec& w0 = phi_d[k];
    Vec v0 = add(psi_d[k], w0);
    const double z = ou.z[off + k];
    const double iz = ou.z_integral[off + k];

    Vec delta_f = sub(model.F(v0), model.F(w0));
    Vec along_v = model.derivative(v0, add(phi_1[k], scale(v0, z)));
    Vec along_w = model.derivative(w0, add(phi_1[k], scale(w0, z)));
    Vec part(model.dimension);
    for (std::size_t i = 0; i < model.dimension; ++i)
      part[i] = -(z + iz) * delta_f[i] + along_v[i] - along_w[i];
    fixed_part[k] = std::move(part);
    v0s[k] = std::move(v0);
  }

  Vec l1 = zeros(model.dimension);
  FixedPointInfo info;
  std::vector<Vec> integrand(grid.nodes);
  for (std::size_t sweep = 0; sweep < max_iterations; ++sweep) {
    Trajectory psi1 = solve_psi_1(model, phi_d, psi_d, phi_1, ou, l1, grid);
    for (std::size_t k = 0; k < grid.nodes; ++k)
      integrand[k] = add(fixed_part[k], model.derivative(v0s[k], psi1[k]));
    Vec l_new =
        scale(unstable_weighted_integral(model.split, grid, integrand), -1.0);

    const double residual = max_abs_diff(l_new, l1);
    record_sweep(info, residual);
    if (!std::isfinite(residual) || residual > kDivergedResidual)
      throw_diverged(model, "leaf correction", info);
    l1 = std::move(l_new);
    if (residual <= tol) {
      info.converged = true;
      break;
    }
  }

  Trajectory psi1 = solve_psi_1(model, phi_d, psi_d, phi_1, ou, l1, grid);
  return L1Result{std::move(l1), std::move(psi1), std::move(info)};
}

ExpansionState expand_along_path(const ModelSpec& model, const Vec& phi0,
                                 const Vec& xi, const OUProcess& ou,
                                 const TimeGrid& grid, double tol,
                                 std::size_t max_iterations) {
  ExpansionState state;
  state.grid = grid;
  state.base_point = phi0;
  state.xi = force_zero(xi, model.split.unstable_set, "stable coordinate");

  state.phi_d = solve_phi_d(model, phi0, grid);
  LdResult ld = compute_l_d(model, state.xi, phi0, grid, tol, max_iterations);
  state.psi_d = std::move(ld.psi_d);
  state.l_d = std::move(ld.value);
  state.info_d = std::move(ld.info);

  state.phi_1 = solve_phi_1(model, state.phi_d, ou, grid);
  L1Result l1 = compute_l_1(model, state.phi_d, state.psi_d, state.phi_1, ou,
                            grid, tol, max_iterations);
  state.psi_1 = std::move(l1.psi_1);
  state.l_1 = std::move(l1.value);
  state.info_1 = std::move(l1.info);
  return state;
}

LeafApproximation assemble_leaf(const ModelSpec& model, const Vec& phi0,
                                const std::vector<Vec>& xi_points, double eps,
                                const OUProcess& ou, const TimeGrid& grid,
                                double tol, int order,
                                std::size_t max_iterations) {
  if (eps < 0.0) throw ConfigError("noise amplitude must be nonnegative");
  if (order != 0 && order != 1)
    throw ConfigError("expansion order must be 0 or 1");
  check_dimension(model, phi0, "base point");
  (void)noise_offset(ou, grid);

  LeafApproximation leaf;
  leaf.base_point = phi0;
  leaf.epsilon = eps;
  leaf.horizon = grid.horizon();
  leaf.tolerance = tol;
  leaf.eta = select_eta(model.split, model.lipschitz_LF);
  leaf.gap = check_gap_condition(model.split, model.lipschitz_LF, leaf.eta);
  leaf.order = order;

  const Trajectory phi_d = solve_phi_d(model, phi0, grid);
  const Trajectory phi_1 = solve_phi_1(model, phi_d, ou, grid);

  leaf.samples.reserve(xi_points.size());
  for (const Vec& xi_raw : xi_points) {
    check_dimension(model, xi_raw, "stable coordinate");
    Vec xi =
        force_zero(xi_raw, model.split.unstable_set, "stable coordinate");

    LdResult ld = compute_l_d(model, xi, phi0, grid, tol, max_iterations);
    L1Result l1 =
        compute_l_1(model, phi_d, ld.psi_d, phi_1, ou, grid, tol,
                    max_iterations);

    LeafSample sample;
    sample.point = add(xi, ld.value);
    if (order >= 1) axpy(sample.point, eps, l1.value);
    sample.xi = std::move(xi);
    sample.l_d = std::move(ld.value);
    sample.l_1 = std::move(l1.value);
    sample.info_d = std::move(ld.info);
    sample.info_1 = std::move(l1.info);
    leaf.samples.push_back(std::move(sample));
  }
  return leaf;
}

}  // namespace foliation
