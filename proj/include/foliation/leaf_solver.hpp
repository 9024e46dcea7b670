#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "foliation/grid.hpp"
#include "foliation/integrate.hpp"
#include "foliation/model.hpp"
#include "foliation/noise.hpp"
#include "foliation/vec.hpp"

namespace foliation {

/// Settings of the integral-operator iteration.
struct LPConfig {
  std::optional<double> eta;  // weight rate; picked from the gap when unset
  double tol{1e-10};          // weighted sup-norm residual target
  std::size_t max_iterations{200};
};

/// Result of one leaf computation by the integral-operator iteration.
struct FixedPointReport {
  Vec leaf_point;  // phi0 + psi(0)
  Vec psi0;        // orbit difference at t = 0
  Trajectory psi;  // full difference trajectory on the grid
  double eta{};
  std::size_t iterations{};
  double final_residual{};
  bool converged{};
  std::vector<double> residual_history;
};

/// Stable-leaf point through phi0 at absolute stable coordinate xi for the
/// transformed equation
///
///   du/dt = A u + eps Z(theta_t omega) u + G(theta_t omega, u),
///   G(omega, u) = e^{-eps Z(omega)} F(e^{eps Z(omega)} u),
///
/// computed as the fixed point of the variation-of-constants operator
///
///   psi(t) = e^{A t + eps int_0^t Z} (xi - P^s phi0)
///          + int_0^t  e^{A(t-s) + eps int_s^t Z} P^s dG(s) ds
///          - int_t^T  e^{A(t-s) + eps int_s^t Z} P^u dG(s) ds,
///
/// dG(s) = G(theta_s omega, u(s) + psi(s)) - G(theta_s omega, u(s)) along the
/// base orbit u of phi0. The upper limit truncates the stable-leaf integral
/// at the grid horizon. Residuals are measured in the weighted norm
/// sup_t e^{-eta t - eps int_0^t Z} |psi(t)|. This path is independent of the
/// expansion modules and serves as their reference.
FixedPointReport lyapunov_perron_leaf(const ModelSpec& model, const Vec& xi,
                                      const Vec& phi0, double eps,
                                      const OUProcess& ou,
                                      const TimeGrid& grid,
                                      const LPConfig& config = {});

/// Outcome of flowing a candidate point and the base point forward together.
struct MembershipReport {
  double eta{};
  double initial_weighted_norm{};
  double final_weighted_norm{};
  double ratio{};  // final / initial; 0 when the initial difference is zero
  bool decaying{};
  double max_state_norm{};  // sup over both orbits of the transformed states
  bool stayed_in_core{};    // both orbits stayed where the taper is identity
  std::vector<double> weighted_norms;  // per node, weighted_norms[0] = initial
};

/// Integrates the transformed equation from `point` and from `phi0` on the
/// same grid and compares the weighted norm of their difference at the two
/// ends. Points on the stable leaf decay; points with an unstable component
/// grow at rate alpha - eta. stayed_in_core reports whether the dynamics ever
/// sampled the taper region, in which case the verdict speaks about the
/// tapered field rather than the raw one.
MembershipReport verify_leaf_membership(const ModelSpec& model,
                                        const Vec& point, const Vec& phi0,
                                        double eps, const OUProcess& ou,
                                        const TimeGrid& grid,
                                        std::optional<double> eta = {});

}  // namespace foliation
