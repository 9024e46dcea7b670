#pragma once

#include <cstddef>
#include <vector>

#include "foliation/grid.hpp"
#include "foliation/integrate.hpp"
#include "foliation/model.hpp"
#include "foliation/noise.hpp"
#include "foliation/vec.hpp"

namespace foliation {

/// Convergence record of one fixed-point computation.
struct FixedPointInfo {
  std::size_t iterations{};
  double residual{};
  bool converged{};
  std::vector<double> history;  // residual after each iteration
};

/// Base trajectory: dPhi/dt = A Phi + F(Phi), Phi(0) = phi0.
/// Deterministic; never reads the noise.
Trajectory solve_phi_d(const ModelSpec& model, const Vec& phi0,
                       const TimeGrid& grid);

/// Order-0 difference trajectory:
///   dpsi/dt = A psi + F(psi + Phi) - F(Phi),  psi(0) = xi + l_d - phi0,
/// with xi the absolute stable coordinate of the leaf point and l_d the
/// current unstable value. Phi is integrated alongside psi as one coupled
/// autonomous system, which keeps the pair at full Runge-Kutta order; the
/// internal copy reproduces solve_phi_d bitwise.
Trajectory solve_psi_d(const ModelSpec& model, const Vec& xi, const Vec& phi0,
                       const Vec& l_d_value, const TimeGrid& grid);

struct LdResult {
  Vec value;  // unstable coordinates of the deterministic leaf at xi
  Trajectory psi_d;
  FixedPointInfo info;
};

/// Deterministic leaf value, self-consistent fixed point of
///   l = P^u phi0 - int_0^T e^{-A s} P^u [F(psi + Phi) - F(Phi)] ds
/// where psi re-solves with initial value xi + l - phi0 each sweep.
LdResult compute_l_d(const ModelSpec& model, const Vec& xi, const Vec& phi0,
                     const TimeGrid& grid, double tol = 1e-10,
                     std::size_t max_iterations = 100);

/// First-order base correction:
///   dPhi1/dt = [A + DF(Phi)] Phi1 + B(t),  Phi1(0) = 0,
///   B(t) = -Z(theta_t omega) [-Phi + F(Phi) - DF(Phi) Phi].
Trajectory solve_phi_1(const ModelSpec& model, const Trajectory& phi_d,
                       const OUProcess& ou, const TimeGrid& grid);

/// First-order difference correction:
///   dpsi1/dt = [A + DF(psi + Phi)] psi1 + lam(t),  psi1(0) = l1_guess,
///   lam = Z [psi + F(Phi) - F(psi + Phi)]
///       + DF(psi + Phi)(Phi1 + Z (psi + Phi)) - DF(Phi)(Phi1 + Z Phi).
/// The initial value must lie in the unstable range (stable part zero within
/// 1e-12); it is zeroed exactly on entry.
Trajectory solve_psi_1(const ModelSpec& model, const Trajectory& phi_d,
                       const Trajectory& psi_d, const Trajectory& phi_1,
                       const OUProcess& ou, const Vec& l1_guess,
                       const TimeGrid& grid);

struct L1Result {
  Vec value;  // unstable coordinates of the first-order leaf correction
  Trajectory psi_1;
  FixedPointInfo info;
};

/// Noise-linear leaf correction, fixed point of
///   l1 = -int_0^T e^{-A s} P^u [ -(Z(s) + int_0^s Z) (F(psi+Phi) - F(Phi))
///          + DF(psi+Phi)(psi1 + Phi1 + Z (psi+Phi))
///          - DF(Phi)(Phi1 + Z Phi) ] ds
/// where psi1 re-solves with initial value l1 each sweep. The first-order
/// coefficient of the invariance identity; linear in the driving path.
L1Result compute_l_1(const ModelSpec& model, const Trajectory& phi_d,
                     const Trajectory& psi_d, const Trajectory& phi_1,
                     const OUProcess& ou, const TimeGrid& grid,
                     double tol = 1e-10, std::size_t max_iterations = 100);

/// Everything the expansion produces for one leaf parameter.
struct ExpansionState {
  TimeGrid grid;
  Vec base_point;  // phi0
  Vec xi;          // absolute stable coordinate (unstable entries zero)
  Trajectory phi_d, phi_1, psi_d, psi_1;
  Vec l_d, l_1;
  FixedPointInfo info_d, info_1;
};

/// Runs the full order-0 + order-1 pipeline for one xi. phi_d and phi_1 are
/// recomputed internally; use assemble_leaf to share them across a grid.
ExpansionState expand_along_path(const ModelSpec& model, const Vec& phi0,
                                 const Vec& xi, const OUProcess& ou,
                                 const TimeGrid& grid, double tol = 1e-10,
                                 std::size_t max_iterations = 100);

struct LeafSample {
  Vec xi;     // absolute stable coordinate
  Vec l_d;    // deterministic leaf value (unstable range)
  Vec l_1;    // noise-linear correction (unstable range)
  Vec point;  // xi + l_d + eps * l_1
  FixedPointInfo info_d, info_1;
};

struct LeafApproximation {
  Vec base_point;
  double epsilon{};
  double horizon{};
  double tolerance{};
  double eta{};
  GapReport gap;
  int order{1};
  std::vector<LeafSample> samples;
};

/// Leaf approximation over a grid of stable coordinates. Base trajectories
/// are computed once and shared. order 0 drops the eps * l_1 term from the
/// predicted points (l_1 is still reported). eps must be nonnegative.
LeafApproximation assemble_leaf(const ModelSpec& model, const Vec& phi0,
                                const std::vector<Vec>& xi_points, double eps,
                                const OUProcess& ou, const TimeGrid& grid,
                                double tol = 1e-10, int order = 1,
                                std::size_t max_iterations = 100);

}  // namespace foliation
