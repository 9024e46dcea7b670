#pragma once

#include <functional>
#include <vector>

#include "foliation/grid.hpp"
#include "foliation/vec.hpp"

namespace foliation {

using Trajectory = std::vector<Vec>;

/// Right-hand side writing du/dt into `out`.
using Rhs = std::function<void(double t, const Vec& u, Vec& out)>;

/// Classic fourth-order Runge-Kutta over the grid nodes. Throws BlowUpError
/// as soon as a node value exceeds blowup_limit in norm or stops being
/// finite. The integrator is explicit: the caller is responsible for a dt
/// that resolves the stiffest eigenvalue of the field.
Trajectory rk4_integrate(const Rhs& rhs, const Vec& u0, const TimeGrid& grid,
                         double blowup_limit);

/// Linear interpolation into a node-sampled trajectory; exact on nodes,
/// clamped at the right end. Used to evaluate frozen lower-order trajectories
/// at Runge-Kutta half-steps.
struct TrajectorySampler {
  const Trajectory* trajectory{};
  double dt{};

  Vec at(double t) const;
};

}  // namespace foliation
