#include "foliation/integrate.hpp"

#include <cmath>
#include <string>

#include "foliation/errors.hpp"

namespace foliation {

Trajectory rk4_integrate(const Rhs& rhs, const Vec& u0, const TimeGrid& grid,
                         double blowup_limit) {
  Trajectory out;
  out.reserve(grid.nodes);
  out.push_back(u0);

  const std::size_t n = u0.size();
  Vec k1(n), k2(n), k3(n), k4(n), stage(n);

  for (std::size_t step = 0; step + 1 < grid.nodes; ++step) {
    const double t = grid.time(step);
    const double h = grid.dt;
    const Vec& u = out.back();

    rhs(t, u, k1);
    for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, stage, k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, stage, k3);
    for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + h * k3[i];
    rhs(t + h, stage, k4);

    Vec next(n);
    for (std::size_t i = 0; i < n; ++i)
      next[i] = u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    if (!all_finite(next) || norm(next) > blowup_limit)
      throw BlowUpError("trajectory left the trust region at t = " +
                        std::to_string(t + h));
    out.push_back(std::move(next));
  }
  return out;
}

Vec TrajectorySampler::at(double t) const {
  const Trajectory& traj = *trajectory;
  const double u = t / dt;
  const double f = std::floor(u + 1e-9);
  auto k = static_cast<std::size_t>(std::max(0.0, f));
  if (k + 1 >= traj.size()) return traj.back();
  const double frac = u - f;
  if (frac <= 1e-9) return traj[k];
  Vec r = scale(traj[k], 1.0 - frac);
  axpy(r, frac, traj[k + 1]);
  return r;
}

}  // namespace foliation
