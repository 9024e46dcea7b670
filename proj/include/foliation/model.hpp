#pragma once

#include <functional>
#include <optional>
#include <string>

#include "foliation/dichotomy.hpp"
#include "foliation/vec.hpp"

namespace foliation {

/// A semilinear field du/dt = Au + F(u) in eigencoordinates of A.
///
/// F carries its radial cutoff already applied: outside the ball of radius
/// cutoff_radius it is tapered smoothly to zero by 2 * cutoff_radius, so the
/// stored global Lipschitz bound lipschitz_LF holds on all of state space.
/// derivative(u, v) is the exact Frechet derivative of the stored F, cutoff
/// included, applied to direction v.
struct ModelSpec {
  std::string name;
  std::size_t dimension{};
  DichotomySplit split;
  std::function<Vec(const Vec&)> F;
  std::function<Vec(const Vec&, const Vec&)> derivative;
  double lipschitz_LF{};
  std::optional<double> cutoff_radius;

  Vec apply_linear(const Vec& u) const {
    Vec r(u);
    for (std::size_t i = 0; i < r.size(); ++i)
      r[i] *= split.eigenvalues[i];
    return r;
  }

  /// Trust-region bound for the expansion-layer integrators: 10x the taper
  /// support when a cutoff is present, otherwise a generic large bound.
  double blowup_limit() const {
    return cutoff_radius ? 10.0 * *cutoff_radius : 1e6;
  }
};

/// C^2 radial taper profile: 1 on [0, 1], 0 on [2, inf), quintic smoothstep
/// in between (slope and curvature vanish at both junctions).
double cutoff_profile(double s);
double cutoff_profile_slope(double s);

/// Wraps a raw field F_raw with the radial taper chi(|u| / rho):
///   F(u)          = chi * F_raw(u)
///   DF(u) v       = chi' / (rho |u|) <u, v> F_raw(u) + chi * DF_raw(u) v
struct CutoffField {
  std::function<Vec(const Vec&)> raw;
  std::function<Vec(const Vec&, const Vec&)> raw_derivative;
  double radius{};

  Vec operator()(const Vec& u) const;
  Vec derivative(const Vec& u, const Vec& v) const;
};

}  // namespace foliation
