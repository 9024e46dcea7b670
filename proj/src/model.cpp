#include "foliation/model.hpp"

#include <cmath>

namespace foliation {

double cutoff_profile(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double u = s - 1.0;
  return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double cutoff_profile_slope(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double u = s - 1.0;
  const double w = u * (u - 1.0);
  return -30.0 * w * w;
}

Vec CutoffField::operator()(const Vec& u) const {
  const double r = norm(u);
  const double chi = cutoff_profile(r / radius);
  if (chi == 0.0) return zeros(u.size());
  Vec f = raw(u);
  if (chi != 1.0)
    for (double& x : f) x *= chi;
  return f;
}

Vec CutoffField::derivative(const Vec& u, const Vec& v) const {
  const double r = norm(u);
  const double s = r / radius;
  const double chi = cutoff_profile(s);
  if (chi == 0.0) return zeros(u.size());
  Vec d = raw_derivative(u, v);
  if (chi != 1.0)
    for (double& x : d) x *= chi;
  const double slope = cutoff_profile_slope(s);
  if (slope != 0.0 && r > 0.0) {
    const double w = slope * dot(u, v) / (radius * r);
    axpy(d, w, raw(u));
  }
  return d;
}

}  // namespace foliation
