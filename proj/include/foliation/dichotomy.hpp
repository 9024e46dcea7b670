#pragma once

#include <cstddef>
#include <vector>

#include "foliation/vec.hpp"

namespace foliation {

/// Spectral splitting of a diagonal linear part into stable (negative
/// eigenvalue) and unstable (positive eigenvalue) coordinates, together with
/// the dichotomy rates:
///
///   |e^{At} P^u x| <= K e^{alpha t} |x|  for t <= 0,
///   |e^{At} P^s x| <= K e^{beta  t} |x|  for t >= 0,
///
/// with alpha = min over unstable eigenvalues, beta = max over stable ones,
/// and K = 1 in this diagonal setting.
struct DichotomySplit {
  std::vector<double> eigenvalues;
  std::vector<std::size_t> stable_set;
  std::vector<std::size_t> unstable_set;
  double alpha{};  // decay rate toward -infinity on the unstable range
  double beta{};   // decay rate toward +infinity on the stable range
  double bound_K{1.0};

  std::size_t dimension() const { return eigenvalues.size(); }

  /// Classifies by sign. Zero (|lambda| < 1e-14) eigenvalues are rejected:
  /// the splitting needs a spectral gap around zero.
  static DichotomySplit from_eigenvalues(std::vector<double> eigenvalues);
};

/// Zeroes the unstable coordinates. Throws DomainError on dimension mismatch.
Vec project_stable(const DichotomySplit& split, const Vec& v);

/// Zeroes the stable coordinates.
Vec project_unstable(const DichotomySplit& split, const Vec& v);

/// Applies e^{At} coordinatewise. Backward time is only defined on the
/// unstable range: for t < 0 the stable coordinates of v must already be zero
/// (within 1e-12); they come out exactly zero.
Vec semigroup_apply(const DichotomySplit& split, double t, const Vec& v);

struct GapReport {
  double value{};   // K * L_F * (1/(eta - beta) + 1/(alpha - eta))
  double margin{};  // 1 - value
  bool satisfied{};
  double eta{};
};

/// Gap number for explicit constants. Requires beta < eta < alpha, L_F >= 0,
/// K >= 1; throws DomainError otherwise.
double gap_value(double K, double lipschitz_LF, double alpha, double beta,
                 double eta);

/// Gap condition for a split at a given weight eta.
GapReport check_gap_condition(const DichotomySplit& split, double lipschitz_LF,
                              double eta);

/// Weight that maximizes the gap margin, found by golden-section search on
/// (beta, alpha). For this gap expression the optimum is the midpoint; the
/// search keeps the policy valid if the expression ever changes shape.
double select_eta(const DichotomySplit& split, double lipschitz_LF);

}  // namespace foliation
