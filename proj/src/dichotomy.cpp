#include "foliation/dichotomy.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "foliation/errors.hpp"

namespace foliation {

namespace {

void require_dimension(const DichotomySplit& split, const Vec& v) {
  if (v.size() != split.dimension())
    throw DomainError("vector dimension " + std::to_string(v.size()) +
                      " does not match split dimension " +
                      std::to_string(split.dimension()));
}

}  // namespace

DichotomySplit DichotomySplit::from_eigenvalues(
    std::vector<double> eigenvalues) {
  if (eigenvalues.empty()) throw ConfigError("empty eigenvalue list");
  DichotomySplit split;
  split.eigenvalues = std::move(eigenvalues);
  split.alpha = std::numeric_limits<double>::infinity();
  split.beta = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < split.eigenvalues.size(); ++i) {
    const double lambda = split.eigenvalues[i];
    if (std::abs(lambda) < 1e-14)
      throw ConfigError("eigenvalue " + std::to_string(i) +
                        " is zero; the splitting needs a gap around zero");
    if (lambda > 0.0) {
      split.unstable_set.push_back(i);
      split.alpha = std::min(split.alpha, lambda);
    } else {
      split.stable_set.push_back(i);
      split.beta = std::max(split.beta, lambda);
    }
  }
  split.bound_K = 1.0;
  return split;
}

Vec project_stable(const DichotomySplit& split, const Vec& v) {
  require_dimension(split, v);
  Vec r = zeros(v.size());
  for (std::size_t i : split.stable_set) r[i] = v[i];
  return r;
}

Vec project_unstable(const DichotomySplit& split, const Vec& v) {
  require_dimension(split, v);
  Vec r = zeros(v.size());
  for (std::size_t i : split.unstable_set) r[i] = v[i];
  return r;
}

Vec semigroup_apply(const DichotomySplit& split, double t, const Vec& v) {
  require_dimension(split, v);
  if (t < 0.0) {
    for (std::size_t i : split.stable_set)
      if (std::abs(v[i]) > 1e-12)
        throw DomainError(
            "backward semigroup time requires zero stable coordinates");
  }
  Vec r = zeros(v.size());
  for (std::size_t i : split.unstable_set)
    r[i] = std::exp(split.eigenvalues[i] * t) * v[i];
  if (t >= 0.0)
    for (std::size_t i : split.stable_set)
      r[i] = std::exp(split.eigenvalues[i] * t) * v[i];
  return r;
}

double gap_value(double K, double lipschitz_LF, double alpha, double beta,
                 double eta) {
  if (!(K >= 1.0)) throw DomainError("dichotomy constant K must be >= 1");
  if (!(lipschitz_LF >= 0.0))
    throw DomainError("Lipschitz constant must be nonnegative");
  if (!(beta < eta && eta < alpha))
    throw DomainError("eta must lie strictly between beta and alpha");
  double g = 0.0;
  if (std::isfinite(beta)) g += 1.0 / (eta - beta);
  if (std::isfinite(alpha)) g += 1.0 / (alpha - eta);
  return K * lipschitz_LF * g;
}

GapReport check_gap_condition(const DichotomySplit& split, double lipschitz_LF,
                              double eta) {
  GapReport report;
  report.eta = eta;
  report.value = gap_value(split.bound_K, lipschitz_LF, split.alpha,
                           split.beta, eta);
  report.margin = 1.0 - report.value;
  report.satisfied = report.value < 1.0;
  return report;
}

double select_eta(const DichotomySplit& split, double lipschitz_LF) {
  // Clamp half-infinite spectra to a finite search window; the gap term of
  // the missing side is zero there anyway.
  double lo = split.beta;
  double hi = split.alpha;
  if (!std::isfinite(lo)) lo = std::isfinite(hi) ? hi - 100.0 : -1.0;
  if (!std::isfinite(hi)) hi = std::isfinite(split.beta) ? split.beta + 100.0 : 1.0;
  const double span = hi - lo;
  lo += 1e-9 * span;
  hi -= 1e-9 * span;

  const auto value = [&](double eta) {
    return gap_value(split.bound_K, std::max(lipschitz_LF, 1.0), split.alpha,
                     split.beta, eta);
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = value(c), fd = value(d);
  for (int i = 0; i < 200 && (b - a) > 1e-12 * span; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = value(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace foliation
