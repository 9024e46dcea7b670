#include "foliation/builtin_models.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "foliation/errors.hpp"

namespace foliation {

namespace {

// Dense 1-D scan used by the Lipschitz bounds below. The bounds are crude in
// the taper band but rigorous; they are what the gap condition consumes.
double scan_max(const std::function<double(double)>& f, double lo, double hi) {
  const int n = 8000;
  double best = f(lo);
  for (int i = 1; i <= n; ++i)
    best = std::max(best, f(lo + (hi - lo) * i / n));
  return best;
}

}  // namespace

ModelSpec example1_model(double cutoff_radius) {
  if (!(cutoff_radius > 0.0)) throw ConfigError("cutoff radius must be positive");

  CutoffField field;
  field.radius = cutoff_radius;
  field.raw = [](const Vec& u) { return Vec{0.0, u[0] * u[0]}; };
  field.raw_derivative = [](const Vec& u, const Vec& v) {
    return Vec{0.0, 2.0 * u[0] * v[0]};
  };

  ModelSpec model;
  model.name = "example1";
  model.dimension = 2;
  model.split = DichotomySplit::from_eigenvalues({-1.0, 1.0});
  model.cutoff_radius = cutoff_radius;
  model.F = field;
  model.derivative = [field](const Vec& u, const Vec& v) {
    return field.derivative(u, v);
  };

  // |D(chi F)| <= rho * (|chi'(s)| s^2 + 2 s chi(s)) on |u| = s * rho, using
  // |F_raw| <= |u|^2 and |DF_raw| <= 2 |u|.
  model.lipschitz_LF =
      cutoff_radius * scan_max(
                          [](double s) {
                            return std::abs(cutoff_profile_slope(s)) * s * s +
                                   2.0 * s * cutoff_profile(s);
                          },
                          0.0, 2.0);
  return model;
}

double example1_analytic_leaf(double x, double x0, double y0, double eps,
                              const OUProcess& ou, double horizon,
                              double tail_tolerance) {
  const double tail = std::exp(-3.0 * horizon);
  if (tail > tail_tolerance)
    throw TruncationError(
        "horizon too short: e^{-3 horizon} = " + std::to_string(tail),
        -std::log(tail_tolerance) / 3.0);
  const double correction = ito_integral(
      ou.path, [](double t) { return std::exp(-3.0 * t); }, 0.0, horizon);
  const double q = (x * x - x0 * x0) / 3.0;
  return y0 - q - eps * q * (ou.z0 + correction);
}

double GalerkinField::evaluate(double x) const {
  const double pi = std::numbers::pi;
  double u = 0.0;
  for (std::size_t n = 0; n < coefficients.size(); ++n)
    u += coefficients[n] * std::numbers::sqrt2 *
         std::sin(static_cast<double>(n + 1) * pi * x);
  return u;
}

ModelSpec example2_model(std::size_t num_modes, double cutoff_radius) {
  if (num_modes < 2) throw ConfigError("example2 needs at least 2 modes");
  if (!(cutoff_radius > 0.0)) throw ConfigError("cutoff radius must be positive");

  const double pi = std::numbers::pi;
  const std::size_t intervals = 4 * num_modes;

  // Interior uniform quadrature nodes; the integrand of every projection
  // vanishes at the endpoints, so the 1/M-weighted interior sum is the full
  // trapezoid rule. It is exact for the trigonometric polynomials produced
  // by cubing a mode-limited field (frequencies < 2 * intervals).
  auto table = std::make_shared<std::vector<Vec>>();
  table->resize(intervals - 1, zeros(num_modes));
  for (std::size_t j = 0; j + 1 < intervals; ++j) {
    const double x = static_cast<double>(j + 1) / static_cast<double>(intervals);
    for (std::size_t n = 0; n < num_modes; ++n)
      (*table)[j][n] = std::numbers::sqrt2 *
                       std::sin(static_cast<double>(n + 1) * pi * x);
  }

  auto node_values = [table](const Vec& a) {
    Vec u(table->size(), 0.0);
    for (std::size_t j = 0; j < table->size(); ++j)
      u[j] = dot((*table)[j], a);
    return u;
  };
  auto project = [table, intervals](const Vec& w) {
    Vec b(zeros((*table)[0].size()));
    for (std::size_t j = 0; j < table->size(); ++j)
      axpy(b, w[j] / static_cast<double>(intervals), (*table)[j]);
    return b;
  };

  CutoffField field;
  field.radius = cutoff_radius;
  field.raw = [node_values, project](const Vec& a) {
    Vec u = node_values(a);
    for (double& x : u) x = -x * x * x;
    return project(u);
  };
  field.raw_derivative = [node_values, project](const Vec& a, const Vec& v) {
    Vec u = node_values(a);
    Vec h = node_values(v);
    for (std::size_t j = 0; j < u.size(); ++j) h[j] *= -3.0 * u[j] * u[j];
    return project(h);
  };

  ModelSpec model;
  model.name = "example2";
  model.dimension = num_modes;
  Vec eigenvalues(num_modes);
  for (std::size_t n = 0; n < num_modes; ++n) {
    const double k = static_cast<double>(n + 1) * pi;
    eigenvalues[n] = 10.0 - k * k;
  }
  model.split = DichotomySplit::from_eigenvalues(eigenvalues);
  model.cutoff_radius = cutoff_radius;
  model.F = field;
  model.derivative = [field](const Vec& u, const Vec& v) {
    return field.derivative(u, v);
  };

  // Sup-norm route: |u|_inf <= sqrt(2 N) |a|, so on |a| = s * rho
  //   |F_raw| <= 2 N (s rho)^3  and  |DF_raw| <= 6 N (s rho)^2,
  // giving |D(chi F)| <= N rho^2 (2 |chi'| s^3 + 6 chi s^2).
  const double n_modes = static_cast<double>(num_modes);
  model.lipschitz_LF =
      n_modes * cutoff_radius * cutoff_radius *
      scan_max(
          [](double s) {
            return 2.0 * std::abs(cutoff_profile_slope(s)) * s * s * s +
                   6.0 * cutoff_profile(s) * s * s;
          },
          0.0, 2.0);
  return model;
}

ModelSpec polynomial_diagonal_model(std::vector<double> eigenvalues,
                                    std::vector<double> poly_coefficients,
                                    double cutoff_radius) {
  if (!(cutoff_radius > 0.0)) throw ConfigError("cutoff radius must be positive");
  if (poly_coefficients.size() >= 1 && poly_coefficients[0] != 0.0)
    throw ConfigError("polynomial constant coefficient must be zero");
  if (poly_coefficients.size() >= 2 && poly_coefficients[1] != 0.0)
    throw ConfigError("polynomial linear coefficient must be zero");

  auto coeffs = std::make_shared<std::vector<double>>(poly_coefficients);
  auto q = [coeffs](double s) {
    double acc = 0.0;
    for (std::size_t k = coeffs->size(); k-- > 0;)
      acc = acc * s + (*coeffs)[k];
    return acc;
  };
  auto q_prime = [coeffs](double s) {
    double acc = 0.0;
    for (std::size_t k = coeffs->size(); k-- > 1;)
      acc = acc * s + static_cast<double>(k) * (*coeffs)[k];
    return acc;
  };

  CutoffField field;
  field.radius = cutoff_radius;
  field.raw = [q](const Vec& u) {
    Vec r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = q(u[i]);
    return r;
  };
  field.raw_derivative = [q_prime](const Vec& u, const Vec& v) {
    Vec r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = q_prime(u[i]) * v[i];
    return r;
  };

  ModelSpec model;
  model.name = "custom";
  model.dimension = eigenvalues.size();
  model.split = DichotomySplit::from_eigenvalues(std::move(eigenvalues));
  model.cutoff_radius = cutoff_radius;
  model.F = field;
  model.derivative = [field](const Vec& u, const Vec& v) {
    return field.derivative(u, v);
  };

  // Radius-resolved slope bound Q'(r) = max_{|t| <= r} |q'(t)| feeds the same
  // taper scan as the built-in examples: componentwise maps satisfy
  // |F_raw(u) - F_raw(v)| <= Q'(r) |u - v| on the ball of radius r.
  auto q_slope_bound = [q_prime](double r) {
    const int n = 400;
    double best = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double t = -r + 2.0 * r * i / n;
      best = std::max(best, std::abs(q_prime(t)));
    }
    return best;
  };
  model.lipschitz_LF = scan_max(
      [&](double s) {
        return q_slope_bound(s * cutoff_radius) *
               (std::abs(cutoff_profile_slope(s)) * s + cutoff_profile(s));
      },
      0.0, 2.0);
  return model;
}

ModelSpec linear_model(std::vector<double> eigenvalues) {
  ModelSpec model;
  model.name = "linear";
  model.dimension = eigenvalues.size();
  model.split = DichotomySplit::from_eigenvalues(std::move(eigenvalues));
  model.F = [](const Vec& u) { return zeros(u.size()); };
  model.derivative = [](const Vec& u, const Vec&) { return zeros(u.size()); };
  model.lipschitz_LF = 0.0;
  return model;
}

}  // namespace foliation
