#pragma once

#include <cstddef>
#include <vector>

#include "foliation/model.hpp"
#include "foliation/noise.hpp"

namespace foliation {

/// Planar saddle with a quadratic coupling into the unstable coordinate:
///   A = diag(-1, 1),  F(x, y) = (0, x^2),
/// tapered outside |u| = cutoff_radius. The stable axis is coordinate 0.
ModelSpec example1_model(double cutoff_radius = 2.0);

/// Closed form of the stable leaf of the transformed planar system through
/// (x0, y0), evaluated at stable coordinate x, to first order in eps:
///
///   y = y0 - (x^2 - x0^2)/3 - eps (x^2 - x0^2)/3 (Z(omega) + int_0^h e^{-3 tau} dW).
///
/// The trailing integral is truncated at `horizon`; requires
/// e^{-3 horizon} <= tail_tolerance (TruncationError otherwise) and horizon
/// within the path support.
double example1_analytic_leaf(double x, double x0, double y0, double eps,
                              const OUProcess& ou, double horizon,
                              double tail_tolerance = 1e-6);

/// Spectral Galerkin truncation of a scalar reaction-diffusion equation on
/// [0, 1] with Dirichlet boundary: eigenpairs
///   lambda_n = 10 - (n pi)^2,  e_n = sqrt(2) sin(n pi x),  n = 1..num_modes,
/// and cubic nonlinearity -u^3 projected pseudo-spectrally on a uniform
/// quadrature grid of 4 * num_modes intervals (exact for the cubic of a
/// trigonometric polynomial of this degree). Mode 1 is the only unstable
/// direction. Coefficient-space cutoff at cutoff_radius in the l2 norm.
ModelSpec example2_model(std::size_t num_modes = 8, double cutoff_radius = 0.1);

/// Function represented by sine-mode coefficients on [0, 1].
struct GalerkinField {
  Vec coefficients;  // coefficient of sqrt(2) sin((n+1) pi x) at index n

  double evaluate(double x) const;
};

/// Diagonal model from a declarative description: eigenvalue list plus a
/// scalar polynomial q applied componentwise, F(u)_i = q(u_i). The
/// coefficient vector is indexed by power; the constant and linear
/// coefficients must be zero so that F(0) = 0 and DF(0) = 0.
ModelSpec polynomial_diagonal_model(std::vector<double> eigenvalues,
                                    std::vector<double> poly_coefficients,
                                    double cutoff_radius);

/// Linear model (F identically zero). Useful as a null field in tests and
/// gap demonstrations.
ModelSpec linear_model(std::vector<double> eigenvalues);

}  // namespace foliation
