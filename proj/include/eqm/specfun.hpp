#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace eqm {

/// Gamma function for strictly positive real arguments.
/// Relative accuracy is ~1e-15 on (0, 50]; arguments above ~171 overflow
/// to +inf like std::tgamma would.
double gamma_fn(double x);

/// log Gamma for x > 0.
double log_gamma(double x);

/// Closed form of the convolution moment
///   int_0^t s^{alpha-1} (t-s)^{beta-1} ds = B(alpha,beta) t^{alpha+beta-1}.
double beta_moment(double alpha, double beta, double t);

/// Euler Beta B(a,b), a,b > 0.
double beta_fn(double a, double b);

/// Gauss rule for the weight t^{beta_left} (1-t)^{beta_right} on (0,1).
///
/// Nodes are strictly increasing in (0,1), weights positive, and the rule
/// integrates polynomials of degree <= 2n-1 exactly against the weight.
struct QuadratureRule {
  std::size_t n = 0;
  double beta_left = 0.0;
  double beta_right = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  /// Applies the rule to a callable of the smooth (non-weight) part.
  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

QuadratureRule gauss_jacobi(std::size_t n, double beta_left, double beta_right);

/// Gauss-Legendre on (0,1); shorthand for gauss_jacobi(n, 0, 0).
QuadratureRule gauss_legendre(std::size_t n);

}  // namespace eqm
