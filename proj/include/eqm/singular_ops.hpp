#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "eqm/interp.hpp"
#include "eqm/specfun.hpp"

namespace eqm {

struct UnsupportedWeightError : std::domain_error {
  using std::domain_error::domain_error;
};

/// f(t) = w(tau) g(tau) on an interval, tau the reference coordinate in
/// (0,1) and w(tau) = tau^{beta_left} (1-tau)^{beta_right}.  The smooth
/// factor g is stored at the Gauss-Jacobi nodes of the weight and evaluated
/// off-node by barycentric interpolation.
class WeightedFunction {
 public:
  WeightedFunction() = default;
  WeightedFunction(double beta_left, double beta_right, std::vector<double> factor,
                   double t1 = 0.0, double t2 = 1.0);

  double t1() const { return t1_; }
  double t2() const { return t2_; }
  double beta_left() const { return beta_left_; }
  double beta_right() const { return beta_right_; }
  const QuadratureRule& rule() const { return rule_; }
  const std::vector<double>& factor() const { return factor_; }

  double reference_of(double t) const { return (t - t1_) / (t2_ - t1_); }
  double factor_at(double tau) const { return interp_(tau); }
  double weight_at(double tau) const;
  /// w(tau(t)) * g(tau(t)); note there is no 1/Length scaling here.
  double value_at(double t) const;
  /// integral of w * g over the reference interval.
  double reference_mass() const;

 private:
  double t1_ = 0.0, t2_ = 1.0;
  double beta_left_ = 0.0, beta_right_ = 0.0;
  QuadratureRule rule_;
  std::vector<double> factor_;
  BarycentricInterpolant interp_;
};

/// Closed form of (S w)(t), w(s) = s^{beta_left} (1-s)^{beta_right},
/// S the principal-value integral over (0,1).  Supported weights are the
/// pairs whose exponent sum is an integer (both exponents integral, or
/// fractional parts summing to one); other pairs throw
/// UnsupportedWeightError rather than falling back to slow quadrature.
double hilbert_of_weight(double beta_left, double beta_right, double t);

/// p.v. integral of f(s)/(t-s) over the function's interval, t strictly
/// interior, by singularity subtraction against the closed-form weight
/// transform.
double finite_hilbert(const WeightedFunction& f, double t);

/// Cauchy integral of f at a point outside the closed interval (regular).
double cauchy_integral_exterior(const WeightedFunction& f, double t);

/// Smooth scalar function given by samples; derivative samples optional.
struct SampledFunction {
  std::vector<double> t;
  std::vector<double> f;
  std::vector<double> df;
};

/// Riemann-Liouville fractional integral (I^a f)(t) with base point 0,
/// computed by piecewise-cubic product integration with exact kernel
/// moments.
double fractional_integral(double a, const SampledFunction& f, double t);

/// Riemann-Liouville fractional derivative (D^a f)(t) with base point
/// `start`, evaluated in the integrated-by-parts form
///   f(start) (t-start)^{-a} / Gamma(1-a) + (1/Gamma(1-a)) int f'(s) (t-s)^{-a} ds,
/// which requires derivative samples.
double fractional_derivative(double a, const SampledFunction& f, double t, double start = 0.0);

}  // namespace eqm
