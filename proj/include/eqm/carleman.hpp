#pragma once

#include <functional>
#include <vector>

#include "eqm/singular_ops.hpp"
#include "eqm/specfun.hpp"

namespace eqm {

/// Twice-differentiable right-hand side data for Carleman's equation.
struct FunctionData {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// (V_a * u)(t) on the reference interval for a in (0,1): the convolution
/// int_0^1 |t-s|^{-a} u(s) ds split at s = t, each side by Jacobi-weighted
/// quadrature absorbing the kernel singularity into the weight.
class RieszConvolver {
 public:
  RieszConvolver(double a, const WeightedFunction& u, std::size_t quad_n = 96);
  double operator()(double t) const;

 private:
  double a_;
  const WeightedFunction& u_;
  QuadratureRule edge_bl_, edge_br_, edge_a_, at0_, at1_;
};

/// (V_0 * u)(t) = int_0^1 -log|t-s| u(s) ds on the reference interval via
/// the Chebyshev expansion of phi_0 * u.
class LogConvolver {
 public:
  explicit LogConvolver(const WeightedFunction& u, std::size_t n_modes = 0);
  double operator()(double t) const;

 private:
  std::vector<double> coeff_;
};

/// Dispatches on a; t may be anywhere in [0,1].
double riesz_potential(double a, const WeightedFunction& u, double t);

/// Regular weighted integral int_0^1 w(s) g(s) F(s) ds with F allowed to be
/// steep (but finite) near the endpoints; dyadically graded panels.
double weighted_graded_integral(const WeightedFunction& u,
                                const std::function<double(double)>& F);

struct CarlemanSolution {
  WeightedFunction density;  // exponents (-(1-a)/2, -(1-a)/2)
  double mass = 0.0;
  double residual_sup = 0.0;
};

/// Applies the explicit solution operator of V_a * u = f on (0,1).
CarlemanSolution carleman_apply(double a, const FunctionData& f, std::size_t n = 256);

/// Closed-form image of a polynomial sum_k coeffs[k] t^k: a polynomial of
/// the same degree divided by phi_a, with coefficients built from Gamma
/// ratios.
WeightedFunction carleman_polynomial(double a, const std::vector<double>& coefficients,
                                     std::size_t n = 256);

/// sup over targets of |(V_a * u)(t) - f(t)|.
double verify_residual(double a, const WeightedFunction& u,
                       const std::function<double(double)>& f,
                       const std::vector<double>& targets);

/// 50 interior points with a 0.02 margin from each endpoint.
std::vector<double> default_residual_targets();

}  // namespace eqm
