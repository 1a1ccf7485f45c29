#pragma once

#include <cstddef>
#include <vector>

namespace eqm {

/// Barycentric Lagrange interpolant on an arbitrary strictly increasing grid.
class BarycentricInterpolant {
 public:
  BarycentricInterpolant() = default;
  BarycentricInterpolant(std::vector<double> nodes, std::vector<double> values);

  double operator()(double x) const;
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  void set_values(std::vector<double> values);

 private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> w_;
};

/// Chebyshev interpolation grid of the first kind mapped to (0,1),
/// ordered increasingly.
std::vector<double> chebyshev_nodes01(std::size_t n);

/// Coefficients c_k of f = c_0 + sum_{k>=1} c_k T_k(2t-1) from samples of f
/// at chebyshev_nodes01(n).
std::vector<double> chebyshev_coefficients(const std::vector<double>& samples_at_cheb_nodes);

/// Evaluates c_0 + sum c_k T_k(x), |x| <= 1 (Clenshaw).
double chebyshev_eval(const std::vector<double>& c, double x);

/// Natural cubic spline with analytic first/second derivatives of the
/// interpolant.  Used for tabulated kernel data; second-derivative accuracy
/// is O(h^2).
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  std::size_t segment(double x) const;
  std::vector<double> x_, y_, m_;  // m_ = second derivatives at knots
};

}  // namespace eqm
