#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "eqm/interp.hpp"

namespace eqm {

/// Riesz part of the interaction kernel: |r|^{-a} for a in (0,1), -log|r|
/// for a = 0.
double riesz_eval(double a, double r);
double riesz_derivative(double a, double r);
double riesz_second_derivative(double a, double r);

struct Deriv2 {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Regular part of the dislocation interaction t*coth(t) - log|2 sinh t|
/// after removing -log|t|.  Even, analytic; evaluated by series near 0.
Deriv2 dislocation_vreg(double t);

/// Regular kernel part with two derivatives.
class VregSpec {
 public:
  enum class Kind { Zero, Dislocation, Polynomial, Tabulated };

  static VregSpec zero();
  static VregSpec dislocation();
  /// Even polynomial sum c_k r^{2k} given by coefficients (c_0, c_1, ...).
  static VregSpec polynomial(std::vector<double> even_coefficients);
  /// Tabulated values on a grid of |r|; cubic interpolation.
  static VregSpec tabulated(std::vector<double> grid, std::vector<double> values);

  Kind kind() const { return kind_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  /// Affine-rescaled copy amp * base(arg * r) + offset.
  VregSpec rescaled(double amp, double arg, double offset) const;

  Deriv2 eval(double r) const;
  double value(double r) const { return eval(r).value; }
  double d1(double r) const { return eval(r).d1; }
  double d2(double r) const { return eval(r).d2; }
  bool is_zero() const { return kind_ == Kind::Zero && offset_ == 0.0; }

 private:
  Kind kind_ = Kind::Zero;
  std::vector<double> coeffs_;
  CubicSpline spline_;
  double amp_ = 1.0, arg_ = 1.0, offset_ = 0.0;
};

/// Interaction kernel V = V_a + V_reg.
struct KernelSpec {
  double a = 0.0;  // singular exponent in [0,1)
  VregSpec vreg = VregSpec::zero();

  double value(double r) const { return riesz_eval(a, r) + vreg.value(r); }
  double d1(double r) const { return riesz_derivative(a, r) + vreg.d1(r); }
  double d2(double r) const { return riesz_second_derivative(a, r) + vreg.d2(r); }
};

KernelSpec make_kernel(double a, VregSpec vreg = VregSpec::zero());

/// External field U, convex, possibly +infinity outside the barriers.
class PotentialSpec {
 public:
  enum class Form { Zero, Affine, Quadratic, Polynomial };

  static PotentialSpec zero();
  static PotentialSpec affine(double gamma);
  static PotentialSpec quadratic(double c0, double c1, double c2);
  static PotentialSpec polynomial(std::vector<double> coefficients);

  PotentialSpec& with_barriers(double s1, double s2);

  Form form() const { return form_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  double barrier_left() const { return s1_; }
  double barrier_right() const { return s2_; }
  bool has_left_barrier() const { return std::isfinite(s1_); }
  bool has_right_barrier() const { return std::isfinite(s2_); }

  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;

  /// U(L t + t1) * L^a with coefficients composed exactly; barriers mapped.
  PotentialSpec rescaled_to_unit(double t1, double L, double a) const;

 private:
  Form form_ = Form::Zero;
  std::vector<double> coeffs_;  // ascending powers
  double s1_ = -std::numeric_limits<double>::infinity();
  double s2_ = std::numeric_limits<double>::infinity();
};

/// Cosine transform V^(w) = int V(t) cos(2 pi w t) dt of the kernel after
/// even, convex, compactly supported extension to [-b, b].
std::vector<double> kernel_fourier(const KernelSpec& kernel, double b,
                                   const std::vector<double>& omega_grid);

enum class AssumptionCase { FixedInterval, FreeBoundary };

struct AssumptionEntry {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionEntry> entries;
  bool all_pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
};

AssumptionReport check_assumptions(const KernelSpec& kernel, const PotentialSpec& potential,
                                   AssumptionCase which);

}  // namespace eqm
