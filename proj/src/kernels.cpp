#include "eqm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "eqm/specfun.hpp"

namespace eqm {

namespace {
constexpr double kLog2 = 0.69314718055994530942;

void require_exponent(double a) {
  if (!(a >= 0.0) || !(a < 1.0)) throw std::domain_error("singular exponent a must lie in [0,1)");
}
}  // namespace

double riesz_eval(double a, double r) {
  require_exponent(a);
  if (r == 0.0) throw std::domain_error("riesz_eval: kernel is singular at r = 0");
  const double ar = std::fabs(r);
  return (a == 0.0) ? -std::log(ar) : std::pow(ar, -a);
}

double riesz_derivative(double a, double r) {
  require_exponent(a);
  if (r == 0.0) throw std::domain_error("riesz_derivative: singular at r = 0");
  const double ar = std::fabs(r);
  const double d = (a == 0.0) ? -1.0 / ar : -a * std::pow(ar, -a - 1.0);
  return (r > 0.0) ? d : -d;
}

double riesz_second_derivative(double a, double r) {
  require_exponent(a);
  if (r == 0.0) throw std::domain_error("riesz_second_derivative: singular at r = 0");
  const double ar = std::fabs(r);
  return (a == 0.0) ? 1.0 / (ar * ar) : a * (a + 1.0) * std::pow(ar, -a - 2.0);
}

Deriv2 dislocation_vreg(double t) {
  const double tau = std::fabs(t);
  Deriv2 out;
  if (tau <= 1e-2) {
    // Degree-8 Taylor series of cosh(t)/psi(t) - log(2 psi(t)), psi = sinh(t)/t.
    const double u = tau * tau;
    out.value = (1.0 - kLog2) + u * (1.0 / 6.0 + u * (-1.0 / 60.0 + u * (1.0 / 567.0 - u / 5400.0)));
    const double d1 =
        tau * (1.0 / 3.0 + u * (-1.0 / 15.0 + u * (2.0 / 189.0 - u / 675.0)));
    out.d1 = (t >= 0.0) ? d1 : -d1;
    out.d2 = 1.0 / 3.0 + u * (-1.0 / 5.0 + u * (10.0 / 189.0 - 7.0 * u / 675.0));
    return out;
  }
  const double sh = std::sinh(tau), ch = std::cosh(tau);
  out.value = tau * ch / sh - std::log(2.0 * sh) + std::log(tau);
  const double d1 = 1.0 / tau - tau / (sh * sh);
  out.d1 = (t >= 0.0) ? d1 : -d1;
  out.d2 = -1.0 / (tau * tau) - 1.0 / (sh * sh) + 2.0 * tau * ch / (sh * sh * sh);
  return out;
}

VregSpec VregSpec::zero() { return VregSpec{}; }

VregSpec VregSpec::dislocation() {
  VregSpec v;
  v.kind_ = Kind::Dislocation;
  return v;
}

VregSpec VregSpec::polynomial(std::vector<double> even_coefficients) {
  VregSpec v;
  v.kind_ = Kind::Polynomial;
  v.coeffs_ = std::move(even_coefficients);
  return v;
}

VregSpec VregSpec::tabulated(std::vector<double> grid, std::vector<double> values) {
  VregSpec v;
  v.kind_ = Kind::Tabulated;
  if (grid.empty() || grid.front() != 0.0)
    throw std::invalid_argument("VregSpec::tabulated: grid must start at 0 (even function data)");
  v.spline_ = CubicSpline(std::move(grid), std::move(values));
  return v;
}

VregSpec VregSpec::rescaled(double amp, double arg, double offset) const {
  VregSpec v = *this;
  v.offset_ = amp * offset_ + offset;
  v.amp_ = amp * amp_;
  v.arg_ = arg * arg_;
  return v;
}

Deriv2 VregSpec::eval(double r) const {
  const double x = arg_ * r;
  Deriv2 base;
  switch (kind_) {
    case Kind::Zero:
      break;
    case Kind::Dislocation:
      base = dislocation_vreg(x);
      break;
    case Kind::Polynomial: {
      const double tau = std::fabs(x);
      const double u = tau * tau;
      double v = 0.0;
      for (std::size_t k = coeffs_.size(); k-- > 0;) v = v * u + coeffs_[k];
      base.value = v;
      for (std::size_t k = 1; k < coeffs_.size(); ++k) {
        const double kk = 2.0 * static_cast<double>(k);
        base.d1 += kk * coeffs_[k] * std::pow(tau, kk - 1.0);
        base.d2 += kk * (kk - 1.0) * coeffs_[k] * std::pow(tau, kk - 2.0);
      }
      if (x < 0.0) base.d1 = -base.d1;
      break;
    }
    case Kind::Tabulated: {
      const double tau = std::fabs(x);
      base.value = spline_.value(tau);
      base.d1 = (x >= 0.0 ? 1.0 : -1.0) * spline_.derivative(tau);
      base.d2 = spline_.second_derivative(tau);
      break;
    }
  }
  Deriv2 out;
  out.value = amp_ * base.value + offset_;
  out.d1 = amp_ * arg_ * base.d1;
  out.d2 = amp_ * arg_ * arg_ * base.d2;
  return out;
}

KernelSpec make_kernel(double a, VregSpec vreg) {
  require_exponent(a);
  return KernelSpec{a, std::move(vreg)};
}

PotentialSpec PotentialSpec::zero() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::affine(double gamma) {
  PotentialSpec p;
  p.form_ = Form::Affine;
  p.coeffs_ = {0.0, gamma};
  return p;
}

PotentialSpec PotentialSpec::quadratic(double c0, double c1, double c2) {
  PotentialSpec p;
  p.form_ = Form::Quadratic;
  p.coeffs_ = {c0, c1, c2};
  return p;
}

PotentialSpec PotentialSpec::polynomial(std::vector<double> coefficients) {
  PotentialSpec p;
  p.form_ = Form::Polynomial;
  p.coeffs_ = std::move(coefficients);
  return p;
}

PotentialSpec& PotentialSpec::with_barriers(double s1, double s2) {
  if (!(s1 < s2)) throw std::domain_error("PotentialSpec: barriers must satisfy s1 < s2");
  s1_ = s1;
  s2_ = s2;
  return *this;
}

double PotentialSpec::value(double t) const {
  double v = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 0;) v = v * t + coeffs_[k];
  return v;
}

double PotentialSpec::d1(double t) const {
  double v = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 1;)
    v = v * t + static_cast<double>(k) * coeffs_[k];
  return v;
}

double PotentialSpec::d2(double t) const {
  double v = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 2;)
    v = v * t + static_cast<double>(k) * static_cast<double>(k - 1) * coeffs_[k];
  return v;
}

PotentialSpec PotentialSpec::rescaled_to_unit(double t1, double L, double a) const {
  PotentialSpec p = *this;
  const std::size_t n = coeffs_.size();
  std::vector<double> out(n, 0.0);
  // L^a * U(L t + t1) expanded exactly.
  std::vector<double> binom(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double c = coeffs_[j];
    // contribute c * (Lt + t1)^j
    double choose = 1.0;
    for (std::size_t i = 0; i <= j; ++i) {
      out[i] += c * choose * std::pow(L, static_cast<double>(i)) *
                std::pow(t1, static_cast<double>(j - i));
      choose *= static_cast<double>(j - i) / static_cast<double>(i + 1);
    }
  }
  const double amp = std::pow(L, a);
  for (auto& c : out) c *= amp;
  p.coeffs_ = std::move(out);
  if (std::isfinite(s1_)) p.s1_ = (s1_ - t1) / L;
  if (std::isfinite(s2_)) p.s2_ = (s2_ - t1) / L;
  return p;
}

namespace {

// Compactly supported even convex extension of V to [-b, b]: a power tail
// A (b-r)^m on (1, b] matching value and slope at r = 1 when possible.
struct Extension {
  double b = 1.0;
  double A = 0.0;
  double m = 2.0;
  bool has_tail = false;
};

Extension build_extension(const KernelSpec& k, double b) {
  if (!(b >= 1.0)) throw std::domain_error("kernel_fourier: support halfwidth b must be >= 1");
  Extension ext;
  ext.b = b;
  if (b == 1.0) return ext;
  const double V1 = k.value(1.0);
  const double dV1 = k.d1(1.0);
  if (std::fabs(V1) <= 1e-12) return ext;  // truncation, kink at 1 stays convex
  if (!(V1 > 0.0) || !(dV1 < 0.0))
    throw std::domain_error("kernel_fourier: no convex compactly supported extension (V(1) or V'(1) has the wrong sign)");
  const double m = (b - 1.0) * (-dV1) / V1;
  if (!(m > 1.0))
    throw std::domain_error("kernel_fourier: extension tail exponent <= 1; increase b");
  ext.has_tail = true;
  ext.m = m;
  ext.A = V1 / std::pow(b - 1.0, m);
  return ext;
}

double extended_value(const KernelSpec& k, const Extension& ext, double r) {
  if (r <= 1.0) return k.value(r);
  if (!ext.has_tail || r >= ext.b) return 0.0;
  return ext.A * std::pow(ext.b - r, ext.m);
}

// int_0^1 (-log x) cos(c x) dx by the rapidly converging Taylor series in c
// (used with |c| <= pi/2 only).
double neglog_cos_moment(double c) {
  double acc = 0.0, term;
  const double c2 = c * c;
  double pw = 1.0;       // c^{2k}
  double fact = 1.0;     // (2k)!
  for (int k = 0; k <= 16; ++k) {
    term = ((k % 2 == 0) ? 1.0 : -1.0) * pw / (fact * (2.0 * k + 1.0) * (2.0 * k + 1.0));
    acc += term;
    pw *= c2;
    fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
    if (std::fabs(term) < 1e-18) break;
  }
  return acc;
}

}  // namespace

std::vector<double> kernel_fourier(const KernelSpec& kernel, double b,
                                   const std::vector<double>& omega_grid) {
  for (double w : omega_grid)
    if (!std::isfinite(w)) throw std::domain_error("kernel_fourier: non-finite frequency");
  const Extension ext = build_extension(kernel, b);

  static const QuadratureRule gl = gauss_legendre(16);
  const QuadratureRule gj_head =
      (kernel.a > 0.0) ? gauss_jacobi(24, -kernel.a, 0.0) : QuadratureRule{};

  std::vector<double> out;
  out.reserve(omega_grid.size());
  for (double omega : omega_grid) {
    const double w = std::fabs(omega);
    const double delta = std::min(0.5, 1.0 / std::max(1.0, 8.0 * w));
    double acc = 0.0;

    // Head [0, delta]: Riesz part with the singularity in the weight,
    // regular part by plain Gauss.
    const double c = 2.0 * M_PI * w * delta;
    if (kernel.a > 0.0) {
      double s = 0.0;
      for (std::size_t i = 0; i < gj_head.n; ++i)
        s += gj_head.weights[i] * std::cos(c * gj_head.nodes[i]);
      acc += std::pow(delta, 1.0 - kernel.a) * s;
    } else {
      const double sinc = (c == 0.0) ? 1.0 : std::sin(c) / c;
      acc += delta * (-std::log(delta) * sinc + neglog_cos_moment(c));
    }
    acc += delta * gl.integrate([&](double x) {
      const double r = delta * x;
      return kernel.vreg.value(r) * std::cos(2.0 * M_PI * w * r);
    });

    // Body [delta, b]: panels no wider than a quarter period.
    const double width = std::min(0.25, (w > 0.0) ? 1.0 / (4.0 * w) : 0.25);
    const int panels = std::max(1, static_cast<int>(std::ceil((ext.b - delta) / width)));
    const double h = (ext.b - delta) / panels;
    for (int p = 0; p < panels; ++p) {
      const double r0 = delta + p * h;
      acc += h * gl.integrate([&](double x) {
        const double r = r0 + h * x;
        return extended_value(kernel, ext, r) * std::cos(2.0 * M_PI * w * r);
      });
    }
    out.push_back(2.0 * acc);
  }
  return out;
}

namespace {

void push(AssumptionReport& rep, std::string name, bool pass, double measured,
          std::string detail) {
  rep.entries.push_back({std::move(name), pass, measured, std::move(detail)});
}

}  // namespace

AssumptionReport check_assumptions(const KernelSpec& kernel, const PotentialSpec& potential,
                                   AssumptionCase which) {
  AssumptionReport rep;
  const int M = 1 << 12;

  // V_reg even at sampled points.
  double even_dev = 0.0;
  for (int i = 1; i <= 64; ++i) {
    const double r = static_cast<double>(i) / 64.0;
    even_dev = std::max(even_dev, std::fabs(kernel.vreg.value(r) - kernel.vreg.value(-r)));
  }
  push(rep, "vreg_even", even_dev <= 1e-12, even_dev, "max |V_reg(r)-V_reg(-r)|");

  // Convexity of the full kernel on interior sample points.
  double min_vpp = std::numeric_limits<double>::infinity();
  for (int i = 1; i < M; ++i) {
    const double r = static_cast<double>(i) / M;
    min_vpp = std::min(min_vpp, kernel.d2(r));
  }
  push(rep, "kernel_convex", min_vpp >= -1e-10, min_vpp, "min V''(r) on (0,1)");

  // Blow-up rate: ess inf_{0<s<r} V''(s) >= c / r^{2+a} at dyadic radii.
  double c_blow = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= 12; ++j) {
    const double r = std::pow(2.0, -j);
    double inf_v = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 64; ++i) inf_v = std::min(inf_v, kernel.d2(r * i / 64.0));
    c_blow = std::min(c_blow, inf_v * std::pow(r, 2.0 + kernel.a));
  }
  push(rep, "kernel_blowup_rate", c_blow > 0.0, c_blow,
       "min over dyadic r of r^{2+a} * inf_(0,r) V''");

  const bool fixed = (which == AssumptionCase::FixedInterval);

  if (fixed) {
    // Normalisation constant c with V(1) + 2c' ... : the solver absorbs an
    // additive constant so the condition V(1) = -V'(1) >= 0 is checked after
    // shifting by that constant.
    const double shift = -(kernel.value(1.0) + kernel.d1(1.0)) / 1.0;
    const double v1 = kernel.value(1.0) + shift;
    const bool ok = v1 >= -1e-12 && -kernel.d1(1.0) >= -1e-12;
    push(rep, "kernel_endpoint_normalisation", ok, v1,
         "V(1) after additive normalisation (= -V'(1))");

    double sup_du = 0.0, min_u = std::numeric_limits<double>::infinity(),
           min_upp = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= M; ++i) {
      const double t = static_cast<double>(i) / M;
      sup_du = std::max(sup_du, std::fabs(potential.d1(t)));
      min_u = std::min(min_u, potential.value(t));
      min_upp = std::min(min_upp, potential.d2(t));
    }
    push(rep, "potential_nonnegative", min_u >= -1e-10, min_u, "min U on [0,1]");
    push(rep, "potential_convex", min_upp >= -1e-10, min_upp, "min U'' on [0,1]");
    const double slope_cap = std::fabs(kernel.d1(1.0));
    push(rep, "potential_slope_bound", sup_du <= slope_cap + 1e-12, sup_du,
         "sup |U'| vs |V'(1)| = " + std::to_string(slope_cap));
  } else {
    const double lo = potential.has_left_barrier() ? potential.barrier_left() : -20.0;
    const double hi = potential.has_right_barrier() ? potential.barrier_right() : 20.0;
    double min_u = std::numeric_limits<double>::infinity(),
           min_upp = std::numeric_limits<double>::infinity();
    double argmin = lo;
    for (int i = 0; i <= M; ++i) {
      const double t = lo + (hi - lo) * i / M;
      const double u = potential.value(t);
      if (u < min_u) {
        min_u = u;
        argmin = t;
      }
      min_upp = std::min(min_upp, potential.d2(t));
    }
    push(rep, "potential_bounded_below", std::isfinite(min_u), min_u, "min U on sample grid");
    push(rep, "potential_convex", min_upp >= -1e-10, min_upp, "min U'' on sample grid");

    // Linear growth U(t) >= c (|t| - C) on the unbarried sides.
    double growth = std::numeric_limits<double>::infinity();
    const double C0 = std::fabs(argmin) + 1.0;
    bool growth_applicable = false;
    for (int i = 0; i <= M; ++i) {
      const double t = lo + (hi - lo) * i / M;
      if (std::fabs(t) <= C0 + 1.0) continue;
      if (t < 0.0 && potential.has_left_barrier()) continue;
      if (t > 0.0 && potential.has_right_barrier()) continue;
      growth_applicable = true;
      growth = std::min(growth, (potential.value(t) - min_u) / (std::fabs(t) - C0));
    }
    if (!growth_applicable) growth = 1.0;  // both sides barred: nothing to confine
    push(rep, "potential_linear_growth", growth > 0.0, growth,
         "min (U - min U)/(|t| - C) beyond C = " + std::to_string(C0));
  }
  return rep;
}

}  // namespace eqm
