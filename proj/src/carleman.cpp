#include "eqm/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eqm {

namespace {
constexpr double kLog2 = 0.69314718055994530942;

void require_a(double a) {
  if (!(a >= 0.0) || !(a < 1.0)) throw std::domain_error("singular exponent a must lie in [0,1)");
}
}  // namespace

namespace {

// int_0^1 x^{a0} (1-x)^{a1} G(x) dx where G is smooth inside but may be
// steep (finite) toward the endpoints: the weight is absorbed exactly in
// the innermost cells, dyadic panels cover the steep approach.
template <class G>
double graded_jacobi_integral(double a0, double a1, const QuadratureRule& edge0,
                              const QuadratureRule& edge1, const QuadratureRule& gl, G&& g) {
  const int levels = 30;
  const double h0 = std::pow(0.5, levels);
  double acc = 0.0;
  for (std::size_t i = 0; i < edge0.n; ++i) {
    const double x = h0 * edge0.nodes[i];
    acc += std::pow(h0, 1.0 + a0) * edge0.weights[i] * std::pow(1.0 - x, a1) * g(x);
  }
  for (std::size_t i = 0; i < edge1.n; ++i) {
    const double x = 1.0 - h0 * edge1.nodes[i];
    acc += std::pow(h0, 1.0 + a1) * edge1.weights[i] * std::pow(x, a0) * g(x);
  }
  for (int j = levels; j >= 1; --j) {
    const double lo = std::pow(0.5, j), hi = (j == 1) ? 0.5 : std::pow(0.5, j - 1);
    acc += (hi - lo) * gl.integrate([&](double u) {
      const double x = lo + (hi - lo) * u;
      return std::pow(x, a0) * std::pow(1.0 - x, a1) * g(x);
    });
    const double rlo = 1.0 - hi, rhi = 1.0 - lo;
    acc += (rhi - rlo) * gl.integrate([&](double u) {
      const double x = rlo + (rhi - rlo) * u;
      return std::pow(x, a0) * std::pow(1.0 - x, a1) * g(x);
    });
  }
  return acc;
}

}  // namespace

RieszConvolver::RieszConvolver(double a, const WeightedFunction& u, std::size_t quad_n)
    : a_(a), u_(u) {
  if (!(a > 0.0) || !(a < 1.0)) throw std::domain_error("RieszConvolver: a must be in (0,1)");
  const std::size_t ne = std::min<std::size_t>(quad_n, 32);
  edge_bl_ = gauss_jacobi(ne, u.beta_left(), 0.0);
  edge_br_ = gauss_jacobi(ne, u.beta_right(), 0.0);
  edge_a_ = gauss_jacobi(ne, -a, 0.0);
  at0_ = gauss_jacobi(quad_n, u.beta_left() - a, u.beta_right());
  at1_ = gauss_jacobi(quad_n, u.beta_left(), u.beta_right() - a);
}

double RieszConvolver::operator()(double t) const {
  const double tau = u_.reference_of(t);
  const double bl = u_.beta_left(), br = u_.beta_right();
  if (tau < -1e-14 || tau > 1.0 + 1e-14)
    throw std::domain_error("RieszConvolver: point outside [0,1]");
  if (tau <= 1e-14) {
    double acc = 0.0;
    for (std::size_t i = 0; i < at0_.n; ++i)
      acc += at0_.weights[i] * u_.factor_at(at0_.nodes[i]);
    return acc;
  }
  if (tau >= 1.0 - 1e-14) {
    double acc = 0.0;
    for (std::size_t i = 0; i < at1_.n; ++i)
      acc += at1_.weights[i] * u_.factor_at(at1_.nodes[i]);
    return acc;
  }
  static const QuadratureRule gl = gauss_legendre(16);
  // left piece: s = tau x carries the weight pair (bl, -a); the (1-s)^{br}
  // factor is finite but steep when tau is close to 1
  double acc = std::pow(tau, 1.0 + bl - a_) *
               graded_jacobi_integral(bl, -a_, edge_bl_, edge_a_, gl, [&](double x) {
                 const double s = tau * x;
                 return std::pow(1.0 - s, br) * u_.factor_at(s);
               });
  // right piece: s = tau + (1-tau) x carries (-a, br); s^{bl} is steep
  // toward x = 0 when tau is small
  acc += std::pow(1.0 - tau, 1.0 + br - a_) *
         graded_jacobi_integral(-a_, br, edge_a_, edge_br_, gl, [&](double x) {
           const double s = tau + (1.0 - tau) * x;
           return std::pow(s, bl) * u_.factor_at(s);
         });
  return acc;
}

LogConvolver::LogConvolver(const WeightedFunction& u, std::size_t n_modes) {
  const double el = u.beta_left() + 0.5, er = u.beta_right() + 0.5;
  if (el < -1e-12 || er < -1e-12)
    throw std::domain_error("LogConvolver: exponents below -1/2 are outside the a = 0 class");
  const bool half_integer = std::fabs(el - std::round(el)) < 1e-9 &&
                            std::fabs(er - std::round(er)) < 1e-9;
  std::size_t n = n_modes;
  if (n == 0) n = half_integer ? std::max<std::size_t>(2 * u.rule().n + 32, 128) : 2048;
  const auto nodes = chebyshev_nodes01(n);
  std::vector<double> q(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = nodes[j];
    q[j] = std::pow(s, el) * std::pow(1.0 - s, er) * u.factor_at(s);
  }
  coeff_ = chebyshev_coefficients(q);
}

double LogConvolver::operator()(double t) const {
  // int -log|t-s| q(s)/phi_0(s) ds = 2 pi log2 c_0 + sum_k (pi/k) c_k T_k(x)
  const double x = 2.0 * t - 1.0;
  if (x < -1.0 - 1e-14 || x > 1.0 + 1e-14)
    throw std::domain_error("LogConvolver: point outside [0,1]");
  const double xc = std::clamp(x, -1.0, 1.0);
  double acc = 2.0 * M_PI * kLog2 * coeff_[0];
  double tkm1 = 1.0, tk = xc;
  for (std::size_t k = 1; k < coeff_.size(); ++k) {
    acc += M_PI / static_cast<double>(k) * coeff_[k] * tk;
    const double tkp1 = 2.0 * xc * tk - tkm1;
    tkm1 = tk;
    tk = tkp1;
  }
  return acc;
}

double riesz_potential(double a, const WeightedFunction& u, double t) {
  require_a(a);
  if (a == 0.0) return LogConvolver(u)(t);
  return RieszConvolver(a, u)(t);
}

double weighted_graded_integral(const WeightedFunction& u,
                                const std::function<double(double)>& F) {
  static const QuadratureRule gl = gauss_legendre(12);
  const QuadratureRule edgeL = gauss_jacobi(16, u.beta_left(), 0.0);
  const QuadratureRule edgeR = gauss_jacobi(16, 0.0, u.beta_right());
  const double bl = u.beta_left(), br = u.beta_right();
  const int levels = 40;
  double acc = 0.0;
  // innermost panels carry the weight singularity
  const double h0 = std::pow(0.5, levels);
  double sum = 0.0;
  for (std::size_t i = 0; i < edgeL.n; ++i) {
    const double s = h0 * edgeL.nodes[i];
    sum += edgeL.weights[i] * std::pow(1.0 - s, br) * u.factor_at(s) * F(s);
  }
  acc += std::pow(h0, 1.0 + bl) * sum;
  sum = 0.0;
  for (std::size_t i = 0; i < edgeR.n; ++i) {
    const double s = 1.0 - h0 * (1.0 - edgeR.nodes[i]);
    sum += edgeR.weights[i] * std::pow(s, bl) * u.factor_at(s) * F(s);
  }
  acc += std::pow(h0, 1.0 + br) * sum;
  // dyadic panels toward the middle
  for (int j = levels; j >= 1; --j) {
    const double lo = std::pow(0.5, j), hi = (j == 1) ? 0.5 : std::pow(0.5, j - 1);
    acc += (hi - lo) * gl.integrate([&](double x) {
      const double s = lo + (hi - lo) * x;
      return u.weight_at(s) * u.factor_at(s) * F(s);
    });
    const double rhi = 1.0 - lo, rlo = 1.0 - hi;
    acc += (rhi - rlo) * gl.integrate([&](double x) {
      const double s = rlo + (rhi - rlo) * x;
      return u.weight_at(s) * u.factor_at(s) * F(s);
    });
  }
  return acc;
}

namespace {

void check_finite(double v, const char* who) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": non-finite sample");
}

// Subtracted regular integral sum_k mu_k (gq_k - gt)/(t - s_k); a target
// within 1e-10 of a quadrature node triggers re-quadrature on a shifted rule.
double subtracted_integral(const QuadratureRule& quad, const std::vector<double>& gq,
                           double t, double gt,
                           const std::function<double(double)>& g_eval) {
  for (std::size_t k = 0; k < quad.n; ++k) {
    if (std::fabs(t - quad.nodes[k]) < 1e-10) {
      const QuadratureRule alt = gauss_jacobi(quad.n + 1, quad.beta_left, quad.beta_right);
      double reg = 0.0;
      for (std::size_t j = 0; j < alt.n; ++j)
        reg += alt.weights[j] * (g_eval(alt.nodes[j]) - gt) / (t - alt.nodes[j]);
      return reg;
    }
  }
  double reg = 0.0;
  for (std::size_t k = 0; k < quad.n; ++k)
    reg += quad.weights[k] * (gq[k] - gt) / (t - quad.nodes[k]);
  return reg;
}

}  // namespace

CarlemanSolution carleman_apply(double a, const FunctionData& f, std::size_t n) {
  require_a(a);
  if (!f.value || !f.derivative)
    throw std::invalid_argument("carleman_apply: need value and derivative data");
  if (n < 8) throw std::invalid_argument("carleman_apply: need n >= 8");

  const double lam = 0.5 * (1.0 - a);
  const QuadratureRule rep = gauss_jacobi(n, -lam, -lam);
  std::vector<double> y(n, 0.0);

  if (a == 0.0) {
    const QuadratureRule quad = gauss_jacobi(n, 0.5, 0.5);
    double J = 0.0;  // int f / phi_0
    for (std::size_t i = 0; i < n; ++i) {
      const double v = f.value(rep.nodes[i]);
      check_finite(v, "carleman_apply");
      J += rep.weights[i] * v;
    }
    std::vector<double> dfq(quad.n);
    for (std::size_t k = 0; k < quad.n; ++k) {
      dfq[k] = f.derivative(quad.nodes[k]);
      check_finite(dfq[k], "carleman_apply");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double t = rep.nodes[i];
      const double dft = f.derivative(t);
      const double reg = subtracted_integral(quad, dfq, t, dft, f.derivative);
      y[i] = (dft * M_PI * (t - 0.5) + reg + J / (2.0 * kLog2)) / (M_PI * M_PI);
    }
  } else {
    const double c = std::cos(0.5 * a * M_PI);
    const double ga = gamma_fn(a);
    const double c1 = ga * c / M_PI;            // multiplies g~
    const double c2 = ga * c * c / (M_PI * M_PI);  // multiplies the regular S remainder
    const QuadratureRule quad = gauss_jacobi(n, -lam, lam);
    const std::size_t m2 = std::clamp<std::size_t>(n / 2, 32, 128);
    const QuadratureRule ia = gauss_jacobi(m2, 0.0, a - 1.0);

    const double f0 = f.value(0.0);
    check_finite(f0, "carleman_apply");
    auto gtilde = [&](double t) {
      // t^{1-a} D^{1-a} f = f(0)/Gamma(a) + (t/Gamma(a)) int_0^1 f'(t x) (1-x)^{a-1} dx
      double s = 0.0;
      for (std::size_t m = 0; m < ia.n; ++m) {
        const double v = f.derivative(t * ia.nodes[m]);
        check_finite(v, "carleman_apply");
        s += ia.weights[m] * v;
      }
      return f0 / ga + t / ga * s;
    };

    std::vector<double> gq(quad.n);
    for (std::size_t k = 0; k < quad.n; ++k) gq[k] = gtilde(quad.nodes[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = rep.nodes[i];
      const double gt = gtilde(t);
      const double reg = subtracted_integral(quad, gq, t, gt, gtilde);
      // the blow-up parts of S(w g~) and pi tan(a pi/2) phi_a D^{1-a} f
      // cancel exactly; what remains is pi/cos * g~ plus the subtracted
      // regular integral.
      y[i] = c1 * gt + c2 * reg;
    }
  }

  CarlemanSolution sol{WeightedFunction(-lam, -lam, std::move(y)), 0.0, 0.0};
  sol.mass = sol.density.reference_mass();
  sol.residual_sup = verify_residual(a, sol.density, f.value, default_residual_targets());
  return sol;
}

WeightedFunction carleman_polynomial(double a, const std::vector<double>& coefficients,
                                     std::size_t n) {
  require_a(a);
  if (coefficients.empty())
    throw std::invalid_argument("carleman_polynomial: empty coefficient list");
  const double lam = 0.5 * (1.0 - a);
  const std::size_t deg = coefficients.size() - 1;

  // q coefficients with phi_a * C_a(p) = q.
  std::vector<double> q(coefficients.size(), 0.0);
  if (a == 0.0) {
    // C_0(t^k) = (1/pi^2 phi_0) [ k S(phi_0 t^{k-1}) + B(k+1/2,1/2)/(2 log 2) ]
    // S(phi_0 t^j) built from S(phi_0) = pi (t - 1/2) by the shift rule.
    std::vector<std::vector<double>> sigma(deg + 1);  // sigma[j] = coeffs of S(phi_0 t^j)
    sigma[0] = {-0.5 * M_PI, M_PI};
    for (std::size_t j = 1; j <= deg; ++j) {
      sigma[j].assign(j + 2, 0.0);
      for (std::size_t i = 0; i < sigma[j - 1].size(); ++i) sigma[j][i + 1] = sigma[j - 1][i];
      sigma[j][0] -= beta_fn(j - 1 + 1.5, 1.5);
    }
    for (std::size_t k = 0; k <= deg; ++k) {
      const double bk = coefficients[k];
      if (bk == 0.0) continue;
      q[0] += bk * beta_fn(k + 0.5, 0.5) / (2.0 * kLog2) / (M_PI * M_PI);
      if (k >= 1)
        for (std::size_t i = 0; i < sigma[k - 1].size(); ++i)
          q[i] += bk * static_cast<double>(k) * sigma[k - 1][i] / (M_PI * M_PI);
    }
  } else {
    const double c = std::cos(0.5 * a * M_PI);
    const double ga = gamma_fn(a);
    for (std::size_t k = 0; k <= deg; ++k) {
      const double bk = coefficients[k];
      if (bk == 0.0) continue;
      const double ratio = gamma_fn(static_cast<double>(k) + 1.0) / gamma_fn(static_cast<double>(k) + a);
      q[k] += bk * ga * c * ratio / M_PI;
      const double c2 = ga * c * c * ratio / (M_PI * M_PI);
      for (std::size_t j = 0; j < k; ++j)
        q[j] -= bk * c2 * beta_fn(static_cast<double>(k - 1 - j) + 1.0 - lam, 1.0 + lam);
    }
  }

  const QuadratureRule rep = gauss_jacobi(n, -lam, -lam);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (std::size_t k = q.size(); k-- > 0;) v = v * rep.nodes[i] + q[k];
    y[i] = v;
  }
  return WeightedFunction(-lam, -lam, std::move(y));
}

double verify_residual(double a, const WeightedFunction& u,
                       const std::function<double(double)>& f,
                       const std::vector<double>& targets) {
  require_a(a);
  double sup = 0.0;
  if (a == 0.0) {
    LogConvolver conv(u);
    for (double t : targets) sup = std::max(sup, std::fabs(conv(t) - f(t)));
  } else {
    RieszConvolver conv(a, u);
    for (double t : targets) sup = std::max(sup, std::fabs(conv(t) - f(t)));
  }
  return sup;
}

std::vector<double> default_residual_targets() {
  std::vector<double> t(50);
  for (int i = 0; i < 50; ++i) t[i] = 0.02 + 0.96 * (i + 0.5) / 50.0;
  return t;
}

}  // namespace eqm
