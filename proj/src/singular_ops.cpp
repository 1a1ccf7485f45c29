#include "eqm/singular_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace eqm {

WeightedFunction::WeightedFunction(double beta_left, double beta_right,
                                   std::vector<double> factor, double t1, double t2)
    : t1_(t1), t2_(t2), beta_left_(beta_left), beta_right_(beta_right) {
  if (!(beta_left > -1.0) || !(beta_right > -1.0))
    throw std::domain_error("WeightedFunction: exponents must exceed -1");
  if (!(t1 < t2)) throw std::domain_error("WeightedFunction: empty interval");
  if (factor.empty()) throw std::invalid_argument("WeightedFunction: empty factor data");
  for (double v : factor)
    if (!std::isfinite(v)) throw std::invalid_argument("WeightedFunction: non-finite factor");
  rule_ = gauss_jacobi(factor.size(), beta_left, beta_right);
  factor_ = std::move(factor);
  interp_ = BarycentricInterpolant(rule_.nodes, factor_);
}

double WeightedFunction::weight_at(double tau) const {
  return std::pow(tau, beta_left_) * std::pow(1.0 - tau, beta_right_);
}

double WeightedFunction::value_at(double t) const {
  const double tau = reference_of(t);
  return weight_at(tau) * factor_at(tau);
}

double WeightedFunction::reference_mass() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule_.n; ++i) acc += rule_.weights[i] * factor_[i];
  return acc;
}

namespace {

bool near_integer(double x, double tol = 1e-9) { return std::fabs(x - std::round(x)) < tol; }

// S(t^p (1-t)^q) for p in (-1,0), q = -1-p: pi cot(pi(p+1)) w(t).
double hilbert_base_cot(double p, double q, double t) {
  return M_PI / std::tan(M_PI * (p + 1.0)) * std::pow(t, p) * std::pow(1.0 - t, q);
}

double hilbert_shifted(double p, double q, double base_p, double base_q, double t) {
  if (p > base_p + 0.5) {
    // S(t f) = t S(f) - int f
    return t * hilbert_shifted(p - 1.0, q, base_p, base_q, t) - beta_fn(p, q + 1.0);
  }
  if (q > base_q + 0.5) {
    // S((1-t) f) = (1-t) S(f) + int f
    return (1.0 - t) * hilbert_shifted(p, q - 1.0, base_p, base_q, t) + beta_fn(p + 1.0, q);
  }
  return hilbert_base_cot(p, q, t);
}

double hilbert_integer_pair(double p, double q, double t) {
  if (p > 0.5) return t * hilbert_integer_pair(p - 1.0, q, t) - beta_fn(p, q + 1.0);
  if (q > 0.5) return (1.0 - t) * hilbert_integer_pair(p, q - 1.0, t) + beta_fn(p + 1.0, q);
  return std::log(t / (1.0 - t));
}

}  // namespace

double hilbert_of_weight(double beta_left, double beta_right, double t) {
  if (!(beta_left > -1.0) || !(beta_right > -1.0))
    throw std::domain_error("hilbert_of_weight: exponents must exceed -1");
  if (!(t > 0.0) || !(t < 1.0))
    throw std::domain_error("hilbert_of_weight: evaluation point must be interior");

  if (near_integer(beta_left) && near_integer(beta_right))
    return hilbert_integer_pair(std::round(beta_left), std::round(beta_right), t);

  const double fl = beta_left - std::floor(beta_left);
  const double fr = beta_right - std::floor(beta_right);
  if (near_integer(fl + fr - 1.0)) {
    const double p0 = fl - 1.0;  // in (-1,0)
    const double q0 = fr - 1.0;  // in (-1,0), p0 + q0 = -1
    return hilbert_shifted(beta_left, beta_right, p0, q0, t);
  }
  throw UnsupportedWeightError(
      "hilbert_of_weight: no closed form for exponent pair (" + std::to_string(beta_left) +
      ", " + std::to_string(beta_right) + "); exponent sum must be an integer");
}

double finite_hilbert(const WeightedFunction& f, double t) {
  const double tau = f.reference_of(t);
  if (!(tau > 0.0) || !(tau < 1.0))
    throw std::domain_error("finite_hilbert: evaluation point must be strictly interior");

  const double sw = hilbert_of_weight(f.beta_left(), f.beta_right(), tau);
  const double gt = f.factor_at(tau);

  const QuadratureRule* rule = &f.rule();
  QuadratureRule alt;
  for (std::size_t k = 0; k < rule->n; ++k) {
    if (std::fabs(tau - rule->nodes[k]) < 1e-10) {
      alt = gauss_jacobi(rule->n + 1, f.beta_left(), f.beta_right());
      rule = &alt;
      break;
    }
  }
  double reg = 0.0;
  for (std::size_t k = 0; k < rule->n; ++k) {
    const double s = rule->nodes[k];
    reg += rule->weights[k] * (f.factor_at(s) - gt) / (tau - s);
  }
  return gt * sw + reg;
}

double cauchy_integral_exterior(const WeightedFunction& f, double t) {
  const double tau = f.reference_of(t);
  if (tau >= 0.0 && tau <= 1.0)
    throw std::domain_error("cauchy_integral_exterior: point must lie outside the interval");
  double acc = 0.0;
  const QuadratureRule& rule = f.rule();
  for (std::size_t k = 0; k < rule.n; ++k)
    acc += rule.weights[k] * f.factor()[k] / (tau - rule.nodes[k]);
  return acc;
}

namespace {

// Kernel moments M_k(beta) = int_0^h u^k (tau-u)^{beta-1} du for tau >= h.
// The recursion M_k = tau M_{k-1}(beta) - M_{k-1}(beta+1) loses (tau/h)^k
// digits, so cells far from the singularity use the binomial series of
// (1 - u/tau)^{beta-1} instead, which has no cancellation.
void kernel_moments(double tau, double h, double beta, double out[4]) {
  if (h < 0.5 * tau) {
    const double r = h / tau;
    for (int k = 0; k < 4; ++k) {
      double coeff = 1.0;  // (-1)^j binom(beta-1, j)
      double rpow = 1.0;
      double acc = 1.0 / (k + 1.0);
      for (int j = 1; j < 64; ++j) {
        coeff *= -(beta - static_cast<double>(j)) / static_cast<double>(j);
        rpow *= r;
        const double term = coeff * rpow / (k + j + 1.0);
        acc += term;
        if (std::fabs(term) < 1e-17 * std::fabs(acc)) break;
      }
      out[k] = std::pow(tau, beta - 1.0) * std::pow(h, k + 1.0) * acc;
    }
    return;
  }
  double m0[7];
  for (int j = 0; j < 7; ++j) {
    const double b = beta + j;
    if (tau - h <= 0.0) {
      m0[j] = std::pow(tau, b) / b;
    } else {
      // tau^b (1 - (1-h/tau)^b) / b without cancellation
      m0[j] = -std::pow(tau, b) * std::expm1(b * std::log1p(-h / tau)) / b;
    }
  }
  out[0] = m0[0];
  double prev[7];
  std::copy(m0, m0 + 7, prev);
  for (int k = 1; k < 4; ++k) {
    double cur[7] = {0, 0, 0, 0, 0, 0, 0};
    for (int j = 0; j + k < 7; ++j) cur[j] = tau * prev[j] - prev[j + 1];
    out[k] = cur[0];
    std::copy(cur, cur + 7, prev);
  }
}

// Cubic coefficients (in powers of s - s0) through four samples:
// Newton divided differences expanded by Horner in the shifted variable.
void local_cubic(const double* xs, const double* ys, double s0, double c[4]) {
  double d[4] = {ys[0], ys[1], ys[2], ys[3]};
  for (int j = 1; j < 4; ++j)
    for (int i = 3; i >= j; --i) d[i] = (d[i] - d[i - 1]) / (xs[i] - xs[i - j]);
  double poly[4] = {d[3], 0.0, 0.0, 0.0};
  int deg = 0;
  for (int j = 2; j >= 0; --j) {
    double shifted[4] = {0.0, 0.0, 0.0, 0.0};
    const double cj = s0 - xs[j];
    for (int i = 0; i <= deg; ++i) {
      shifted[i + 1] += poly[i];
      shifted[i] += cj * poly[i];
    }
    ++deg;
    for (int i = 0; i <= deg; ++i) poly[i] = shifted[i];
    poly[0] += d[j];
  }
  for (int i = 0; i < 4; ++i) c[i] = poly[i];
}

// Product integration of int_0^t f(s) (t-s)^{beta-1} ds from samples.
double product_integrate(const std::vector<double>& xs, const std::vector<double>& ys,
                         double t, double beta) {
  const std::size_t n = xs.size();
  if (n < 4) throw std::invalid_argument("fractional ops: need at least 4 samples");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double s0 = xs[i];
    if (s0 >= t) break;
    const double s1 = std::min(xs[i + 1], t);
    if (s1 <= s0) continue;
    std::size_t j0 = (i == 0) ? 0 : i - 1;
    if (j0 + 4 > n) j0 = n - 4;
    double c[4];
    local_cubic(&xs[j0], &ys[j0], s0, c);
    double m[4];
    kernel_moments(t - s0, s1 - s0, beta, m);
    for (int k = 0; k < 4; ++k) acc += c[k] * m[k];
  }
  return acc;
}

void validate_samples(const SampledFunction& f, bool need_df) {
  if (f.t.size() != f.f.size() || f.t.size() < 4)
    throw std::invalid_argument("SampledFunction: need >= 4 aligned samples");
  if (need_df && f.df.size() != f.t.size())
    throw std::invalid_argument("SampledFunction: derivative samples required");
  for (std::size_t i = 1; i < f.t.size(); ++i)
    if (!(f.t[i] > f.t[i - 1]))
      throw std::invalid_argument("SampledFunction: sample grid must increase");
}

}  // namespace

double fractional_integral(double a, const SampledFunction& f, double t) {
  if (!(a > 0.0) || !(a < 1.0)) throw std::domain_error("fractional_integral: a must be in (0,1)");
  if (!(t > 0.0)) throw std::domain_error("fractional_integral: t must be positive");
  validate_samples(f, false);
  if (t > f.t.back() + 1e-12)
    throw std::domain_error("fractional_integral: t beyond the sample grid");
  return product_integrate(f.t, f.f, t, a) / gamma_fn(a);
}

double fractional_derivative(double a, const SampledFunction& f, double t, double start) {
  if (!(a > 0.0) || !(a < 1.0))
    throw std::domain_error("fractional_derivative: a must be in (0,1)");
  if (!(t > start)) throw std::domain_error("fractional_derivative: need t > start");
  validate_samples(f, true);
  if (t > f.t.back() + 1e-12 || start < f.t.front() - 1e-12)
    throw std::domain_error("fractional_derivative: [start, t] not covered by samples");

  // Shift the grid so the integration base point is 0.
  std::vector<double> xs, dys;
  std::vector<double> fs;
  xs.reserve(f.t.size());
  dys.reserve(f.t.size());
  for (std::size_t i = 0; i < f.t.size(); ++i) {
    if (f.t[i] < start - 1e-14) continue;
    xs.push_back(f.t[i] - start);
    dys.push_back(f.df[i]);
  }
  if (xs.empty() || xs.front() > 1e-12) {
    xs.insert(xs.begin(), 0.0);
    // interpolate derivative at the start point with the barycentric of df
    BarycentricInterpolant dfi(f.t, f.df);
    dys.insert(dys.begin(), dfi(start));
  }
  if (xs.size() < 4) throw std::invalid_argument("fractional_derivative: too few samples past start");

  BarycentricInterpolant fi(f.t, f.f);
  const double f_start = fi(start);
  const double tt = t - start;
  const double g1ma = gamma_fn(1.0 - a);
  return f_start * std::pow(tt, -a) / g1ma + product_integrate(xs, dys, tt, 1.0 - a) / g1ma;
}

}  // namespace eqm
