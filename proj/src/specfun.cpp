#include "eqm/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace eqm {

namespace {

// Lanczos approximation, g = 7, 9 terms.  Good to ~1e-15 relative on the
// positive axis before overflow.
constexpr double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double x) {
  double s = kLanczos[0];
  for (int k = 1; k < 9; ++k) s += kLanczos[k] / (x + k);
  return s;
}

constexpr double kSqrtTwoPi = 2.5066282746310005024;

void require_positive(double x, const char* who) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error(std::string(who) + ": argument must be positive and finite, got " +
                            std::to_string(x));
}

}  // namespace

double gamma_fn(double x) {
  require_positive(x, "gamma_fn");
  if (x > 140.0) return std::exp(log_gamma(x));
  const double z = x - 1.0;
  const double t = z + 7.5;
  return kSqrtTwoPi * std::pow(t, z + 0.5) * std::exp(-t) * lanczos_sum(z);
}

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  const double z = x - 1.0;
  const double t = z + 7.5;
  return std::log(kSqrtTwoPi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_sum(z));
}

double beta_fn(double a, double b) {
  require_positive(a, "beta_fn");
  require_positive(b, "beta_fn");
  if (a + b < 140.0) return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b);
  return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

double beta_moment(double alpha, double beta, double t) {
  require_positive(alpha, "beta_moment");
  require_positive(beta, "beta_moment");
  require_positive(t, "beta_moment");
  return beta_fn(alpha, beta) * std::pow(t, alpha + beta - 1.0);
}

namespace {

// Recurrence coefficients of the monic polynomials orthogonal w.r.t.
// t^{bl} (1-t)^{br} on (0,1).  Obtained from the classical Jacobi
// coefficients on (-1,1) with alpha = br, beta = bl under x = 2t - 1.
void shifted_jacobi_recurrence(std::size_t n, double bl, double br, std::vector<double>& a,
                               std::vector<double>& b) {
  const double al = br;  // exponent of (1-x)
  const double be = bl;  // exponent of (1+x)
  a.resize(n);
  b.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    double ak;  // on (-1,1)
    const double denom = (2.0 * kk + al + be) * (2.0 * kk + al + be + 2.0);
    if (k == 0)
      ak = (be - al) / (al + be + 2.0);
    else
      ak = (be * be - al * al) / denom;
    double bk;
    if (k == 0) {
      bk = std::pow(2.0, al + be + 1.0) * beta_fn(al + 1.0, be + 1.0);  // total mass on (-1,1)
    } else if (k == 1) {
      bk = 4.0 * (1.0 + al) * (1.0 + be) /
           ((2.0 + al + be) * (2.0 + al + be) * (3.0 + al + be));
    } else {
      bk = 4.0 * kk * (kk + al) * (kk + be) * (kk + al + be) /
           ((2.0 * kk + al + be) * (2.0 * kk + al + be) * (2.0 * kk + al + be + 1.0) *
            (2.0 * kk + al + be - 1.0));
    }
    // Map x = 2t - 1: t-recurrence has a' = (a+1)/2, b' = b/4 (b0' = b0/2^{al+be+1}).
    a[k] = 0.5 * (ak + 1.0);
    b[k] = (k == 0) ? beta_fn(bl + 1.0, br + 1.0) : 0.25 * bk;
  }
}

// Eigenvalues of a symmetric tridiagonal matrix by the implicit-shift QL
// sweep.  d holds the diagonal, e the subdiagonal (e[0] unused on entry).
void tridiag_eigenvalues(std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = d.size();
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    for (;;) {
      std::size_t m = l;
      for (; m + 1 < n; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (++iter > 50) throw std::runtime_error("gauss_jacobi: tridiagonal QL failed to converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double bb = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * bb;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - bb;
      }
      if (r == 0.0 && m > l + 1) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

}  // namespace

QuadratureRule gauss_jacobi(std::size_t n, double beta_left, double beta_right) {
  if (n < 1) throw std::domain_error("gauss_jacobi: need n >= 1");
  if (!(beta_left > -1.0) || !(beta_right > -1.0))
    throw std::domain_error("gauss_jacobi: weight exponents must exceed -1 (non-integrable weight)");

  std::vector<double> a, b;
  shifted_jacobi_recurrence(n, beta_left, beta_right, a, b);
  const double mu0 = b[0];

  std::vector<double> d = a;
  std::vector<double> e(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) e[k] = std::sqrt(b[k]);
  tridiag_eigenvalues(d, e);
  std::sort(d.begin(), d.end());

  QuadratureRule rule;
  rule.n = n;
  rule.beta_left = beta_left;
  rule.beta_right = beta_right;
  rule.nodes = d;
  rule.weights.resize(n);

  // Christoffel weights: w_k = 1 / sum_j q_j(x_k)^2 with q_j orthonormal.
  for (std::size_t k = 0; k < n; ++k) {
    const double x = d[k];
    double qm1 = 0.0;
    double q0 = 1.0 / std::sqrt(mu0);
    double s = q0 * q0;
    for (std::size_t j = 1; j < n; ++j) {
      const double sb = std::sqrt(b[j]);
      const double q1 = ((x - a[j - 1]) * q0 - (j >= 2 ? std::sqrt(b[j - 1]) : 0.0) * qm1) / sb;
      qm1 = q0;
      q0 = q1;
      s += q0 * q0;
    }
    rule.weights[k] = 1.0 / s;
  }
  return rule;
}

QuadratureRule gauss_legendre(std::size_t n) { return gauss_jacobi(n, 0.0, 0.0); }

}  // namespace eqm
