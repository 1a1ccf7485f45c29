#include "eqm/interp.hpp"

#include <cmath>
#include <stdexcept>

namespace eqm {

BarycentricInterpolant::BarycentricInterpolant(std::vector<double> nodes,
                                               std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  const std::size_t n = nodes_.size();
  if (n == 0 || values_.size() != n)
    throw std::invalid_argument("BarycentricInterpolant: node/value size mismatch");
  w_.assign(n, 1.0);
  // Rescale differences by the grid span to avoid under/overflow.
  const double span = nodes_.back() - nodes_.front();
  const double scale = (span > 0.0) ? 4.0 / span : 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    double w = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      w *= (nodes_[j] - nodes_[k]) * scale;
    }
    w_[j] = 1.0 / w;
  }
}

void BarycentricInterpolant::set_values(std::vector<double> values) {
  if (values.size() != nodes_.size())
    throw std::invalid_argument("BarycentricInterpolant: value size mismatch");
  values_ = std::move(values);
}

double BarycentricInterpolant::operator()(double x) const {
  double num = 0.0, den = 0.0;
  const std::size_t n = nodes_.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double d = x - nodes_[j];
    if (d == 0.0) return values_[j];
    const double t = w_[j] / d;
    num += t * values_[j];
    den += t;
  }
  return num / den;
}

std::vector<double> chebyshev_nodes01(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) {
    // x_k = cos((2k+1)pi/(2n)) descending; store ascending in (0,1).
    const double x = std::cos((2.0 * (n - 1 - k) + 1.0) * M_PI / (2.0 * n));
    t[k] = 0.5 * (1.0 + x);
  }
  return t;
}

std::vector<double> chebyshev_coefficients(const std::vector<double>& f) {
  const std::size_t n = f.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      // node j in ascending order corresponds to angle (2(n-1-j)+1)pi/(2n)
      const double theta = (2.0 * (n - 1 - j) + 1.0) * M_PI / (2.0 * n);
      acc += f[j] * std::cos(k * theta);
    }
    c[k] = (k == 0 ? 1.0 : 2.0) * acc / static_cast<double>(n);
  }
  return c;
}

double chebyshev_eval(const std::vector<double>& c, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double b0 = 2.0 * x * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + c[0];
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 3 || y_.size() != n) throw std::invalid_argument("CubicSpline: need >= 3 knots");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("CubicSpline: knots must increase");
  m_.assign(n, 0.0);
  std::vector<double> c(n, 0.0), rhs(n, 0.0), diag(n, 0.0), upper(n, 0.0);
  diag[0] = 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    diag[i] = 2.0 * (h0 + h1);
    upper[i] = h1;
    rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
  }
  diag[n - 1] = 1.0;
  // Thomas solve with lower coefficients h0 implied.
  std::vector<double> cp(n, 0.0), dp(n, 0.0);
  cp[0] = 0.0;
  dp[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double lower = (i + 1 < n) ? (x_[i] - x_[i - 1]) : 0.0;
    const double denom = diag[i] - lower * cp[i - 1];
    cp[i] = (i + 1 < n) ? upper[i] / denom : 0.0;
    dp[i] = (rhs[i] - lower * dp[i - 1]) / denom;
  }
  m_[n - 1] = dp[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) m_[i] = dp[i] - cp[i] * m_[i + 1];
}

std::size_t CubicSpline::segment(double x) const {
  std::size_t lo = 0, hi = x_.size() - 1;
  if (x <= x_[0]) return 0;
  if (x >= x_[hi]) return hi - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (x_[mid] <= x ? lo : hi) = mid;
  }
  return lo;
}

double CubicSpline::value(double x) const {
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
  return A * y_[i] + B * y_[i + 1] +
         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double x) const {
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         ((3.0 * B * B - 1.0) * m_[i + 1] - (3.0 * A * A - 1.0) * m_[i]) * h / 6.0;
}

double CubicSpline::second_derivative(double x) const {
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
  return A * m_[i] + B * m_[i + 1];
}

}  // namespace eqm
