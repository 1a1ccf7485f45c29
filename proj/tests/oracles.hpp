#pragma once

// Test-only reference integrators, independent of the library's quadrature
// machinery: adaptive Gauss-Kronrod for smooth integrands, power-law
// substitutions for endpoint singularities and a fold for principal values.
//
// Singular integrands receive the distances to both interval endpoints
// exactly (the substitution variable), so weights like (b-s)^{-1/2} can be
// evaluated without the catastrophic rounding of b - (b - u^8).

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracle {

using Fn = std::function<double(double)>;
// f(s, s - a, b - s) with the distances computed exactly
using FnD = std::function<double(double, double, double)>;

namespace detail {

// 15-point Kronrod / 7-point Gauss pair on [-1, 1]
inline const double kXgk[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
inline const double kWk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline const double kWg[7] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                              0.417959183673469, 0.381830050505119, 0.279705391489277,
                              0.129484966168870};

inline void gk15(const Fn& f, double a, double b, double& result, double& err) {
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  double rk = 0.0, rg = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double v = f(c + h * kXgk[i]);
    rk += kWk[i] * v;
    if (i % 2 == 1) rg += kWg[i / 2] * v;
  }
  result = rk * h;
  err = std::fabs((rk - rg) * h);
}

inline double adapt(const Fn& f, double a, double b, double tol, int depth) {
  double r, e;
  gk15(f, a, b, r, e);
  // roundoff floor keeps the recursion from chasing unreachable tolerances
  if (e <= tol || e <= 4e-16 * (std::fabs(r) + 1.0) || depth >= 24) return r;
  const double c = 0.5 * (a + b);
  const double child = std::max(0.5 * tol, 1e-16 * (std::fabs(r) + 1.0));
  return adapt(f, a, c, child, depth + 1) + adapt(f, c, b, child, depth + 1);
}

}  // namespace detail

inline double integrate(const Fn& f, double a, double b, double tol = 1e-12) {
  return detail::adapt(f, a, b, tol, 0);
}

// integral with algebraic/log endpoint singularities removed by the
// substitution s = a + u^8 (resp. mirrored), valid for exponents > -1
inline double integrate_singular(const FnD& f, double a, double b, double tol = 1e-12) {
  const double len = b - a;
  const double mid = 0.5 * (a + b);
  const int p = 8;
  auto left = [&](double u) {
    const double da = std::pow(u, p);
    return f(a + da, da, len - da) * p * std::pow(u, p - 1);
  };
  auto right = [&](double u) {
    const double db = std::pow(u, p);
    return f(b - db, len - db, db) * p * std::pow(u, p - 1);
  };
  const double ul = std::pow(mid - a, 1.0 / p);
  const double ur = std::pow(b - mid, 1.0 / p);
  return integrate(left, 0.0, ul, 0.5 * tol) + integrate(right, 0.0, ur, 0.5 * tol);
}

inline double integrate_singular(const Fn& f, double a, double b, double tol = 1e-12) {
  return integrate_singular([&](double s, double, double) { return f(s); }, a, b, tol);
}

// p.v. integral of f(s)/(t-s) over (a,b): symmetric fold around t plus the
// regular outer piece; f receives exact endpoint distances
inline double pv_integral(const FnD& f, double a, double b, double t, double tol = 1e-10) {
  if (!(t > a) || !(t < b)) throw std::domain_error("pv_integral: t must be interior");
  const double d = std::min(t - a, b - t);
  // du = d - u is handed in exactly by the substitution; it is the distance
  // of the folded points to the nearer original endpoint
  auto folded = [&](double u, double du) {
    if (u < 1e-15 * (1.0 + std::fabs(t))) return 0.0;  // removable after the fold
    const double lo = t - u, hi = t + u;
    const double lo_da = (t - a <= b - t) ? du : (t - a) - u;
    const double hi_db = (b - t <= t - a) ? du : (b - t) - u;
    return (f(lo, lo_da, b - lo) - f(hi, hi - a, hi_db)) / u;
  };
  double acc = integrate_singular([&](double u, double, double du) { return folded(u, du); }, 0.0,
                                  d, tol);
  // outer piece (empty when t is centered)
  if (t - a < b - t && b - (t + d) > 1e-14 * (b - a)) {
    // the sub-interval's own left distance is relative to t+d; the original
    // left endpoint is far from here, so s - a is safe to recompute
    acc += integrate_singular(
        [&](double s, double, double db) { return f(s, s - a, db) / (t - s); }, t + d, b, tol);
  } else if (t - a >= b - t && (t - d) - a > 1e-14 * (b - a)) {
    acc += integrate_singular(
        [&](double s, double da, double) { return f(s, da, b - s) / (t - s); }, a, t - d, tol);
  }
  return acc;
}

inline double pv_integral(const Fn& f, double a, double b, double t, double tol = 1e-10) {
  return pv_integral([&](double s, double, double) { return f(s); }, a, b, t, tol);
}

}  // namespace oracle
