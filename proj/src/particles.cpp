#include "eqm/particles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "eqm/equilibrium.hpp"

namespace eqm {

namespace {

// xorshift-based generator so runs are reproducible across platforms
struct SplitMix64 {
  std::uint64_t s;
  explicit SplitMix64(std::uint64_t seed) : s(seed) {}
  double uniform() {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return (z >> 11) * 0x1.0p-53;
  }
};

double pair_energy(const std::vector<double>& x, const KernelSpec& k) {
  const std::size_t n = x.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) acc += k.value(x[i] - x[j]);
  return acc / (static_cast<double>(n) * n);
}

double field_energy(const std::vector<double>& x, const PotentialSpec& u) {
  double acc = 0.0;
  for (double xi : x) acc += u.value(xi);
  return acc / static_cast<double>(x.size());
}

void gradient(const std::vector<double>& x, const KernelSpec& k, const PotentialSpec& u,
              std::vector<double>& g) {
  const std::size_t n = x.size();
  g.assign(n, 0.0);
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double f = k.d1(x[i] - x[j]) * inv_n2;
      g[i] += f;
      g[j] -= f;
    }
    g[i] += u.d1(x[i]) / static_cast<double>(n);
  }
}

// first-order optimality measure with the barrier bounds: components that
// push into an active barrier carry a KKT multiplier and are zeroed
void project_gradient(const std::vector<double>& x, const PotentialSpec& u,
                      const std::vector<double>& g, std::vector<double>& pg) {
  pg = g;
  const double left = u.barrier_left(), right = u.barrier_right();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isfinite(left) && x[i] <= left + 1e-14 * (1.0 + std::fabs(left)) && g[i] > 0.0)
      pg[i] = 0.0;
    if (std::isfinite(right) && x[i] >= right - 1e-14 * (1.0 + std::fabs(right)) && g[i] < 0.0)
      pg[i] = 0.0;
  }
}

bool feasible(const std::vector<double>& x, const PotentialSpec& u) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] - x[i - 1] > 1e-12)) return false;
  if (u.has_left_barrier() && x.front() < u.barrier_left()) return false;
  if (u.has_right_barrier() && x.back() > u.barrier_right()) return false;
  return true;
}

double norm2(const std::vector<double>& v) {
  double acc = 0.0;
  for (double c : v) acc += c * c;
  return std::sqrt(acc);
}

}  // namespace

double discrete_energy(const ParticleConfiguration& config, const KernelSpec& kernel,
                       const PotentialSpec& potential) {
  const auto& x = config.positions;
  if (x.size() < 2) throw std::invalid_argument("discrete_energy: need at least two particles");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw std::invalid_argument("discrete_energy: positions must increase");
    if (x[i] - x[i - 1] < 1e-300) return std::numeric_limits<double>::infinity();
  }
  return pair_energy(x, kernel) + field_energy(x, potential);
}

ParticleConfiguration minimize_particles(std::size_t n, const KernelSpec& kernel,
                                         const PotentialSpec& potential, std::uint64_t seed,
                                         double grad_tol_factor, int max_iterations) {
  if (n < 2) throw std::invalid_argument("minimize_particles: need n >= 2");

  // equispaced start on the barrier interval (or [-1, 1]), with a tiny
  // seeded jitter, sorted
  double lo = potential.has_left_barrier() ? potential.barrier_left() : -1.0;
  double hi = potential.has_right_barrier() ? potential.barrier_right() : 1.0;
  if (!(hi > lo)) throw std::invalid_argument("minimize_particles: empty barrier interval");
  SplitMix64 rng(seed);
  std::vector<double> x(n);
  const double pad = 0.5 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double frac = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    x[i] = lo + (hi - lo) * (pad + (1.0 - 2.0 * pad) * frac);
    x[i] += (hi - lo) * 1e-4 * (rng.uniform() - 0.5) / static_cast<double>(n);
  }
  std::sort(x.begin(), x.end());

  std::vector<double> g, pg, g_prev, x_prev, trial;
  gradient(x, kernel, potential, g);
  project_gradient(x, potential, g, pg);
  double e = pair_energy(x, kernel) + field_energy(x, potential);
  double alpha = 0.1 * (hi - lo) / std::max(norm2(pg), 1e-12);

  const double tol = grad_tol_factor * static_cast<double>(n);
  const int cap = max_iterations;
  // first-order phase budget; the Newton polish below takes over from here
  const int bb_cap = std::min(cap, 2500);
  int it = 0;
  int stalls = 0;
  for (; it < bb_cap; ++it) {
    const double gn = norm2(pg);
    if (gn <= tol) break;

    double step = std::clamp(alpha, 1e-14, 1e6);
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt, step *= 0.5) {
      trial = x;
      for (std::size_t i = 0; i < n; ++i) trial[i] -= step * pg[i];
      if (potential.has_left_barrier())
        for (auto& v : trial) v = std::max(v, potential.barrier_left());
      if (potential.has_right_barrier())
        for (auto& v : trial) v = std::min(v, potential.barrier_right());
      if (!feasible(trial, potential)) continue;
      const double e_trial = pair_energy(trial, kernel) + field_energy(trial, potential);
      // accepted steps strictly decrease the energy
      if (e_trial <= e - 1e-4 * step * gn * gn || e_trial < e) {
        x_prev = x;
        g_prev = g;
        x = trial;
        e = e_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (++stalls >= 3) break;  // stuck at this resolution
      alpha = 1e-6 * (hi - lo) / std::max(norm2(pg), 1e-12);
      continue;
    }
    stalls = 0;

    gradient(x, kernel, potential, g);
    project_gradient(x, potential, g, pg);
    // BB1 step from the last accepted move
    double sy = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double si = x[i] - x_prev[i];
      ss += si * si;
      sy += si * (g[i] - g_prev[i]);
    }
    alpha = (sy > 0.0) ? ss / sy : 2.0 * alpha;
  }

  // Newton polish: the first-order phase stalls on the ill-conditioned
  // near-collision couplings once n is a few hundred; the damped Newton
  // steps below finish the job in a handful of iterations.
  const double left = potential.barrier_left(), right = potential.barrier_right();
  for (int polish = 0; polish < 60 && norm2(pg) > tol && it < cap; ++polish, ++it) {
    std::vector<int> free_idx;
    for (std::size_t i = 0; i < n; ++i)
      if (pg[i] != 0.0 || (g[i] == 0.0)) free_idx.push_back(static_cast<int>(i));
    const std::size_t m = free_idx.size();
    if (m == 0) break;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs(m);
    const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
    for (std::size_t p = 0; p < m; ++p) {
      const int i = free_idx[p];
      double diag = potential.d2(x[i]) / static_cast<double>(n);
      for (std::size_t kk = 0; kk < n; ++kk) {
        if (static_cast<int>(kk) == i) continue;
        diag += kernel.d2(x[i] - x[kk]) * inv_n2;
      }
      H(p, p) = diag;
      for (std::size_t q = p + 1; q < m; ++q) {
        const int j = free_idx[q];
        const double off = -kernel.d2(x[i] - x[j]) * inv_n2;
        H(p, q) = off;
        H(q, p) = off;
      }
      rhs(p) = -g[i];
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    Eigen::VectorXd d = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !d.allFinite()) break;

    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt, lambda *= 0.5) {
      trial = x;
      for (std::size_t p = 0; p < m; ++p) trial[free_idx[p]] += lambda * d(p);
      if (std::isfinite(left))
        for (auto& v : trial) v = std::max(v, left);
      if (std::isfinite(right))
        for (auto& v : trial) v = std::min(v, right);
      if (!feasible(trial, potential)) continue;
      const double e_trial = pair_energy(trial, kernel) + field_energy(trial, potential);
      if (e_trial <= e + 1e-12 * std::fabs(e)) {
        x = trial;
        e = e_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    gradient(x, kernel, potential, g);
    project_gradient(x, potential, g, pg);
  }

  ParticleConfiguration out;
  out.positions = std::move(x);
  out.energy = e;
  out.gradient_norm = norm2(pg);
  out.iterations = it;
  out.converged = out.gradient_norm <= tol;
  return out;
}

MeasureDistance compare_to_density(const ParticleConfiguration& config,
                                   const WeightedDensity& density) {
  const auto& x = config.positions;
  if (x.empty()) throw std::invalid_argument("compare_to_density: empty configuration");
  const std::size_t n = x.size();

  // Chebyshev proxy of the smooth factor, then incomplete Jacobi integrals
  // for the continuum CDF with the endpoint weights treated exactly.
  const std::size_t nc = 96;
  const auto cnodes = chebyshev_nodes01(nc);
  std::vector<double> gs(nc);
  for (std::size_t j = 0; j < nc; ++j) gs[j] = density.ref.factor_at(cnodes[j]);
  const std::vector<double> cheb = chebyshev_coefficients(gs);
  auto geval = [&](double tau) { return chebyshev_eval(cheb, 2.0 * tau - 1.0); };

  const double bl = density.ref.beta_left(), br = density.ref.beta_right();
  const QuadratureRule gjL = gauss_jacobi(16, bl, 0.0);
  const QuadratureRule gjR = gauss_jacobi(16, br, 0.0);
  const double total = density.mass();
  auto cdf = [&](double t) {
    const double tau = (t - density.t1) / density.length();
    if (tau <= 0.0) return 0.0;
    if (tau >= 1.0) return 1.0;
    if (tau <= 0.5) {
      double acc = 0.0;
      for (std::size_t i = 0; i < gjL.n; ++i) {
        const double s = tau * gjL.nodes[i];
        acc += gjL.weights[i] * std::pow(1.0 - s, br) * geval(s);
      }
      return std::pow(tau, 1.0 + bl) * acc / total;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < gjR.n; ++i) {
      const double s = 1.0 - (1.0 - tau) * gjR.nodes[i];
      acc += gjR.weights[i] * std::pow(s, bl) * geval(s);
    }
    return 1.0 - std::pow(1.0 - tau, 1.0 + br) * acc / total;
  };

  const double lo = std::min(density.t1, x.front());
  const double hi = std::max(density.t2, x.back());
  const std::size_t grid_n = 1 << 14;
  const double dt = (hi - lo) / static_cast<double>(grid_n);
  std::size_t ix = 0;
  double w1 = 0.0, sup = 0.0;
  for (std::size_t k = 0; k < grid_n; ++k) {
    const double tm = lo + (k + 0.5) * dt;
    while (ix < n && x[ix] <= tm) ++ix;
    const double Fn = static_cast<double>(ix) / static_cast<double>(n);
    const double diff = std::fabs(Fn - cdf(tm));
    w1 += dt * diff;
    sup = std::max(sup, diff);
  }
  return {w1, sup};
}

}  // namespace eqm
