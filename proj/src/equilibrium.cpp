#include "eqm/equilibrium.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <memory>
#include <cmath>
#include <functional>
#include <vector>

#include "eqm/particles.hpp"

namespace eqm {

namespace {
constexpr double kLog2 = 0.69314718055994530942;
using Eigen::MatrixXd;
using Eigen::VectorXd;
}  // namespace

double RescaleRecord::constant_pullback(double C01) const {
  if (a > 0.0) return std::pow(L, -a) * (C01 + 2.0 * c);
  return C01 + 2.0 * c - std::log(L);
}

double RescaleRecord::energy_pullback(double E01) const {
  if (a > 0.0) return std::pow(L, -a) * (E01 + c);
  return E01 + c - 0.5 * std::log(L);
}

std::tuple<KernelSpec, PotentialSpec, RescaleRecord> affine_rescale(const KernelSpec& kernel,
                                                                    const PotentialSpec& potential,
                                                                    double t1, double t2) {
  if (!(t1 < t2)) throw std::domain_error("affine_rescale: need t1 < t2");
  RescaleRecord rec;
  rec.t1 = t1;
  rec.L = t2 - t1;
  rec.a = kernel.a;
  const double amp = std::pow(rec.L, kernel.a);

  VregSpec scaled = kernel.vreg.rescaled(amp, rec.L, 0.0);
  const double va1 = (kernel.a > 0.0) ? 1.0 : 0.0;
  const double vad1 = (kernel.a > 0.0) ? -kernel.a : -1.0;
  rec.c = 0.5 * (va1 + vad1 + scaled.value(1.0) + scaled.d1(1.0));
  scaled = scaled.rescaled(1.0, 1.0, -2.0 * rec.c);

  KernelSpec k01 = kernel;
  k01.vreg = std::move(scaled);
  PotentialSpec u01 = potential.rescaled_to_unit(t1, rec.L, kernel.a);
  return {std::move(k01), std::move(u01), rec};
}

namespace {

// Discrete affine fixed point rho = C_a(C - V_reg * rho - U) on [0,1] in
// the blow-up representation rho = y / phi_a; unknowns are the factor
// values at the representation nodes and the constant C.
class CaseOneOperator {
 public:
  CaseOneOperator(const KernelSpec& kernel, const PotentialSpec& pot, std::size_t n)
      : a_(kernel.a), lam_(0.5 * (1.0 - kernel.a)), kernel_(kernel), pot_(pot), n_(n) {
    rep_ = gauss_jacobi(n_, -lam_, -lam_);
    pick_quadrature();
    if (a_ > 0.0) {
      const std::size_t m2 = std::clamp<std::size_t>(n_ / 2, 32, 128);
      ia_ = gauss_jacobi(m2, 0.0, a_ - 1.0);
    }
    vreg_const_ = (kernel_.vreg.kind() == VregSpec::Kind::Zero);
    assemble();
  }

  void solve() {
    const std::size_t N = n_;
    MatrixXd M(N + 1, N + 1);
    VectorXd rhs(N + 1);
    M.topLeftCorner(N, N) = MatrixXd::Identity(N, N) - A_.topRows(N);
    M.topRightCorner(N, 1) = -b_.head(N);
    for (std::size_t j = 0; j < N; ++j) M(N, j) = rep_.weights[j];
    M(N, N) = 0.0;
    rhs.head(N) = d_.head(N);
    rhs(N) = 1.0;

    Eigen::PartialPivLU<MatrixXd> lu(M);
    const double rc = lu.rcond();
    if (!(rc > 1e-14))
      throw SingularSystemError("fixed-interval solve: system is numerically singular (rcond = " +
                                std::to_string(rc) + ", n = " + std::to_string(N) + ")");
    VectorXd sol = lu.solve(rhs);
    y_ = sol.head(N);
    C_ = sol(N);
    finalize_state();
  }

  // Damped fixed-point iteration kept as a cross-check of the direct solve.
  int picard_solve(double theta = 0.5, double tol = 1e-10, int cap = 200) {
    const std::size_t N = n_;
    VectorXd y = VectorXd::Constant(N, 1.0);
    double mass0 = 0.0;
    for (std::size_t j = 0; j < N; ++j) mass0 += rep_.weights[j];
    y /= mass0;
    double C = 0.0;
    int it = 0;
    const double wb = rep_weights_dot(b_.head(N));
    for (; it < cap; ++it) {
      const VectorXd Ay_d = A_.topRows(N) * y + d_.head(N);
      C = (1.0 - rep_weights_dot(Ay_d)) / wb;
      VectorXd next = Ay_d + C * b_.head(N);
      const double delta = (next - y).lpNorm<Eigen::Infinity>();
      y = (1.0 - theta) * y + theta * next;
      if (delta < tol) break;
    }
    y_ = y;
    C_ = C;
    finalize_state();
    return it;
  }

  double constant() const { return C_; }
  const VectorXd& y() const { return y_; }
  const QuadratureRule& rep() const { return rep_; }
  double endpoint_left() const { return y_left_; }
  double endpoint_right() const { return y_right_; }

  // Smooth factor of the blow-up representation at arbitrary t in [0,1].
  double factor_value(double t) const {
    if (a_ > 0.0) {
      const double gt = gtilde_state(t);
      return c1_ * gt + c2_ * subtract(t, gt, [&](double s) { return gtilde_state(s); });
    }
    const double dft = fprime_state(t);
    return (dft * M_PI * (t - 0.5) +
            subtract(t, dft, [&](double s) { return fprime_state(s); }) + J_ / (2.0 * kLog2)) /
           (M_PI * M_PI);
  }

  // (V_reg * rho)(t) for the solved density.
  double vreg_conv(double t) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j)
      acc += rep_.weights[j] * y_(j) * kernel_.vreg.value(t - rep_.nodes[j]);
    return acc;
  }

 private:
  double rep_weights_dot(const VectorXd& v) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) acc += rep_.weights[j] * v(j);
    return acc;
  }

  void pick_quadrature() {
    std::size_t K = n_;
    for (int attempt = 0; attempt < 4; ++attempt, ++K) {
      quad_ = (a_ > 0.0) ? gauss_jacobi(K, -lam_, lam_) : gauss_jacobi(K, 0.5, 0.5);
      double dmin = 1.0;
      for (double t : rep_.nodes)
        for (double s : quad_.nodes) dmin = std::min(dmin, std::fabs(t - s));
      if (dmin > 1e-10) return;
    }
    throw SolverError("fixed-interval solve: could not separate quadrature and target nodes");
  }

  template <class GEval>
  double subtract(double t, double gt, GEval&& g_eval) const {
    for (std::size_t k = 0; k < quad_.n; ++k) {
      if (std::fabs(t - quad_.nodes[k]) < 1e-10) {
        const QuadratureRule alt = gauss_jacobi(quad_.n + 1, quad_.beta_left, quad_.beta_right);
        double reg = 0.0;
        for (std::size_t j = 0; j < alt.n; ++j)
          reg += alt.weights[j] * (g_eval(alt.nodes[j]) - gt) / (t - alt.nodes[j]);
        return reg;
      }
    }
    double reg = 0.0;
    for (std::size_t k = 0; k < quad_.n; ++k)
      reg += quad_.weights[k] * (gq_state_(k) - gt) / (t - quad_.nodes[k]);
    return reg;
  }

  // f'(s) for the solved state.
  double fprime_state(double s) const {
    double acc = -pot_.d1(s);
    if (!vreg_const_) {
      if (a_ > 0.0) {
        acc = fp_interp_(s);  // grid already contains the -U' part
      } else {
        for (std::size_t j = 0; j < n_; ++j)
          acc -= rep_.weights[j] * y_(j) * kernel_.vreg.d1(s - rep_.nodes[j]);
      }
    }
    return acc;
  }

  double gtilde_state(double t) const {
    double s = 0.0;
    for (std::size_t m = 0; m < ia_.n; ++m) s += ia_.weights[m] * fprime_state(t * ia_.nodes[m]);
    return f0_state_ / ga_ + t / ga_ * s;
  }

  void assemble() {
    const std::size_t N = n_, K = quad_.n;
    const std::size_t E = N + K + 2;
    epts_.resize(E);
    for (std::size_t i = 0; i < N; ++i) epts_[i] = rep_.nodes[i];
    for (std::size_t k = 0; k < K; ++k) epts_[N + k] = quad_.nodes[k];
    epts_[N + K] = 0.0;
    epts_[N + K + 1] = 1.0;

    // gvals = P y + qC C + g0 holds g~ (a > 0) or f' (a = 0) at all
    // evaluation points.
    MatrixXd P = MatrixXd::Zero(E, N);
    VectorXd qC = VectorXd::Zero(E);
    VectorXd g0 = VectorXd::Zero(E);

    if (a_ > 0.0) {
      ga_ = gamma_fn(a_);
      const double cc = std::cos(0.5 * a_ * M_PI);
      c1_ = ga_ * cc / M_PI;
      c2_ = ga_ * cc * cc / (M_PI * M_PI);

      f0row_ = VectorXd::Zero(N);
      for (std::size_t i = 0; i < N; ++i)
        f0row_(i) = -rep_.weights[i] * kernel_.vreg.value(rep_.nodes[i]);

      for (std::size_t e = 0; e < E; ++e) {
        const double t = epts_[e];
        double s = 0.0;
        for (std::size_t m = 0; m < ia_.n; ++m) s += ia_.weights[m] * (-pot_.d1(t * ia_.nodes[m]));
        g0(e) = (-pot_.value(0.0)) / ga_ + t / ga_ * s;
        qC(e) = 1.0 / ga_;
      }
      P = (1.0 / ga_) * VectorXd::Ones(E) * f0row_.transpose();

      if (!vreg_const_) {
        // f' on a Chebyshev grid, interpolated into the I^a rule.
        const std::size_t G = 160;
        grid_ = chebyshev_nodes01(G);
        Fg_ = MatrixXd::Zero(G, N);
        fu_ = VectorXd::Zero(G);
        for (std::size_t g = 0; g < G; ++g) {
          for (std::size_t i = 0; i < N; ++i)
            Fg_(g, i) = -rep_.weights[i] * kernel_.vreg.d1(grid_[g] - rep_.nodes[i]);
          fu_(g) = -pot_.d1(grid_[g]);
        }
        MatrixXd R = MatrixXd::Zero(E, G);
        std::vector<double> row(G);
        for (std::size_t e = 0; e < E; ++e) {
          const double t = epts_[e];
          std::fill(row.begin(), row.end(), 0.0);
          for (std::size_t m = 0; m < ia_.n; ++m)
            accumulate_bary_row(t * ia_.nodes[m], ia_.weights[m], row);
          for (std::size_t g = 0; g < G; ++g) R(e, g) = t / ga_ * row[g];
        }
        P += R * Fg_;
        // replace the affine part with the grid version so that state
        // evaluation and assembly agree exactly
        g0 = (-pot_.value(0.0)) / ga_ * VectorXd::Ones(E) + R * fu_;
      }
    } else {
      if (!vreg_const_) {
        for (std::size_t e = 0; e < E; ++e)
          for (std::size_t i = 0; i < N; ++i)
            P(e, i) = -rep_.weights[i] * kernel_.vreg.d1(epts_[e] - rep_.nodes[i]);
      }
      for (std::size_t e = 0; e < E; ++e) g0(e) = -pot_.d1(epts_[e]);
      // J = int f / phi_0 over the representation rule.
      rowJ_ = VectorXd::Zero(N);
      double wsum = 0.0;
      juC_ = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        wsum += rep_.weights[i];
        juC_ -= rep_.weights[i] * pot_.value(rep_.nodes[i]);
        for (std::size_t j = 0; j < N; ++j)
          rowJ_(j) -= rep_.weights[i] * rep_.weights[j] *
                      kernel_.vreg.value(rep_.nodes[i] - rep_.nodes[j]);
      }
      jmass_ = wsum;
    }

    // Map gvals to y_out at targets [rep nodes, 0, 1] through the
    // singularity-subtracted transform.
    const std::size_t T = N + 2;
    MatrixXd M = MatrixXd::Zero(T, E);
    for (std::size_t r = 0; r < T; ++r) {
      const std::size_t self = (r < N) ? r : (N + K + (r - N));
      const double t = epts_[self];
      double diag = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const double w = quad_.weights[k] / (t - quad_.nodes[k]);
        M(r, N + k) += w;
        diag -= w;
      }
      if (a_ > 0.0) {
        M.row(r) *= c2_;
        M(r, self) += c2_ * diag + c1_;
      } else {
        M(r, self) += diag + M_PI * (t - 0.5);
        M.row(r) /= (M_PI * M_PI);
      }
    }

    A_ = M * P;
    b_ = M * qC;
    d_ = M * g0;
    if (a_ == 0.0) {
      const double jfac = 1.0 / (2.0 * kLog2 * M_PI * M_PI);
      A_ += jfac * VectorXd::Ones(T) * rowJ_.transpose();
      b_ += jfac * jmass_ * VectorXd::Ones(T);
      d_ += jfac * juC_ * VectorXd::Ones(T);
    }
    P_ = std::move(P);
    qC_ = std::move(qC);
    g0_ = std::move(g0);
  }

  void accumulate_bary_row(double s, double wt, std::vector<double>& row) const {
    // row += wt * barycentric weights of the grid at s
    const auto& nodes = grid_;
    const std::size_t G = nodes.size();
    thread_local std::vector<double> tmp;
    tmp.assign(G, 0.0);
    double den = 0.0;
    for (std::size_t g = 0; g < G; ++g) {
      const double diff = s - nodes[g];
      if (diff == 0.0) {
        row[g] += wt;
        return;
      }
      tmp[g] = bweight(g) / diff;
      den += tmp[g];
    }
    for (std::size_t g = 0; g < G; ++g) row[g] += wt * tmp[g] / den;
  }

  double bweight(std::size_t g) const {
    // recompute barycentric weight of the Chebyshev grid lazily
    if (bw_.empty()) {
      const std::size_t G = grid_.size();
      bw_.assign(G, 1.0);
      const double scale = 4.0 / (grid_.back() - grid_.front());
      for (std::size_t j = 0; j < G; ++j) {
        double w = 1.0;
        for (std::size_t k = 0; k < G; ++k)
          if (k != j) w *= (grid_[j] - grid_[k]) * scale;
        bw_[j] = 1.0 / w;
      }
    }
    return bw_[g];
  }

  void finalize_state() {
    gq_state_ = VectorXd(quad_.n);
    const VectorXd gE = P_ * y_ + C_ * qC_ + g0_;
    for (std::size_t k = 0; k < quad_.n; ++k) gq_state_(k) = gE(n_ + k);
    if (a_ > 0.0) {
      f0_state_ = C_ + f0row_.dot(y_) - pot_.value(0.0);
      if (!vreg_const_) {
        const VectorXd fp = Fg_ * y_ + fu_;
        std::vector<double> vals(fp.data(), fp.data() + fp.size());
        fp_interp_ = BarycentricInterpolant(grid_, std::move(vals));
      }
    } else {
      J_ = rowJ_.dot(y_) + jmass_ * C_ + juC_;
    }
    const VectorXd yout = A_ * y_ + C_ * b_ + d_;
    y_left_ = yout(n_);
    y_right_ = yout(n_ + 1);
  }

  double a_, lam_;
  KernelSpec kernel_;
  PotentialSpec pot_;
  std::size_t n_;
  QuadratureRule rep_, quad_, ia_;
  bool vreg_const_ = true;

  std::vector<double> epts_;
  MatrixXd A_, P_, Fg_;
  VectorXd b_, d_, qC_, g0_, f0row_, fu_, rowJ_;
  double jmass_ = 0.0, juC_ = 0.0;
  double ga_ = 1.0, c1_ = 0.0, c2_ = 0.0;

  std::vector<double> grid_;
  mutable std::vector<double> bw_;
  BarycentricInterpolant fp_interp_;

  VectorXd y_;
  double C_ = 0.0;
  double f0_state_ = 0.0, J_ = 0.0;
  VectorXd gq_state_;
  double y_left_ = 0.0, y_right_ = 0.0;
};

struct Pins {
  bool left = false;
  bool right = false;
};

// Builds the public solution record from a solved unit-interval operator.
EquilibriumSolution build_solution(const KernelSpec& kernel, const PotentialSpec& potential,
                                   const PotentialSpec& u01, const RescaleRecord& rec,
                                   const CaseOneOperator& op, Pins pins, int iterations) {
  const double a = kernel.a;
  const double lam = 0.5 * (1.0 - a);
  const double el = pins.left ? -lam : 0.5 * (1.0 + a);
  const double er = pins.right ? -lam : 0.5 * (1.0 + a);

  const std::size_t n = op.rep().n;
  const QuadratureRule out_rule = gauss_jacobi(n, el, er);
  std::vector<double> z(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double tau = out_rule.nodes[j];
    double div = 1.0;
    if (!pins.left) div *= tau;
    if (!pins.right) div *= (1.0 - tau);
    z[j] = op.factor_value(tau) / div;
  }

  EquilibriumSolution sol;
  sol.t1 = rec.t1;
  sol.t2 = rec.t1 + rec.L;
  sol.constant_C = rec.constant_pullback(op.constant());
  sol.density.t1 = sol.t1;
  sol.density.t2 = sol.t2;
  sol.density.ref = WeightedFunction(el, er, std::move(z));
  if (pins.left && pins.right)
    sol.density.mode = ExponentMode::Blowup;
  else if (pins.left)
    sol.density.mode = ExponentMode::MixedLeftBarrier;
  else if (pins.right)
    sol.density.mode = ExponentMode::MixedRightBarrier;
  else
    sol.density.mode = ExponentMode::Vanishing;

  auto& diag = sol.diagnostics;
  diag.iterations = iterations;
  diag.profile_case = (pins.left && pins.right) ? "two_barriers"
                      : (pins.left || pins.right) ? "one_barrier"
                                                  : "no_barriers";
  diag.mass_error = std::fabs(sol.density.mass() - 1.0);
  diag.endpoint_coeffs[0] = op.endpoint_left();
  diag.endpoint_coeffs[1] = op.endpoint_right();

  double min_rho = std::numeric_limits<double>::infinity();
  const auto& rr = sol.density.ref;
  for (std::size_t j = 0; j < n; ++j)
    min_rho = std::min(min_rho, rr.weight_at(rr.rule().nodes[j]) * rr.factor()[j] / rec.L);
  diag.min_density = min_rho;

  // Flatness of h on the support and the equation residual, reported in
  // original-problem units.
  const double unit_scale = (a > 0.0) ? std::pow(rec.L, -a) : 1.0;
  {
    auto conv_f = [&](double t) { return op.vreg_conv(t) + u01.value(t); };
    double flat = 0.0;
    if (a == 0.0) {
      LogConvolver conv(sol.density.ref);
      for (int i = 0; i < 64; ++i) {
        const double t = 0.01 + 0.98 * (i + 0.5) / 64.0;
        flat = std::max(flat, std::fabs(conv(t) + conv_f(t) - op.constant()));
      }
    } else {
      RieszConvolver conv(a, sol.density.ref);
      for (int i = 0; i < 64; ++i) {
        const double t = 0.01 + 0.98 * (i + 0.5) / 64.0;
        flat = std::max(flat, std::fabs(conv(t) + conv_f(t) - op.constant()));
      }
    }
    diag.h_flatness = flat * unit_scale;
    diag.residual_sup =
        verify_residual(a, sol.density.ref,
                        [&](double t) { return op.constant() - conv_f(t); },
                        default_residual_targets()) *
        unit_scale;
  }

  // Exterior inequality h >= C on the unpinned sides.
  double gap = std::numeric_limits<double>::infinity();
  auto h_ext = [&](double t_orig) {
    const double hv = weighted_graded_integral(
        sol.density.ref, [&](double s) { return kernel.value(t_orig - rec.from_unit(s)); });
    return hv + potential.value(t_orig);
  };
  for (int side = 0; side < 2; ++side) {
    if (side == 0 && pins.left) continue;
    if (side == 1 && pins.right) continue;
    for (int i = 0; i < 24; ++i) {
      const double off = rec.L * (1e-3 * std::pow(2000.0, i / 23.0));  // 1e-3 L .. 2 L
      const double t = (side == 0) ? sol.t1 - off : sol.t2 + off;
      if (std::isfinite(potential.barrier_left()) && t < potential.barrier_left()) continue;
      if (std::isfinite(potential.barrier_right()) && t > potential.barrier_right()) continue;
      gap = std::min(gap, h_ext(t) - sol.constant_C);
    }
  }
  diag.h_exterior_min_gap = std::isfinite(gap) ? gap : 0.0;
  return sol;
}

AssumptionReport require_assumptions(const KernelSpec& kernel, const PotentialSpec& pot,
                                     AssumptionCase which) {
  AssumptionReport rep = check_assumptions(kernel, pot, which);
  if (!rep.all_pass()) {
    std::string bad;
    for (const auto& e : rep.entries)
      if (!e.pass) bad += (bad.empty() ? "" : ", ") + e.name;
    throw PreconditionError("assumption check failed: " + bad);
  }
  return rep;
}

}  // namespace

EquilibriumSolution solve_fixed_interval(const KernelSpec& kernel, const PotentialSpec& potential,
                                         const SolveOptions& opts) {
  double s1 = 0.0, s2 = 1.0;
  if (potential.has_left_barrier() != potential.has_right_barrier())
    throw PreconditionError("solve_fixed_interval: both barriers must be finite (or both absent for [0,1])");
  if (potential.has_left_barrier()) {
    s1 = potential.barrier_left();
    s2 = potential.barrier_right();
  }
  auto [k01, u01, rec] = affine_rescale(kernel, potential, s1, s2);
  if (opts.verify_assumptions) require_assumptions(k01, u01, AssumptionCase::FixedInterval);

  CaseOneOperator op(k01, u01, opts.nodes);
  int iters = 1;
  if (opts.picard_crosscheck)
    iters = op.picard_solve(0.5, opts.tolerance, 200);
  else
    op.solve();
  return build_solution(kernel, potential, u01, rec, op, Pins{true, true}, iters);
}

namespace {

struct FreeSolveState {
  KernelSpec k01;
  PotentialSpec u01;
  RescaleRecord rec;
  std::unique_ptr<CaseOneOperator> op;
};

FreeSolveState inner_solve(const KernelSpec& kernel, const PotentialSpec& potential, double t1,
                           double t2, std::size_t n) {
  FreeSolveState st;
  std::tie(st.k01, st.u01, st.rec) = affine_rescale(kernel, potential, t1, t2);
  st.op = std::make_unique<CaseOneOperator>(st.k01, st.u01, n);
  st.op->solve();
  return st;
}

// Initial support guess from a small particle minimisation, with a convex
// level-set fallback.
std::pair<double, double> initial_bracket(const KernelSpec& kernel, const PotentialSpec& potential,
                                          std::size_t n_particles) {
  if (n_particles >= 2) {
    try {
      ParticleConfiguration cfg =
          minimize_particles(n_particles, kernel, potential, 20250808, 1e-4, 3000);
      const auto& x = cfg.positions;
      const double gl = x[1] - x[0];
      const double gr = x[x.size() - 1] - x[x.size() - 2];
      double lo = x.front() - 1.5 * gl;
      double hi = x.back() + 1.5 * gr;
      if (std::isfinite(potential.barrier_left()))
        lo = std::max(lo, potential.barrier_left());
      if (std::isfinite(potential.barrier_right()))
        hi = std::min(hi, potential.barrier_right());
      if (hi - lo > 1e-8) return {lo, hi};
    } catch (const std::exception&) {
      // fall through to the level-set bound
    }
  }
  // supp rho lies in the level set {U <= C}; bracket by U <= min U + 2.
  double tc = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double d2 = std::max(potential.d2(tc), 1e-12);
    const double step = potential.d1(tc) / d2;
    tc -= std::clamp(step, -10.0, 10.0);
    if (std::fabs(step) < 1e-12) break;
  }
  const double target = potential.value(tc) + 2.0;
  double lo = tc - 1.0, hi = tc + 1.0;
  while (potential.value(lo) < target && lo > tc - 1e6) lo -= std::max(1.0, 0.5 * (tc - lo));
  while (potential.value(hi) < target && hi < tc + 1e6) hi += std::max(1.0, 0.5 * (hi - tc));
  if (std::isfinite(potential.barrier_left())) lo = std::max(lo, potential.barrier_left());
  if (std::isfinite(potential.barrier_right())) hi = std::min(hi, potential.barrier_right());
  return {lo, hi};
}

bool potential_symmetric_about(const PotentialSpec& pot, double& center) {
  if (pot.form() == PotentialSpec::Form::Zero) {
    center = 0.0;
    return true;
  }
  // convex polynomial: try the minimiser as centre and test oddness there
  double tc = 0.0;
  for (int it = 0; it < 300; ++it) {
    const double d2 = std::max(pot.d2(tc), 1e-12);
    const double step = pot.d1(tc) / d2;
    tc -= std::clamp(step, -10.0, 10.0);
    if (std::fabs(step) < 1e-13) break;
  }
  double scale = 1.0;
  for (double c : pot.coefficients()) scale = std::max(scale, std::fabs(c));
  for (double x : {0.3, 0.7, 1.1, 1.9}) {
    if (std::fabs(pot.value(tc + x) - pot.value(tc - x)) > 1e-11 * scale * (1.0 + x * x)) return false;
  }
  center = tc;
  return true;
}

}  // namespace

EquilibriumSolution solve_free_boundary(const KernelSpec& kernel, const PotentialSpec& potential,
                                        const SolveOptions& opts) {
  if (opts.verify_assumptions)
    require_assumptions(kernel, potential, AssumptionCase::FreeBoundary);

  Pins pins{potential.has_left_barrier(), potential.has_right_barrier()};
  if (pins.left && pins.right) {
    SolveOptions sub = opts;
    sub.verify_assumptions = false;
    return solve_fixed_interval(kernel, potential, sub);
  }

  auto [lo0, hi0] = initial_bracket(kernel, potential, opts.bracket_particles);

  for (int round = 0; round < 3; ++round) {
    double t1 = pins.left ? potential.barrier_left() : lo0;
    double t2 = pins.right ? potential.barrier_right() : hi0;
    const double span0 = t2 - t1;
    const double min_width = 0.02 * span0;

    double center = 0.0;
    const bool symmetric =
        !pins.left && !pins.right && potential_symmetric_about(potential, center);

    std::vector<int> active;  // 0: t1 free, 1: t2 free
    if (symmetric) {
      active = {1};  // one unknown, the half-width
    } else {
      if (!pins.left) active.push_back(0);
      if (!pins.right) active.push_back(1);
    }
    const int m = static_cast<int>(active.size());

    FreeSolveState st;
    double scale = 1.0;
    auto residual = [&](const VectorXd& th) -> VectorXd {
      double a1 = t1, a2 = t2;
      if (symmetric) {
        a1 = center - th(0);
        a2 = center + th(0);
      } else {
        int idx = 0;
        if (!pins.left) a1 = th(idx++);
        if (!pins.right) a2 = th(idx++);
      }
      if (!(a2 - a1 >= min_width))
        throw ConvergenceError("free-boundary iteration collapsed the support interval");
      st = inner_solve(kernel, potential, a1, a2, opts.nodes);
      scale = std::max(st.op->y().lpNorm<Eigen::Infinity>(), 1e-300);
      VectorXd F(m);
      if (symmetric) {
        F(0) = 0.5 * (st.op->endpoint_left() + st.op->endpoint_right()) / scale;
      } else {
        int idx = 0;
        if (!pins.left) F(idx++) = st.op->endpoint_left() / scale;
        if (!pins.right) F(idx++) = st.op->endpoint_right() / scale;
      }
      return F;
    };

    VectorXd theta(m);
    if (symmetric) {
      theta(0) = 0.5 * (hi0 - lo0);
    } else {
      int idx = 0;
      if (!pins.left) theta(idx++) = t1;
      if (!pins.right) theta(idx++) = t2;
    }

    VectorXd F = residual(theta);
    int iterations = 1;
    MatrixXd J(m, m);
    bool have_jacobian = false;
    const double tol = 1e-8;

    while (F.lpNorm<Eigen::Infinity>() > tol) {
      if (iterations >= opts.max_outer) {
        std::string diag = "free-boundary root-find did not converge: theta = [";
        for (int i = 0; i < m; ++i) diag += std::to_string(theta(i)) + (i + 1 < m ? ", " : "");
        diag += "], scaled coefficients = [";
        for (int i = 0; i < m; ++i) diag += std::to_string(F(i)) + (i + 1 < m ? ", " : "");
        throw ConvergenceError(diag + "] after " + std::to_string(iterations) + " iterations");
      }
      if (!have_jacobian) {
        const double h = std::max(1e-6 * (t2 - t1), 1e-9);
        for (int j = 0; j < m; ++j) {
          VectorXd tp = theta;
          tp(j) += h;
          J.col(j) = (residual(tp) - F) / h;
          ++iterations;
        }
        have_jacobian = true;
      }
      VectorXd step = J.fullPivLu().solve(-F);
      if (!step.allFinite()) {
        have_jacobian = false;
        continue;
      }
      const double max_step = 0.5 * (t2 - t1 + theta.lpNorm<Eigen::Infinity>());
      for (int j = 0; j < m; ++j) step(j) = std::clamp(step(j), -max_step, max_step);

      double lambda = 1.0;
      VectorXd theta_new, F_new;
      bool accepted = false;
      for (int bt = 0; bt < 8; ++bt, lambda *= 0.5) {
        theta_new = theta + lambda * step;
        try {
          F_new = residual(theta_new);
        } catch (const SolverError&) {
          continue;
        }
        ++iterations;
        if (F_new.lpNorm<Eigen::Infinity>() < F.lpNorm<Eigen::Infinity>() || lambda < 0.1) {
          accepted = true;
          break;
        }
      }
      if (!accepted)
        throw ConvergenceError("free-boundary line search failed; last scaled residual " +
                               std::to_string(F.lpNorm<Eigen::Infinity>()));
      // Broyden update
      const VectorXd dth = theta_new - theta, dF = F_new - F;
      if (dth.squaredNorm() > 0.0) J += (dF - J * dth) * dth.transpose() / dth.squaredNorm();
      theta = theta_new;
      F = F_new;
    }

    // Recover the final interval and check pinned-side coefficients.
    double f1 = t1, f2 = t2;
    if (symmetric) {
      f1 = center - theta(0);
      f2 = center + theta(0);
    } else {
      int idx = 0;
      if (!pins.left) f1 = theta(idx++);
      if (!pins.right) f2 = theta(idx++);
    }
    st = inner_solve(kernel, potential, f1, f2, opts.nodes);

    bool released = false;
    if (pins.left && st.op->endpoint_left() < -1e-6 * scale) {
      pins.left = false;
      released = true;
    }
    if (pins.right && st.op->endpoint_right() < -1e-6 * scale) {
      pins.right = false;
      released = true;
    }
    if (released) {
      lo0 = f1 - 0.25 * (f2 - f1);
      hi0 = f2 + 0.25 * (f2 - f1);
      continue;  // re-solve with the detached side free
    }

    EquilibriumSolution sol =
        build_solution(kernel, potential, st.u01, st.rec, *st.op, pins, iterations);
    const double gap_tol = -1e-5 * std::max(1.0, std::fabs(sol.constant_C));
    if (sol.diagnostics.h_exterior_min_gap < gap_tol)
      throw SolutionRejectedError(
          "exterior inequality h >= C violated: min gap = " +
          std::to_string(sol.diagnostics.h_exterior_min_gap));
    return sol;
  }
  throw ConvergenceError("free-boundary solve: barrier release loop did not settle");
}

double h_function(const EquilibriumSolution& solution, const KernelSpec& kernel,
                  const PotentialSpec& potential, double t) {
  const double t1 = solution.t1, t2 = solution.t2;
  if (t >= t1 && t <= t2) {
    auto [k01, u01, rec] = affine_rescale(kernel, potential, t1, t2);
    const double tau = rec.to_unit(t);
    const double hv = riesz_potential(kernel.a, solution.density.ref, tau);
    double vr = 0.0;
    const auto& ref = solution.density.ref;
    for (std::size_t j = 0; j < ref.rule().n; ++j)
      vr += ref.rule().weights[j] * ref.factor()[j] * k01.vreg.value(tau - ref.rule().nodes[j]);
    const double h01 = hv + vr + u01.value(tau);
    if (kernel.a > 0.0) return std::pow(rec.L, -kernel.a) * (h01 + 2.0 * rec.c);
    return h01 + 2.0 * rec.c - std::log(rec.L);
  }
  const double hv = weighted_graded_integral(solution.density.ref, [&](double s) {
    return kernel.value(t - (t1 + (t2 - t1) * s));
  });
  return hv + potential.value(t);
}

double energy(const WeightedDensity& density, const KernelSpec& kernel,
              const PotentialSpec& potential) {
  const double L = density.length();
  const double a = kernel.a;
  const auto& ref = density.ref;
  const auto& rule = ref.rule();

  double e_int = 0.0, e_pot = 0.0;
  std::unique_ptr<RieszConvolver> rc;
  std::unique_ptr<LogConvolver> lc;
  if (a > 0.0)
    rc = std::make_unique<RieszConvolver>(a, ref);
  else
    lc = std::make_unique<LogConvolver>(ref);

  for (std::size_t j = 0; j < rule.n; ++j) {
    const double tau = rule.nodes[j];
    double hv = (a > 0.0) ? std::pow(L, -a) * (*rc)(tau) : (*lc)(tau) - std::log(L);
    for (std::size_t k = 0; k < rule.n; ++k)
      hv += rule.weights[k] * ref.factor()[k] * kernel.vreg.value(L * (tau - rule.nodes[k]));
    const double m = rule.weights[j] * ref.factor()[j];
    e_int += 0.5 * m * hv;
    e_pot += m * potential.value(density.t1 + L * tau);
  }
  const double total = e_int + e_pot;
  if (!std::isfinite(total)) return std::numeric_limits<double>::infinity();
  return total;
}

double energy_fourier(const WeightedDensity& density, const KernelSpec& kernel,
                      const PotentialSpec& potential, double b) {
  const double L = density.length();
  if (L > 1.0 + 1e-12)
    throw std::domain_error("energy_fourier: support longer than the kernel's native interval");
  const auto& ref = density.ref;
  const auto& rule = ref.rule();

  auto rho_hat_sq = [&](double w) {
    double cr = 0.0, ci = 0.0;
    for (std::size_t k = 0; k < rule.n; ++k) {
      const double t = density.t1 + L * rule.nodes[k];
      const double m = rule.weights[k] * ref.factor()[k];
      cr += m * std::cos(2.0 * M_PI * w * t);
      ci += m * std::sin(2.0 * M_PI * w * t);
    }
    return cr * cr + ci * ci;
  };

  static const QuadratureRule gl = gauss_legendre(16);
  const double width = 0.125 / (std::fabs(density.t1) + std::fabs(density.t2) + L + 1.0);
  double acc = 0.0;
  double w0 = 0.0;
  for (int panel = 0; panel < 100000; ++panel) {
    std::vector<double> omegas(gl.n);
    for (std::size_t i = 0; i < gl.n; ++i) omegas[i] = w0 + width * gl.nodes[i];
    const std::vector<double> vh = kernel_fourier(kernel, b, omegas);
    double piece = 0.0;
    for (std::size_t i = 0; i < gl.n; ++i)
      piece += width * gl.weights[i] * vh[i] * rho_hat_sq(omegas[i]);
    acc += piece;
    w0 += width;
    if (w0 > 4.0 && std::fabs(piece) < 1e-10 * std::max(1.0, std::fabs(acc))) break;
    if (w0 > 2000.0) break;
  }

  double e_pot = 0.0;
  for (std::size_t j = 0; j < rule.n; ++j)
    e_pot += rule.weights[j] * ref.factor()[j] * potential.value(density.t1 + L * rule.nodes[j]);
  return acc + e_pot;
}

}  // namespace eqm
