#pragma once

#include <stdexcept>
#include <string>
#include <tuple>

#include "eqm/carleman.hpp"
#include "eqm/kernels.hpp"
#include "eqm/singular_ops.hpp"

namespace eqm {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : SolverError {
  using SolverError::SolverError;
};
struct ConvergenceError : SolverError {
  using SolverError::SolverError;
};
struct SolutionRejectedError : SolverError {
  using SolverError::SolverError;
};
struct SingularSystemError : SolverError {
  using SolverError::SolverError;
};

/// Endpoint behaviour of the density representation.
enum class ExponentMode { Blowup, Vanishing, MixedLeftBarrier, MixedRightBarrier, General };

/// Probability density on [t1, t2] stored as a weighted function in
/// reference coordinates: rho(t) = w(tau) g(tau) / (t2 - t1), tau = (t-t1)/(t2-t1).
struct WeightedDensity {
  double t1 = 0.0, t2 = 1.0;
  WeightedFunction ref;
  ExponentMode mode = ExponentMode::General;

  double length() const { return t2 - t1; }
  double value(double t) const {
    const double tau = (t - t1) / length();
    if (tau <= 0.0 || tau >= 1.0) return 0.0;
    return ref.weight_at(tau) * ref.factor_at(tau) / length();
  }
  double mass() const { return ref.reference_mass(); }
};

struct SolveDiagnostics {
  double mass_error = 0.0;
  double h_flatness = 0.0;
  double h_exterior_min_gap = 0.0;
  double endpoint_coeffs[2] = {0.0, 0.0};
  double residual_sup = 0.0;
  int iterations = 0;
  double min_density = 0.0;
  std::string profile_case;
};

struct EquilibriumSolution {
  double t1 = 0.0, t2 = 1.0;
  double constant_C = 0.0;
  WeightedDensity density;
  SolveDiagnostics diagnostics;
};

struct SolveOptions {
  std::size_t nodes = 256;
  double tolerance = 1e-10;
  int max_outer = 60;
  bool deterministic = true;
  bool verify_assumptions = true;
  bool picard_crosscheck = false;
  std::size_t bracket_particles = 64;  // 0 disables the particle bracket
};

/// Bookkeeping of the affine change of variables mapping a problem on
/// [t1, t2] to the normalised one on [0, 1].
struct RescaleRecord {
  double t1 = 0.0;
  double L = 1.0;
  double a = 0.0;
  double c = 0.0;  // additive kernel constant enforcing V(1) = -V'(1)

  double to_unit(double t) const { return (t - t1) / L; }
  double from_unit(double tau) const { return t1 + L * tau; }
  double constant_pullback(double C01) const;
  double energy_pullback(double E01) const;
};

/// Normalises (kernel, potential) on [t1, t2] to the unit interval:
/// V_reg(t) := L^a V~_reg(L t) - 2c, U(t) := L^a U~(L t + t1) with c such
/// that V(1) = -V'(1).
std::tuple<KernelSpec, PotentialSpec, RescaleRecord> affine_rescale(const KernelSpec& kernel,
                                                                    const PotentialSpec& potential,
                                                                    double t1, double t2);

/// Solves the constrained problem on the fixed interval given by the
/// barriers (or on [0,1] when no barriers are set): density, constant and
/// diagnostics from the direct linear solve of the discretised relation
/// rho = C_a(C - V_reg * rho - U) with unit mass.
EquilibriumSolution solve_fixed_interval(const KernelSpec& kernel, const PotentialSpec& potential,
                                         const SolveOptions& opts = {});

/// Free-boundary solve: outer quasi-Newton iteration on the unpinned
/// support endpoints driving the endpoint blow-up coefficients to zero,
/// with the fixed-interval solver inside.
EquilibriumSolution solve_free_boundary(const KernelSpec& kernel, const PotentialSpec& potential,
                                        const SolveOptions& opts = {});

/// h_rho(t) = (V * rho)(t) + U(t) in original coordinates; singular
/// quadrature inside the support, regular weighted quadrature outside.
double h_function(const EquilibriumSolution& solution, const KernelSpec& kernel,
                  const PotentialSpec& potential, double t);

/// E(rho) = 1/2 iint V(t-s) drho drho + int U drho.
double energy(const WeightedDensity& density, const KernelSpec& kernel,
              const PotentialSpec& potential);

/// Interaction part of the energy through the Fourier bound form
/// int V^ |rho^|^2 using the compactly extended kernel; valid for densities
/// whose support has length <= 1 so the extension does not alter V on the
/// realised differences.
double energy_fourier(const WeightedDensity& density, const KernelSpec& kernel,
                      const PotentialSpec& potential, double b = 2.0);

}  // namespace eqm
