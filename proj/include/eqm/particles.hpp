#pragma once

#include <cstdint>
#include <vector>

#include "eqm/kernels.hpp"

namespace eqm {

struct WeightedDensity;

struct ParticleConfiguration {
  std::vector<double> positions;  // strictly increasing
  double energy = 0.0;
  double gradient_norm = 0.0;
  bool converged = true;
  int iterations = 0;
};

/// Mean-field discrete energy
///   E_N = (1/N^2) sum_{i<j} V(x_i - x_j) + (1/N) sum_i U(x_i).
double discrete_energy(const ParticleConfiguration& config, const KernelSpec& kernel,
                       const PotentialSpec& potential);

/// Minimises the discrete energy by projected gradient descent with a
/// Barzilai-Borwein step and nonmonotone backtracking line search;
/// deterministic for a given seed.  Stops at
/// gradient_norm <= grad_tol_factor * N or at the iteration cap (the
/// configuration is returned either way, flagged by `converged`).
ParticleConfiguration minimize_particles(std::size_t n, const KernelSpec& kernel,
                                         const PotentialSpec& potential, std::uint64_t seed,
                                         double grad_tol_factor = 1e-8,
                                         int max_iterations = 100000);

struct MeasureDistance {
  double wasserstein1 = 0.0;
  double cdf_sup = 0.0;
};

/// Wasserstein-1 and sup-CDF distance between the empirical measure of the
/// configuration and a continuum density, via int |F_N - F| on a fine grid
/// (2^14 points), which is exact in one dimension up to the grid.
MeasureDistance compare_to_density(const ParticleConfiguration& config,
                                   const WeightedDensity& density);

}  // namespace eqm
