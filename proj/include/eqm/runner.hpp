#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eqm/equilibrium.hpp"
#include "eqm/kernels.hpp"

namespace eqm {

// process exit codes shared by the CLI
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kExitInternal = 4;

struct ParticleRunConfig {
  std::size_t n = 0;
  std::uint64_t seed = 1;
};

struct RunConfig {
  KernelSpec kernel;
  PotentialSpec potential;
  std::string mode = "fixed_interval";  // or "free_boundary"
  std::size_t nodes = 256;
  double tolerance = 1e-10;
  int max_outer = 60;
  bool deterministic = true;
  std::string density_path = "density.csv";
  std::string diagnostics_path = "diagnostics.json";
  std::size_t sample_count = 257;
  std::optional<ParticleRunConfig> particles;
};

/// Parses and validates a config file; throws std::invalid_argument with a
/// field-level message on any violation.
RunConfig load_config(const std::string& path);

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
};

/// solve: writes the density CSV (t, rho, h) and the diagnostics JSON.
RunResult run_solve(const RunConfig& config, const std::string& out_dir);

/// validate: runs the invariant suite for a named reference case and
/// prints a pass/fail table to `out`.
RunResult run_validate(const std::string& reference_name, std::string& out);

/// particles: writes positions CSV and comparison metrics JSON.
RunResult run_particles(const RunConfig& config, const std::string& out_dir);

/// fourier-check: tabulates V^ and the decay band on [0, 100]; b is the
/// halfwidth of the compactly supported kernel extension.
RunResult run_fourier_check(const RunConfig& config, const std::string& out_dir, std::string& out,
                            double b = 2.0);

}  // namespace eqm
