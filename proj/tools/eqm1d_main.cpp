#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eqm/runner.hpp"

namespace {

int finish(const eqm::RunResult& r, const std::string& extra = "") {
  if (!extra.empty()) std::cout << extra;
  if (r.exit_code == eqm::kExitOk)
    std::cout << r.message << "\n";
  else
    std::cerr << "error(" << r.exit_code << "): " << r.message << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eqm1d: equilibrium densities of 1-d nonlocal interaction energies"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", reference;
  bool deterministic = false;

  // honored for interface stability; the solver is single-threaded
  if (const char* threads = std::getenv("EQM1D_THREADS"); threads != nullptr) (void)threads;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config_path, "JSON run configuration");
    if (needs_config) opt->required();
    cmd->add_option("--out-dir", out_dir, "output directory");
    cmd->add_flag("--deterministic", deterministic, "force bit-reproducible output");
  };

  auto* solve = app.add_subcommand("solve", "solve for the equilibrium density");
  add_common(solve, true);

  auto* validate = app.add_subcommand("validate", "run the invariant suite for a reference case");
  validate->add_option("--reference", reference, "reference case name, e.g. head-louat-interval")
      ->required();

  auto* particles = app.add_subcommand("particles", "minimise the discrete particle energy");
  add_common(particles, true);

  double halfwidth = 2.0;
  auto* fourier = app.add_subcommand("fourier-check", "tabulate the kernel Fourier bounds");
  add_common(fourier, true);
  fourier->add_option("--halfwidth", halfwidth, "support halfwidth b of the kernel extension");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      eqm::RunConfig cfg = eqm::load_config(config_path);
      if (deterministic) cfg.deterministic = true;
      return finish(eqm::run_solve(cfg, out_dir));
    }
    if (validate->parsed()) {
      std::string table;
      const eqm::RunResult r = eqm::run_validate(reference, table);
      return finish(r, table);
    }
    if (particles->parsed()) {
      eqm::RunConfig cfg = eqm::load_config(config_path);
      if (deterministic) cfg.deterministic = true;
      return finish(eqm::run_particles(cfg, out_dir));
    }
    if (fourier->parsed()) {
      eqm::RunConfig cfg = eqm::load_config(config_path);
      std::string table;
      const eqm::RunResult r = eqm::run_fourier_check(cfg, out_dir, table, halfwidth);
      return finish(r, table);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error(" << eqm::kExitBadConfig << "): " << e.what() << "\n";
    return eqm::kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error(" << eqm::kExitInternal << "): " << e.what() << "\n";
    return eqm::kExitInternal;
  }
  return eqm::kExitInternal;
}
