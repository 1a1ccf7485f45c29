#include "eqm/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "eqm/particles.hpp"
#include "eqm/reference.hpp"

namespace eqm {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw std::invalid_argument("config field '" + field + "': " + why);
}

double read_barrier(const ordered_json& j, const std::string& field) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_number()) return j.get<double>();
  bad_field(field, "must be a number or null");
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

KernelSpec parse_kernel(const ordered_json& j) {
  if (!j.is_object()) bad_field("kernel", "must be an object");
  if (!j.contains("a") || !j["a"].is_number()) bad_field("kernel.a", "must be a number");
  const double a = j["a"].get<double>();
  if (!(a >= 0.0) || !(a < 1.0)) bad_field("kernel.a", "must lie in [0,1)");

  VregSpec vreg = VregSpec::zero();
  if (j.contains("vreg")) {
    const auto& v = j["vreg"];
    const std::string name = v.value("name", "zero");
    if (name == "zero") {
      vreg = VregSpec::zero();
    } else if (name == "dislocation") {
      vreg = VregSpec::dislocation();
    } else if (name == "polynomial") {
      if (!v.contains("coefficients") || !v["coefficients"].is_array())
        bad_field("kernel.vreg.coefficients", "must be an array of even-power coefficients");
      vreg = VregSpec::polynomial(v["coefficients"].get<std::vector<double>>());
    } else if (name == "tabulated") {
      if (!v.contains("grid") || !v.contains("values"))
        bad_field("kernel.vreg", "tabulated form needs 'grid' and 'values'");
      vreg = VregSpec::tabulated(v["grid"].get<std::vector<double>>(),
                                 v["values"].get<std::vector<double>>());
    } else {
      bad_field("kernel.vreg.name", "unknown form '" + name + "'");
    }
  }
  return make_kernel(a, std::move(vreg));
}

PotentialSpec parse_potential(const ordered_json& j) {
  if (!j.is_object()) bad_field("potential", "must be an object");
  const std::string form = j.value("form", "zero");
  PotentialSpec pot = PotentialSpec::zero();
  if (form == "zero") {
    pot = PotentialSpec::zero();
  } else if (form == "affine") {
    if (!j.contains("gamma") || !j["gamma"].is_number())
      bad_field("potential.gamma", "affine form needs a numeric 'gamma'");
    pot = PotentialSpec::affine(j["gamma"].get<double>());
  } else if (form == "quadratic" || form == "polynomial") {
    if (!j.contains("coefficients") || !j["coefficients"].is_array())
      bad_field("potential.coefficients", "must be an array (ascending powers)");
    const auto c = j["coefficients"].get<std::vector<double>>();
    if (form == "quadratic") {
      if (c.size() != 3) bad_field("potential.coefficients", "quadratic form needs 3 entries");
      pot = PotentialSpec::quadratic(c[0], c[1], c[2]);
    } else {
      pot = PotentialSpec::polynomial(c);
    }
  } else {
    bad_field("potential.form", "unknown form '" + form + "'");
  }

  if (j.contains("barriers")) {
    const auto& b = j["barriers"];
    if (!b.is_array() || b.size() != 2) bad_field("potential.barriers", "must be [s1, s2]");
    const double s1 = read_barrier(b[0], "potential.barriers[0]");
    const double s2 = read_barrier(b[1], "potential.barriers[1]");
    const double lo = std::isnan(s1) ? -std::numeric_limits<double>::infinity() : s1;
    const double hi = std::isnan(s2) ? std::numeric_limits<double>::infinity() : s2;
    if (!(lo < hi)) bad_field("potential.barriers", "must satisfy s1 < s2");
    if (std::isfinite(lo) || std::isfinite(hi)) pot.with_barriers(lo, hi);
  }
  return pot;
}

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file not readable: " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.contains("schema") || j["schema"] != "eqm1d/config/v1")
    bad_field("schema", "must be \"eqm1d/config/v1\"");

  RunConfig cfg;
  if (!j.contains("kernel")) bad_field("kernel", "missing");
  cfg.kernel = parse_kernel(j["kernel"]);
  cfg.potential = parse_potential(j.value("potential", ordered_json::object()));

  const auto s = j.value("solver", ordered_json::object());
  cfg.mode = s.value("mode", "fixed_interval");
  if (cfg.mode != "fixed_interval" && cfg.mode != "free_boundary")
    bad_field("solver.mode", "must be fixed_interval or free_boundary");
  cfg.nodes = s.value("nodes", 256);
  if (!power_of_two(cfg.nodes) || cfg.nodes < 64 || cfg.nodes > 4096)
    bad_field("solver.nodes", "must be a power of two in [64, 4096]");
  cfg.tolerance = s.value("tolerance", 1e-10);
  if (!(cfg.tolerance >= 1e-12) || !(cfg.tolerance <= 1e-3))
    bad_field("solver.tolerance", "must lie in [1e-12, 1e-3]");
  cfg.max_outer = s.value("max_outer", 60);
  if (cfg.max_outer < 1) bad_field("solver.max_outer", "must be positive");
  cfg.deterministic = s.value("deterministic", true);

  if (cfg.mode == "fixed_interval") {
    const bool both = cfg.potential.has_left_barrier() && cfg.potential.has_right_barrier();
    const bool none = !cfg.potential.has_left_barrier() && !cfg.potential.has_right_barrier();
    if (!both && !none)
      bad_field("potential.barriers", "fixed_interval mode requires both barriers finite");
  }

  const auto o = j.value("output", ordered_json::object());
  cfg.density_path = o.value("density_path", "density.csv");
  cfg.diagnostics_path = o.value("diagnostics_path", "diagnostics.json");
  cfg.sample_count = o.value("sample_count", 257);
  if (cfg.sample_count < 2) bad_field("output.sample_count", "must be at least 2");

  if (j.contains("particles")) {
    const auto& p = j["particles"];
    ParticleRunConfig pc;
    pc.n = p.value("n", 0);
    if (pc.n < 2) bad_field("particles.n", "must be at least 2");
    pc.seed = p.value("seed", 1);
    cfg.particles = pc;
  }
  return cfg;
}

namespace {

EquilibriumSolution solve_config(const RunConfig& cfg) {
  SolveOptions opts;
  opts.nodes = cfg.nodes;
  opts.tolerance = cfg.tolerance;
  opts.max_outer = cfg.max_outer;
  opts.deterministic = cfg.deterministic;
  if (cfg.mode == "fixed_interval") return solve_fixed_interval(cfg.kernel, cfg.potential, opts);
  return solve_free_boundary(cfg.kernel, cfg.potential, opts);
}

ordered_json diagnostics_json(const EquilibriumSolution& sol) {
  ordered_json d;
  d["schema"] = "eqm1d/diagnostics/v1";
  d["t1"] = sol.t1;
  d["t2"] = sol.t2;
  d["C"] = sol.constant_C;
  d["mass_error"] = sol.diagnostics.mass_error;
  d["h_flatness"] = sol.diagnostics.h_flatness;
  d["h_exterior_min_gap"] = sol.diagnostics.h_exterior_min_gap;
  d["endpoint_coeffs"] = {sol.diagnostics.endpoint_coeffs[0], sol.diagnostics.endpoint_coeffs[1]};
  d["residual_sup"] = sol.diagnostics.residual_sup;
  d["iterations"] = sol.diagnostics.iterations;
  d["profile_case"] = sol.diagnostics.profile_case;
  d["min_density"] = sol.diagnostics.min_density;
  return d;
}

void write_density_csv(const std::string& path, const EquilibriumSolution& sol,
                       const KernelSpec& kernel, const PotentialSpec& pot,
                       std::size_t sample_count) {
  std::ofstream out(path);
  out << "t,rho,h\n";
  for (std::size_t i = 0; i < sample_count + 2; ++i) {
    double t;
    if (i == 0)
      t = sol.t1;
    else if (i == sample_count + 1)
      t = sol.t2;
    else
      t = sol.t1 + (sol.t2 - sol.t1) * static_cast<double>(i) / (sample_count + 1);
    double rho;
    if (i == 0 || i == sample_count + 1) {
      const double tau = (i == 0) ? 0.0 : 1.0;
      const double w = sol.density.ref.weight_at(tau);
      rho = w * sol.density.ref.factor_at(tau) / sol.density.length();
    } else {
      rho = sol.density.value(t);
    }
    const double h = h_function(sol, kernel, pot, t);
    out << format_g17(t) << ',' << format_g17(rho) << ',' << format_g17(h) << '\n';
  }
}

}  // namespace

namespace {

RunResult record_failure(const std::string& out_dir, int code, const std::string& message) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!ec) {
    ordered_json err;
    err["schema"] = "eqm1d/error/v1";
    err["exit_code"] = code;
    err["message"] = message;
    std::ofstream je((fs::path(out_dir) / "error.json").string());
    je << err.dump(2) << '\n';
  }
  return {code, message};
}

}  // namespace

RunResult run_solve(const RunConfig& config, const std::string& out_dir) {
  namespace fs = std::filesystem;
  try {
    const EquilibriumSolution sol = solve_config(config);
    fs::create_directories(out_dir);
    write_density_csv((fs::path(out_dir) / config.density_path).string(), sol, config.kernel,
                      config.potential, config.sample_count);
    std::ofstream jd((fs::path(out_dir) / config.diagnostics_path).string());
    jd << diagnostics_json(sol).dump(2) << '\n';
    return {kExitOk, "solved: t1 = " + format_g17(sol.t1) + ", t2 = " + format_g17(sol.t2) +
                         ", C = " + format_g17(sol.constant_C)};
  } catch (const PreconditionError& e) {
    return record_failure(out_dir, kExitBadConfig, std::string("precondition: ") + e.what());
  } catch (const ConvergenceError& e) {
    return record_failure(out_dir, kExitNoConvergence, std::string("no convergence: ") + e.what());
  } catch (const SolverError& e) {
    return record_failure(out_dir, kExitNoConvergence, std::string("solver: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return {kExitBadConfig, e.what()};
  }
}

namespace {

struct CheckRow {
  std::string name;
  double measured;
  double bound;
  bool pass;
};

void add_row(std::vector<CheckRow>& rows, const std::string& name, double measured, double bound) {
  rows.push_back({name, measured, bound, std::fabs(measured) <= bound});
}

std::string render_rows(const std::string& title, const std::vector<CheckRow>& rows) {
  std::ostringstream os;
  os << "validation: " << title << "\n";
  bool all = true;
  for (const auto& r : rows) {
    all = all && r.pass;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-34s %12.3e  (tol %8.1e)  %s\n", r.name.c_str(),
                  r.measured, r.bound, r.pass ? "pass" : "FAIL");
    os << buf;
  }
  os << (all ? "all checks passed" : "CHECKS FAILED") << "\n";
  return os.str();
}

bool rows_pass(const std::vector<CheckRow>& rows) {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

}  // namespace

RunResult run_validate(const std::string& reference_name, std::string& out) {
  // accepts e.g. "riesz-no-field a=0.5" or "hco-pileup a=0.5 gamma=1"
  std::istringstream is(reference_name);
  std::string name;
  is >> name;
  double a = 0.5, gamma = 1.0;
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) return {kExitBadConfig, "malformed reference parameter: " + tok};
    const std::string key = tok.substr(0, eq);
    const double val = std::atof(tok.substr(eq + 1).c_str());
    if (key == "a")
      a = val;
    else if (key == "gamma")
      gamma = val;
    else
      return {kExitBadConfig, "unknown reference parameter: " + key};
  }

  ClosedFormCase ref;
  bool free_boundary = false;
  if (name == "head-louat-interval") {
    ref = head_louat_interval_case();
  } else if (name == "head-louat-halfline") {
    ref = head_louat_halfline_case();
    free_boundary = true;
  } else if (name == "riesz-no-field") {
    if (!(a > 0.0) || !(a < 1.0)) return {kExitBadConfig, "riesz-no-field needs a in (0,1)"};
    ref = riesz_no_field_case(a);
  } else if (name == "hco-pileup") {
    if (!(a > 0.0) || !(a < 1.0) || !(gamma > 0.0))
      return {kExitBadConfig, "hco-pileup needs a in (0,1) and gamma > 0"};
    ref = hco_pileup(a, gamma);
    free_boundary = true;
  } else {
    return {kExitBadConfig, "unknown reference case: " + name};
  }

  try {
    std::vector<CheckRow> rows;
    const AssumptionReport rep = check_assumptions(
        ref.kernel, ref.potential,
        free_boundary ? AssumptionCase::FreeBoundary : AssumptionCase::FixedInterval);
    add_row(rows, "assumptions", rep.all_pass() ? 0.0 : 1.0, 0.5);

    SolveOptions opts;
    const EquilibriumSolution sol = free_boundary
                                        ? solve_free_boundary(ref.kernel, ref.potential, opts)
                                        : solve_fixed_interval(ref.kernel, ref.potential, opts);

    add_row(rows, "support t1", sol.t1 - ref.t1, 1e-4 * std::max(1.0, std::fabs(ref.t1)));
    add_row(rows, "support t2", sol.t2 - ref.t2, 1e-4 * std::max(1.0, std::fabs(ref.t2)));
    add_row(rows, "constant C", (sol.constant_C - ref.constant_C) / ref.constant_C, 1e-8);

    double sup = 0.0;
    for (int i = 0; i < 101; ++i) {
      const double t = ref.t1 + (ref.t2 - ref.t1) * (0.02 + 0.96 * i / 100.0);
      const double want = ref.density(t);
      sup = std::max(sup, std::fabs(sol.density.value(t) - want) / std::max(1.0, want));
    }
    add_row(rows, "density interior sup error", sup, 1e-6);
    add_row(rows, "mass error", sol.diagnostics.mass_error, 1e-9);
    add_row(rows, "h flatness", sol.diagnostics.h_flatness, 1e-5);
    add_row(rows, "exterior h gap", std::min(0.0, sol.diagnostics.h_exterior_min_gap), 1e-5);
    add_row(rows, "equation residual", sol.diagnostics.residual_sup, 1e-5);

    out = render_rows(ref.name, rows);
    return rows_pass(rows) ? RunResult{kExitOk, "all checks passed"}
                           : RunResult{kExitNoConvergence, "validation checks failed"};
  } catch (const SolverError& e) {
    return {kExitNoConvergence, std::string("solver: ") + e.what()};
  }
}

RunResult run_particles(const RunConfig& config, const std::string& out_dir) {
  namespace fs = std::filesystem;
  if (!config.particles) return {kExitBadConfig, "config has no 'particles' section"};
  try {
    const auto pc = *config.particles;
    const ParticleConfiguration particles =
        minimize_particles(pc.n, config.kernel, config.potential, pc.seed);

    const EquilibriumSolution sol = solve_config(config);
    const MeasureDistance dist = compare_to_density(particles, sol.density);

    fs::create_directories(out_dir);
    std::ofstream csv((fs::path(out_dir) / "particles.csv").string());
    csv << "index,x\n";
    for (std::size_t i = 0; i < particles.positions.size(); ++i)
      csv << i << ',' << format_g17(particles.positions[i]) << '\n';

    ordered_json m;
    m["schema"] = "eqm1d/particle-metrics/v1";
    m["n"] = pc.n;
    m["seed"] = pc.seed;
    m["wasserstein1"] = dist.wasserstein1;
    m["cdf_sup"] = dist.cdf_sup;
    m["energy"] = particles.energy;
    m["gradient_norm"] = particles.gradient_norm;
    m["converged"] = particles.converged;
    m["iterations"] = particles.iterations;
    std::ofstream jm((fs::path(out_dir) / "particle_metrics.json").string());
    jm << m.dump(2) << '\n';
    return {kExitOk, "particles: W1 = " + format_g17(dist.wasserstein1)};
  } catch (const SolverError& e) {
    return {kExitNoConvergence, std::string("solver: ") + e.what()};
  } catch (const std::invalid_argument& e) {
    return {kExitBadConfig, e.what()};
  }
}

RunResult run_fourier_check(const RunConfig& config, const std::string& out_dir, std::string& out,
                            double b) {
  namespace fs = std::filesystem;
  try {
    std::vector<double> omegas;
    for (int i = 0; i <= 200; ++i) omegas.push_back(0.5 * i);
    const std::vector<double> vh = kernel_fourier(config.kernel, b, omegas);

    const double decay = 0.5 * (1.0 - config.kernel.a);
    double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
    bool positive = true;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      positive = positive && (vh[i] > 0.0);
      const double band = vh[i] * std::pow(1.0 + omegas[i] * omegas[i], decay);
      cmin = std::min(cmin, band);
      cmax = std::max(cmax, band);
    }

    std::ostringstream os;
    os << "fourier check on omega in [0, 100], b = " << b << "\n";
    os << "  positivity: " << (positive ? "pass" : "FAIL") << "\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "  band of V^(w) (1+w^2)^{%.3f}: [%.6e, %.6e], ratio %.2f\n", decay, cmin, cmax,
                  cmax / cmin);
    os << buf;
    out = os.str();

    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      std::ofstream csv((fs::path(out_dir) / "fourier.csv").string());
      csv << "omega,vhat,band\n";
      for (std::size_t i = 0; i < omegas.size(); ++i)
        csv << format_g17(omegas[i]) << ',' << format_g17(vh[i]) << ','
            << format_g17(vh[i] * std::pow(1.0 + omegas[i] * omegas[i], decay)) << '\n';
    }
    return positive ? RunResult{kExitOk, "fourier bounds hold"}
                    : RunResult{kExitNoConvergence, "fourier positivity failed"};
  } catch (const std::exception& e) {
    return {kExitBadConfig, e.what()};
  }
}

}  // namespace eqm
