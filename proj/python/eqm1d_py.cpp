#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eqm/carleman.hpp"
#include "eqm/equilibrium.hpp"
#include "eqm/kernels.hpp"
#include "eqm/particles.hpp"
#include "eqm/reference.hpp"
#include "eqm/specfun.hpp"

namespace py = pybind11;
using namespace eqm;

namespace {

KernelSpec kernel_from_args(double a, const std::string& vreg,
                            const std::vector<double>& coefficients) {
  if (vreg == "zero") return make_kernel(a);
  if (vreg == "dislocation") return make_kernel(a, VregSpec::dislocation());
  if (vreg == "polynomial") return make_kernel(a, VregSpec::polynomial(coefficients));
  throw std::invalid_argument("unknown vreg form: " + vreg);
}

PotentialSpec potential_from_args(const std::string& form, const std::vector<double>& coefficients,
                                  double s1, double s2) {
  PotentialSpec pot;
  if (form == "zero")
    pot = PotentialSpec::zero();
  else if (form == "affine")
    pot = PotentialSpec::affine(coefficients.empty() ? 1.0 : coefficients[0]);
  else if (form == "quadratic" && coefficients.size() == 3)
    pot = PotentialSpec::quadratic(coefficients[0], coefficients[1], coefficients[2]);
  else if (form == "polynomial")
    pot = PotentialSpec::polynomial(coefficients);
  else
    throw std::invalid_argument("unknown potential form: " + form);
  if (std::isfinite(s1) || std::isfinite(s2)) pot.with_barriers(s1, s2);
  return pot;
}

py::dict solution_to_dict(const EquilibriumSolution& sol) {
  py::dict d;
  d["t1"] = sol.t1;
  d["t2"] = sol.t2;
  d["C"] = sol.constant_C;
  d["mass_error"] = sol.diagnostics.mass_error;
  d["h_flatness"] = sol.diagnostics.h_flatness;
  d["h_exterior_min_gap"] = sol.diagnostics.h_exterior_min_gap;
  d["endpoint_coeffs"] =
      py::make_tuple(sol.diagnostics.endpoint_coeffs[0], sol.diagnostics.endpoint_coeffs[1]);
  d["residual_sup"] = sol.diagnostics.residual_sup;
  d["iterations"] = sol.diagnostics.iterations;
  d["profile_case"] = sol.diagnostics.profile_case;
  d["min_density"] = sol.diagnostics.min_density;
  return d;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

PYBIND11_MODULE(_eqm1d, m) {
  m.doc() = "Equilibrium densities of one-dimensional nonlocal interaction energies";

  m.def("gamma", &gamma_fn, py::arg("x"));
  m.def("beta_moment", &beta_moment, py::arg("alpha"), py::arg("beta"), py::arg("t"));
  m.def(
      "gauss_jacobi",
      [](std::size_t n, double bl, double br) {
        const QuadratureRule r = gauss_jacobi(n, bl, br);
        return py::make_tuple(r.nodes, r.weights);
      },
      py::arg("n"), py::arg("beta_left"), py::arg("beta_right"));

  m.def("riesz_eval", &riesz_eval, py::arg("a"), py::arg("r"));
  m.def(
      "dislocation_vreg",
      [](double t) {
        const Deriv2 d = dislocation_vreg(t);
        return py::make_tuple(d.value, d.d1, d.d2);
      },
      py::arg("t"));
  m.def(
      "kernel_fourier",
      [](double a, const std::string& vreg, double b, const std::vector<double>& omegas) {
        return kernel_fourier(kernel_from_args(a, vreg, {}), b, omegas);
      },
      py::arg("a"), py::arg("vreg"), py::arg("b"), py::arg("omegas"));

  m.def("hilbert_of_weight", &hilbert_of_weight, py::arg("beta_left"), py::arg("beta_right"),
        py::arg("t"));

  m.def(
      "carleman_apply",
      [](double a, const std::function<double(double)>& f,
         const std::function<double(double)>& df, std::size_t n) {
        const CarlemanSolution sol = carleman_apply(a, FunctionData{f, df}, n);
        py::dict d;
        d["nodes"] = sol.density.rule().nodes;
        d["factor"] = sol.density.factor();
        d["mass"] = sol.mass;
        d["residual_sup"] = sol.residual_sup;
        return d;
      },
      py::arg("a"), py::arg("f"), py::arg("df"), py::arg("n") = 256);

  py::class_<EquilibriumSolution>(m, "EquilibriumSolution")
      .def_property_readonly("t1", [](const EquilibriumSolution& s) { return s.t1; })
      .def_property_readonly("t2", [](const EquilibriumSolution& s) { return s.t2; })
      .def_property_readonly("C", [](const EquilibriumSolution& s) { return s.constant_C; })
      .def("density", [](const EquilibriumSolution& s, double t) { return s.density.value(t); },
           py::arg("t"))
      .def("diagnostics", &solution_to_dict);

  m.def(
      "solve",
      [](double a, const std::string& vreg, const std::vector<double>& vreg_coefficients,
         const std::string& potential, const std::vector<double>& coefficients, double s1,
         double s2, const std::string& mode, std::size_t nodes) {
        const KernelSpec k = kernel_from_args(a, vreg, vreg_coefficients);
        const PotentialSpec u = potential_from_args(potential, coefficients, s1, s2);
        SolveOptions opts;
        opts.nodes = nodes;
        if (mode == "fixed_interval") return solve_fixed_interval(k, u, opts);
        if (mode == "free_boundary") return solve_free_boundary(k, u, opts);
        throw std::invalid_argument("mode must be fixed_interval or free_boundary");
      },
      py::arg("a"), py::arg("vreg") = "zero",
      py::arg("vreg_coefficients") = std::vector<double>{}, py::arg("potential") = "zero",
      py::arg("coefficients") = std::vector<double>{}, py::arg("s1") = -kInf,
      py::arg("s2") = kInf, py::arg("mode") = "fixed_interval", py::arg("nodes") = 256);

  m.def(
      "minimize_particles",
      [](std::size_t n, double a, const std::string& potential,
         const std::vector<double>& coefficients, double s1, double s2, std::uint64_t seed) {
        const ParticleConfiguration cfg = minimize_particles(
            n, make_kernel(a), potential_from_args(potential, coefficients, s1, s2), seed);
        py::dict d;
        d["positions"] = cfg.positions;
        d["energy"] = cfg.energy;
        d["gradient_norm"] = cfg.gradient_norm;
        d["converged"] = cfg.converged;
        return d;
      },
      py::arg("n"), py::arg("a") = 0.0, py::arg("potential") = "zero",
      py::arg("coefficients") = std::vector<double>{}, py::arg("s1") = -kInf,
      py::arg("s2") = kInf, py::arg("seed") = 1);

  m.def("head_louat_interval", &head_louat_interval, py::arg("t"));
  m.def("head_louat_halfline", &head_louat_halfline, py::arg("t"));
  m.def(
      "riesz_no_field",
      [](double a, double t) {
        const RieszNoField r = riesz_no_field(a, t);
        return py::make_tuple(r.density, r.constant_C);
      },
      py::arg("a"), py::arg("t"));
  m.def(
      "hco_pileup",
      [](double a, double gamma) {
        const ClosedFormCase c = hco_pileup(a, gamma);
        py::dict d;
        d["t2"] = c.t2;
        d["C"] = c.constant_C;
        return d;
      },
      py::arg("a"), py::arg("gamma"));
}
