#include <doctest.h>

#include <cmath>

#include "eqm/carleman.hpp"
#include "eqm/reference.hpp"
#include "eqm/specfun.hpp"
#include "oracles.hpp"

using namespace eqm;

TEST_CASE("head_louat_interval: values, symmetry, mass") {
  CHECK(head_louat_interval(0.5) == doctest::Approx(2.0 / M_PI).epsilon(1e-14));
  CHECK(head_louat_interval(0.2) == doctest::Approx(head_louat_interval(0.8)).epsilon(1e-14));
  const QuadratureRule q = gauss_jacobi(32, -0.5, -0.5);
  double mass = 0.0;
  for (std::size_t i = 0; i < q.n; ++i)
    mass += q.weights[i] * head_louat_interval(q.nodes[i]) *
            std::sqrt(q.nodes[i] * (1.0 - q.nodes[i]));
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(head_louat_interval(0.0), std::domain_error);
  CHECK_THROWS_AS(head_louat_interval(1.4), std::domain_error);
}

TEST_CASE("head_louat_halfline: values, vanishing rate, mass") {
  CHECK(head_louat_halfline(1.0) == doctest::Approx(1.0 / M_PI).epsilon(1e-14));

  // sqrt vanishing rate at t2 = 2: fit exponent over two decades
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int k = 10; k <= 30; ++k) {
    const double d = std::pow(10.0, -0.1 * k);
    sx += std::log(d);
    sy += std::log(head_louat_halfline(2.0 - d));
    sxx += std::log(d) * std::log(d);
    sxy += std::log(d) * std::log(head_louat_halfline(2.0 - d));
    ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(0.5).epsilon(0.04));

  const double mass = oracle::integrate_singular(
      [](double, double da, double db) { return std::sqrt(db / da) / M_PI; }, 0.0, 2.0);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(head_louat_halfline(2.0), std::domain_error);
}

TEST_CASE("riesz_no_field: values and mass across a") {
  const RieszNoField half = riesz_no_field(0.5, 0.5);
  const double g34 = gamma_fn(0.75);
  CHECK(half.density ==
        doctest::Approx(0.5 * gamma_fn(0.5) / (g34 * g34) * std::sqrt(2.0)).epsilon(1e-13));
  CHECK(half.constant_C ==
        doctest::Approx(0.5 * M_PI * gamma_fn(0.5) /
                        (g34 * g34 * std::cos(0.25 * M_PI))).epsilon(1e-13));

  for (double a : {0.25, 0.5, 0.75}) {
    const double lam = 0.5 * (1.0 - a);
    const QuadratureRule q = gauss_jacobi(48, -lam, -lam);
    double mass = 0.0;
    for (std::size_t i = 0; i < q.n; ++i) {
      const double t = q.nodes[i];
      mass += q.weights[i] * riesz_no_field(a, t).density * std::pow(t * (1.0 - t), lam);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(riesz_no_field(0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(riesz_no_field(0.5, -0.1), std::domain_error);
}

TEST_CASE("hco_pileup: endpoint, mass, scaling, blow-up rates") {
  const ClosedFormCase c = hco_pileup(0.5, 1.0);
  CHECK(c.t2 == doctest::Approx(1.9014).epsilon(2e-4));  // evaluated from the formula

  const double mass = oracle::integrate_singular(
      [&](double, double da, double db) {
        return std::cos(0.25 * M_PI) / (0.5 * M_PI) * std::pow(db, 0.75) * std::pow(da, -0.25);
      },
      0.0, c.t2);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

  const ClosedFormCase c2 = hco_pileup(0.5, 2.0);
  CHECK(c2.t2 / c.t2 == doctest::Approx(std::pow(2.0, -1.0 / 1.5)).epsilon(1e-12));

  // blow-up exponent -(1-a)/2 at 0 and vanishing (1+a)/2 at t2
  auto fit = [&](bool at_zero) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int k = 10; k <= 30; ++k) {
      const double d = std::pow(10.0, -0.1 * k);
      const double t = at_zero ? d : c.t2 - d;
      sx += std::log(d);
      sy += std::log(c.density(t));
      sxx += std::log(d) * std::log(d);
      sxy += std::log(d) * std::log(c.density(t));
      ++n;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  CHECK(fit(true) == doctest::Approx(-0.25).epsilon(0.05));
  CHECK(fit(false) == doctest::Approx(0.75).epsilon(0.05));
}

TEST_CASE("closed-form densities satisfy the singular integral equation") {
  // V_a * rho + U - C flat on the support, checked through verify_residual
  SUBCASE("riesz no field") {
    const double a = 0.5;
    const double lam = 0.25;
    const QuadratureRule q = gauss_jacobi(128, -lam, -lam);
    std::vector<double> factor(q.n);
    for (std::size_t i = 0; i < q.n; ++i) {
      const double t = q.nodes[i];
      factor[i] = riesz_no_field(a, t).density * std::pow(t * (1.0 - t), lam);
    }
    const WeightedFunction rho(-lam, -lam, std::move(factor));
    const double C = riesz_no_field(a, 0.5).constant_C;
    CHECK(verify_residual(a, rho, [C](double) { return C; }, default_residual_targets()) <= 1e-5);
  }
  SUBCASE("head louat interval") {
    const QuadratureRule q = gauss_jacobi(128, -0.5, -0.5);
    std::vector<double> factor(q.n, 1.0 / M_PI);
    const WeightedFunction rho(-0.5, -0.5, std::move(factor));
    CHECK(verify_residual(0.0, rho, [](double) { return 2.0 * std::log(2.0); },
                          default_residual_targets()) <= 1e-6);
  }
}
