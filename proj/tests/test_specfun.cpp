#include <doctest.h>

#include <cmath>

#include "eqm/specfun.hpp"
#include "oracles.hpp"

using namespace eqm;

TEST_CASE("gamma: pinned values") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-14));
  // reflection at a = 0.3
  CHECK(gamma_fn(0.3) * gamma_fn(0.7) ==
        doctest::Approx(M_PI / std::sin(0.3 * M_PI)).epsilon(1e-13));
}

TEST_CASE("gamma: recurrence and reflection grids") {
  for (int i = 1; i <= 100; ++i) {
    const double x = 0.1 * i;
    CHECK(gamma_fn(x + 1.0) == doctest::Approx(x * gamma_fn(x)).epsilon(1e-12));
  }
  for (int i = 1; i <= 19; ++i) {
    const double a = 0.05 * i;
    CHECK(gamma_fn(a) * gamma_fn(1.0 - a) ==
          doctest::Approx(M_PI / std::sin(a * M_PI)).epsilon(1e-12));
  }
}

TEST_CASE("gamma: domain errors") {
  CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
  CHECK_THROWS_AS(gamma_fn(-1.5), std::domain_error);
  CHECK_THROWS_AS(gamma_fn(std::nan("")), std::domain_error);
}

TEST_CASE("beta_moment: closed values and quadrature oracle") {
  CHECK(beta_moment(1.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(beta_moment(0.5, 0.5, 1.0) == doctest::Approx(M_PI).epsilon(1e-13));

  // int_0^2 s^{-1/4} (2-s)^{-1/4} ds against the adaptive oracle
  const double want = oracle::integrate_singular(
      [](double, double da, double db) { return std::pow(da, -0.25) * std::pow(db, -0.25); },
      0.0, 2.0);
  CHECK(want == doctest::Approx(2.3962804693522864).epsilon(1e-10));  // frozen oracle value
  CHECK(beta_moment(0.75, 0.75, 2.0) == doctest::Approx(want).epsilon(1e-10));

  CHECK_THROWS_AS(beta_moment(0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(beta_moment(1.0, -0.2, 1.0), std::domain_error);
}

TEST_CASE("gauss_jacobi: basic shapes") {
  const QuadratureRule mid = gauss_jacobi(1, 0.0, 0.0);
  CHECK(mid.nodes[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mid.weights[0] == doctest::Approx(1.0).epsilon(1e-14));

  const QuadratureRule cheb = gauss_jacobi(32, -0.5, -0.5);
  double wsum = 0.0;
  for (double w : cheb.weights) wsum += w;
  CHECK(wsum == doctest::Approx(M_PI).epsilon(1e-13));

  const QuadratureRule q = gauss_jacobi(32, -0.25, -0.25);
  wsum = 0.0;
  for (double w : q.weights) wsum += w;
  const double g34 = gamma_fn(0.75);
  CHECK(wsum == doctest::Approx(g34 * g34 / (0.5 * gamma_fn(0.5))).epsilon(1e-13));

  CHECK_THROWS_AS(gauss_jacobi(4, -1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(gauss_jacobi(0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("gauss_jacobi: node/weight invariants and moment exactness") {
  for (auto [bl, br] : {std::pair{-0.5, -0.5}, std::pair{-0.75, 0.25}, std::pair{0.5, 0.5},
                        std::pair{0.0, -0.3}, std::pair{1.5, -0.25}}) {
    for (std::size_t n : {1u, 2u, 7u, 24u}) {
      const QuadratureRule rule = gauss_jacobi(n, bl, br);
      REQUIRE(rule.nodes.size() == n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(rule.nodes[i] > 0.0);
        CHECK(rule.nodes[i] < 1.0);
        CHECK(rule.weights[i] > 0.0);
        if (i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
      }
      // exact on monomials up to degree 2n-1
      for (std::size_t k = 0; k < 2 * n; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += rule.weights[i] * std::pow(rule.nodes[i], k);
        const double want = beta_moment(bl + k + 1.0, br + 1.0, 1.0);
        CHECK(acc == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("gauss_jacobi: large rule stays sane") {
  const QuadratureRule rule = gauss_jacobi(512, -0.5, 0.5);
  double wsum = 0.0;
  for (double w : rule.weights) {
    CHECK(w > 0.0);
    wsum += w;
  }
  CHECK(wsum == doctest::Approx(beta_fn(0.5, 1.5)).epsilon(1e-12));
}
