#include "eqm/reference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "eqm/specfun.hpp"

namespace eqm {

double head_louat_interval(double t) {
  if (!(t > 0.0) || !(t < 1.0))
    throw std::domain_error("head_louat_interval: t must lie in (0,1)");
  return 1.0 / (M_PI * std::sqrt(t * (1.0 - t)));
}

double head_louat_halfline(double t) {
  if (!(t > 0.0) || !(t < 2.0))
    throw std::domain_error("head_louat_halfline: t must lie in (0,2)");
  return std::sqrt((2.0 - t) / t) / M_PI;
}

RieszNoField riesz_no_field(double a, double t) {
  if (!(a > 0.0) || !(a < 1.0)) throw std::domain_error("riesz_no_field: a must be in (0,1)");
  if (!(t > 0.0) || !(t < 1.0)) throw std::domain_error("riesz_no_field: t must lie in (0,1)");
  const double gh = gamma_fn(0.5 * (1.0 + a));
  RieszNoField out;
  out.density = a * gamma_fn(a) / (gh * gh) * std::pow(t * (1.0 - t), -0.5 * (1.0 - a));
  out.constant_C = a * M_PI * gamma_fn(a) / (gh * gh * std::cos(0.5 * a * M_PI));
  return out;
}

ClosedFormCase head_louat_interval_case() {
  ClosedFormCase c;
  c.name = "head-louat-interval";
  c.a = 0.0;
  c.potential_description = "U = 0 on [0,1]";
  c.t1 = 0.0;
  c.t2 = 1.0;
  c.density = [](double t) { return head_louat_interval(t); };
  c.constant_C = 2.0 * std::log(2.0);
  c.kernel = make_kernel(0.0);
  c.potential = PotentialSpec::zero().with_barriers(0.0, 1.0);
  return c;
}

ClosedFormCase head_louat_halfline_case() {
  ClosedFormCase c;
  c.name = "head-louat-halfline";
  c.a = 0.0;
  c.potential_description = "U(t) = t on [0, inf)";
  c.t1 = 0.0;
  c.t2 = 2.0;
  c.density = [](double t) { return head_louat_halfline(t); };
  c.constant_C = 1.0 + std::log(2.0);
  c.kernel = make_kernel(0.0);
  c.potential = PotentialSpec::affine(1.0).with_barriers(0.0,
                                                         std::numeric_limits<double>::infinity());
  return c;
}

ClosedFormCase riesz_no_field_case(double a) {
  ClosedFormCase c;
  c.name = "riesz-no-field";
  c.a = a;
  c.potential_description = "U = 0 on [0,1]";
  c.t1 = 0.0;
  c.t2 = 1.0;
  c.density = [a](double t) { return riesz_no_field(a, t).density; };
  c.constant_C = riesz_no_field(a, 0.5).constant_C;
  c.kernel = make_kernel(a);
  c.potential = PotentialSpec::zero().with_barriers(0.0, 1.0);
  return c;
}

ClosedFormCase hco_pileup(double a, double gamma) {
  if (!(a > 0.0) || !(a < 1.0)) throw std::domain_error("hco_pileup: a must be in (0,1)");
  if (!(gamma > 0.0)) throw std::domain_error("hco_pileup: gamma must be positive");
  const double gh = gamma_fn(0.5 * (1.0 + a));
  const double c2 = std::cos(0.5 * a * M_PI);
  const double t2 =
      std::pow(gamma * c2 * gh * gh / (2.0 * M_PI * a * a * gamma_fn(a)), -1.0 / (1.0 + a));

  ClosedFormCase c;
  c.name = "hco-pileup";
  c.a = a;
  c.potential_description = "U(t) = gamma t on [0, inf)";
  c.t1 = 0.0;
  c.t2 = t2;
  c.constant_C = 0.5 * (1.0 + a) * gamma * t2 / a;
  c.density = [a, gamma, c2, t2](double t) {
    if (!(t > 0.0) || !(t < t2)) throw std::domain_error("hco_pileup density: t outside (0, t2)");
    return gamma * c2 / (M_PI * a) * std::pow(t2 - t, 0.5 * (1.0 + a)) *
           std::pow(t, -0.5 * (1.0 - a));
  };
  c.kernel = make_kernel(a);
  c.potential =
      PotentialSpec::affine(gamma).with_barriers(0.0, std::numeric_limits<double>::infinity());
  return c;
}

}  // namespace eqm
