#pragma once

#include <functional>
#include <string>

#include "eqm/kernels.hpp"

namespace eqm {

/// Closed-form equilibrium density used as a regression oracle.
struct ClosedFormCase {
  std::string name;
  double a = 0.0;
  std::string potential_description;
  double t1 = 0.0, t2 = 1.0;
  std::function<double(double)> density;
  double constant_C = 0.0;
  KernelSpec kernel;
  PotentialSpec potential;
};

/// a = 0, no field, support [0,1]: 1 / (pi sqrt(t (1-t))).
double head_louat_interval(double t);

/// a = 0, U(t) = t on [0, inf): support [0,2], (1/pi) sqrt((2-t)/t).
double head_louat_halfline(double t);

/// a in (0,1), no field on [0,1]:
///   rho(t)  = a Gamma(a) / Gamma((1+a)/2)^2 * [t(1-t)]^{-(1-a)/2}
///   C       = a pi Gamma(a) / (Gamma((1+a)/2)^2 cos(a pi/2)).
struct RieszNoField {
  double density = 0.0;
  double constant_C = 0.0;
};
RieszNoField riesz_no_field(double a, double t);

/// a in (0,1), U(t) = gamma t on [0, inf): the linear-field pile-up with
///   t2  = [gamma cos(a pi/2) Gamma((1+a)/2)^2 / (2 pi a^2 Gamma(a))]^{-1/(1+a)}
///   rho = gamma cos(a pi/2)/(pi a) (t2-t)^{(1+a)/2} t^{-(1-a)/2}
///   C   = (1+a) gamma t2 / (2a).
ClosedFormCase hco_pileup(double a, double gamma);

ClosedFormCase head_louat_interval_case();
ClosedFormCase head_louat_halfline_case();
ClosedFormCase riesz_no_field_case(double a);

}  // namespace eqm
