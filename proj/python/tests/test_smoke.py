"""Smoke tests for the python bindings; run with the build dir on argv[1]."""
import math
import sys

sys.path.insert(0, sys.argv[1] if len(sys.argv) > 1 else ".")

import _eqm1d as eqm  # noqa: E402


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(b))


assert close(eqm.gamma(0.5), math.sqrt(math.pi), 1e-13)
assert close(eqm.beta_moment(0.5, 0.5, 1.0), math.pi, 1e-12)

nodes, weights = eqm.gauss_jacobi(32, -0.5, -0.5)
assert close(sum(weights), math.pi, 1e-12)
assert all(0.0 < x < 1.0 for x in nodes)

assert close(eqm.riesz_eval(0.5, 0.25), 2.0, 1e-13)
v, d1, _ = eqm.dislocation_vreg(0.0)
assert close(v, 1.0 - math.log(2.0), 1e-13) and d1 == 0.0

assert close(eqm.hilbert_of_weight(0.5, 0.5, 0.25), math.pi * (0.25 - 0.5), 1e-12)

sol = eqm.solve(a=0.0, potential="zero", s1=0.0, s2=1.0, mode="fixed_interval", nodes=128)
assert close(sol.C, 2.0 * math.log(2.0), 1e-9)
assert close(sol.density(0.5), 2.0 / math.pi, 1e-9)
assert sol.diagnostics()["mass_error"] <= 1e-10

hco = eqm.solve(a=0.5, potential="affine", coefficients=[1.0], s1=0.0,
                mode="free_boundary", nodes=128)
ref = eqm.hco_pileup(0.5, 1.0)
assert close(hco.t2, ref["t2"], 1e-6)

carl = eqm.carleman_apply(0.5, lambda t: 1.0, lambda t: 0.0, 64)
assert carl["residual_sup"] <= 1e-8

particles = eqm.minimize_particles(32, a=0.0, potential="zero", s1=0.0, s2=1.0, seed=3)
assert particles["converged"]
assert all(b > a for a, b in zip(particles["positions"], particles["positions"][1:]))

print("python smoke tests passed")
