#!/usr/bin/env python3
"""Taming the Gibbs overshoot with piecewise moment functions.

Reconstructing a discontinuous density from global monomial moments rings
near the jump, like a truncated Fourier series.  Moment functions that
follow the monomials up to the jump and then flatten to a constant stop
being independent past the jump, so classical global independence
conditions exclude them; the interval-local certificates in this package
admit them, and the reconstruction they produce barely overshoots at all.

Solves the pulse problem both ways at n = 6 and writes one CSV per basis
(gibbs_monomial.csv, gibbs_piecewise.csv) for plotting with your tool of
choice.
"""

import os

import numpy as np

from entromin import (
    build_rule,
    builtin_entropy,
    gibbs_overshoot,
    instance_from_density,
    monomial_basis,
    piecewise_flat_basis,
    pulse_density,
    reconstruct,
    sample_solution,
    solve_dual,
)

N = 6
WINDOW = (0.4, 0.6)

pulse = pulse_density(0.5)
rule = build_rule((0.0, 1.0), (0.5,))
here = os.path.dirname(__file__) or "."
grid = np.linspace(0.0, 1.0, 1001)

for label, basis in (("monomial", monomial_basis(N)),
                     ("piecewise", piecewise_flat_basis(N, 0.5))):
    instance = instance_from_density(
        builtin_entropy("translated_boltzmann_shannon"), basis, rule, pulse
    )
    solution = solve_dual(instance)
    primal = reconstruct(instance, solution.multipliers)
    overshoot = gibbs_overshoot(primal, pulse, WINDOW)
    print(f"{label:10s} n={N}: iterations={solution.iterations:3d} "
          f"residual={solution.residual_inf:.2e} "
          f"overshoot on {WINDOW} = {overshoot:.6f}")
    out = os.path.join(here, f"gibbs_{label}.csv")
    np.savetxt(out, sample_solution(primal, grid), delimiter=",",
               header="s,x", comments="")
    print(f"           wrote {out}")

print("\nboth solves satisfy the same six moments; the piecewise family "
      "spends its freedom where the density actually varies")
