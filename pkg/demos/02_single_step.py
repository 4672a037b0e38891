"""One locally linearized step next to one classical step.

On a linear problem the linearized step is exact up to the exponential, and
every stage of the nonlinear remainder vanishes. On a stiff scalar problem
with a large step the classical step explodes while the linearized one decays.
"""
import numpy as np

from lldp import OdeProblem, dp_step, lldp_step, make_problem

stiff = make_problem("stifflin")
out = lldp_step(stiff.problem, 0.0, stiff.problem.x0, 0.05)
print("stifflin, one step of 0.05")
print("  largest stage      ", np.max(np.abs(out.stages)))
print("  error vs closed form", np.max(np.abs(out.y5 - stiff.analytic_reference(0.05))))

for lam in (-1e2, -1e4):
    p = OdeProblem(lambda t, x, lam=lam: lam * x, [1.0], 0.0, 1.0,
                   jacobian=lambda t, x, lam=lam: [[lam]])
    ll = lldp_step(p, 0.0, p.x0, 1.0).y5[0]
    with np.errstate(over="ignore"):
        dp = dp_step(p, 0.0, p.x0, 1.0).y5[0]
    print(f"\nx' = {lam:g} x, h = 1: lldp45 -> {ll:.3e}, dp45 -> {dp:.3e}")
