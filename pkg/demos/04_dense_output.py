"""Dense output: evaluating the solution between accepted mesh points.

The Brusselator is integrated at crude tolerance and sampled on a fine grid;
the error is measured against a tight-tolerance run.
"""
import numpy as np

from lldp import DP45, LLDP45, AdaptiveConfig, PadeOrder, integrate, make_problem

problem = make_problem("bruss").problem
reference = integrate(problem, AdaptiveConfig(1e-12, 1e-14, pade=PadeOrder(6, 6)))
grid = np.linspace(problem.t0, problem.T, 2001)
exact = reference.sample(grid)

for method in (DP45, LLDP45):
    sol = integrate(problem, AdaptiveConfig(1e-3, 1e-6, method=method))
    dense = sol.sample(grid)
    print(f"{method:7s} {sol.stats.accepted_steps:4d} steps, "
          f"max dense error on {grid.size} points: {np.max(np.abs(dense - exact)):.2e}")
