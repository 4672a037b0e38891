"""Adaptive integration of the Van der Pol oscillator in both regimes.

Prints the step statistics of each code. The linearized code pays one Jacobian
and one matrix exponential per attempted step but takes far fewer steps once
the problem becomes stiff.
"""
from lldp import DP45, LLDP45, AdaptiveConfig, integrate, make_problem

for name in ("vdp1", "vdp100"):
    problem = make_problem(name).problem
    print(f"{name} on [{problem.t0:g}, {problem.T:g}]")
    for method in (DP45, LLDP45):
        sol = integrate(problem, AdaptiveConfig(rtol=1e-3, atol=1e-6, method=method))
        s = sol.stats
        print(f"  {method:7s} accepted {s.accepted_steps:6d}  failed {s.failed_steps:4d}  "
              f"f {s.f_evals:7d}  exp {s.expm_evals:5d}  {s.wall_time:.2f} s")
