"""The benchmark studies from Python rather than the ``bench`` command.

Simulation B runs both codes with the same tolerances; simulation C loosens the
linearized code's tolerances until its accuracy matches the classical code.
Equivalent command line::

    bench --sim B --problem stiffnolin --tol crude --format markdown --out table.md
"""
import sys

from lldp.bench import emit_report, simulation_b, simulation_c

rows = simulation_b("stiffnolin", "crude") + simulation_c("stiffnolin", "crude", scale=9.0)
for r in rows:
    print(f"{r.simulation} {r.method:7s} tol x{r.scale:<4g} steps {r.accepted_steps:4d} "
          f"RE {r.relative_error:.2e}")

if len(sys.argv) > 1:
    emit_report(rows, "markdown", sys.argv[1])
