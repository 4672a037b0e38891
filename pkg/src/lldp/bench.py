"""Benchmark harness comparing the locally linearized and the classical pair.

Four studies, each returning one :class:`SimulationReport` per method:

A. accuracy of the fifth-order formulas on the mesh the classical code picks,
B. both codes adaptive with identical tolerances,
C. the linearized code with tolerances scaled by a user factor,
D. accuracy of the dense output at ``refine`` points per step.

Command line::

    bench --sim B --problem all --tol crude --out table.csv
"""
import argparse
import csv
import dataclasses
import functools
import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from .adaptive import AdaptiveConfig, SolverStats, integrate, integrate_on_mesh
from .errors import IntegrationFailure, LLDPError, ReferenceFailure, StepComputationError, UsageError
from .matexp import DEFAULT_ORDER, PadeOrder
from .rk import DP45, LLDP45, METHODS
from .testset import PROBLEM_NAMES, NamedProblem, make_problem

__all__ = [
    "ToleranceSet",
    "TOLERANCES",
    "SimulationReport",
    "relative_error",
    "reference_disagreement",
    "reference_solution",
    "simulation_a",
    "simulation_b",
    "simulation_c",
    "simulation_d",
    "run_simulation",
    "emit_report",
    "parse_report",
    "main",
]

REFERENCE_RTOL = 1e-12
REFERENCE_ATOL = 1e-14
REFERENCE_PADE = PadeOrder(6, 6)
REFERENCE_GATE = 1e-7
ZERO_GUARD = 1e-12


@dataclass(frozen=True)
class ToleranceSet:
    label: str
    rtol: float
    atol: float

    def scaled(self, factor):
        return ToleranceSet(self.label, self.rtol * factor, self.atol * factor)


TOLERANCES = {
    "crude": ToleranceSet("crude", 1e-3, 1e-6),
    "mild": ToleranceSet("mild", 1e-6, 1e-9),
    "refined": ToleranceSet("refined", 1e-9, 1e-12),
}


@dataclass
class SimulationReport:
    """One row of a benchmark table.

    ``status`` is ``"ok"``, ``"failed"`` (the integration or the fixed-mesh
    evaluation broke down) or ``"reference-failed"``. ``time_ratio`` is the
    wall time relative to the classical code in the same study.
    """

    simulation: str
    problem: str
    method: str
    tolerance: str
    scale: float
    rtol: float
    atol: float
    accepted_steps: int
    failed_steps: int
    f_evals: int
    jacobian_evals: int
    expm_evals: int
    relative_error: float
    wall_time: float
    time_ratio: float
    dense_points: int
    status: str = "ok"


COLUMNS = tuple(f.name for f in dataclasses.fields(SimulationReport))


def _tolerance(tol):
    if isinstance(tol, ToleranceSet):
        return tol
    try:
        return TOLERANCES[tol]
    except KeyError:
        raise UsageError(f"unknown tolerance {tol!r}; expected crude, mild or refined") from None


def _named(problem):
    return problem if isinstance(problem, NamedProblem) else make_problem(problem)


def _complex_view(states):
    return states[:, 0::2] + 1j * states[:, 1::2]


def relative_error(reference, approx, complex_pairs=False):
    """``max |x - y| / |x|`` over all sampled times and components.

    Components with ``|x| < 1e-12`` are left out. With ``complex_pairs`` the
    columns are read as (real, imaginary) pairs and the quotient is taken on
    the complex values.
    """
    x = np.atleast_2d(np.asarray(reference, dtype=float))
    y = np.atleast_2d(np.asarray(approx, dtype=float))
    if x.size == 0:
        raise UsageError("relative error needs at least one sample")
    if x.shape != y.shape:
        raise UsageError(f"reference shape {x.shape} differs from approximation {y.shape}")
    if complex_pairs:
        x, y = _complex_view(x), _complex_view(y)
    mag = np.abs(x)
    keep = mag >= ZERO_GUARD
    if not np.any(keep):
        return 0.0
    return float(np.max(np.abs(x - y)[keep] / mag[keep]))


def reference_disagreement(a, b):
    """Largest difference between two reference samples, per component scale.

    Each component's difference is divided by that component's largest
    magnitude over the samples, so isolated zero crossings do not dominate.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    scale = np.maximum(np.abs(a).max(axis=0), ZERO_GUARD)
    return float(np.max(np.abs(a - b) / scale))


def _reference_runs(prob):
    paths = []
    for method, pade in ((LLDP45, REFERENCE_PADE), (DP45, DEFAULT_ORDER)):
        cfg = AdaptiveConfig(REFERENCE_RTOL, REFERENCE_ATOL, method=method, pade=pade)
        paths.append(integrate(prob, cfg))
    return tuple(paths)


@functools.lru_cache(maxsize=None)
def _reference_paths(name):
    return _reference_runs(make_problem(name).problem)


def reference_solution(name, mesh):
    """Reference states at ``mesh`` for problem ``name`` (or a ``NamedProblem``).

    Closed forms are used for ``perlin`` and ``stifflin``. Otherwise the
    problem is integrated at rtol 1e-12 by both codes (Pade (6,6) for the
    linearized one); their dense outputs must agree to 1e-7 of each
    component's scale, else :class:`ReferenceFailure` is raised.
    """
    # only catalogue problems requested by name share the cached runs
    cached = not isinstance(name, NamedProblem)
    named = _named(name)
    name = named.name
    mesh = np.atleast_1d(np.asarray(mesh, dtype=float))
    if named.analytic_reference is not None:
        return np.array([named.analytic_reference(t) for t in mesh])
    primary, check = _reference_paths(name) if cached else _reference_runs(named.problem)
    a = primary.sample(mesh)
    b = check.sample(mesh)
    gap = reference_disagreement(a, b)
    if not gap <= REFERENCE_GATE:
        raise ReferenceFailure(
            f"reference for {name} failed the cross-check: disagreement {gap:.3g} > {REFERENCE_GATE:g}")
    return a


def _report(sim, name, method, tol, scale, stats, re, dense_points=0, status="ok"):
    return SimulationReport(
        simulation=sim, problem=name, method=method, tolerance=tol.label, scale=float(scale),
        rtol=tol.rtol * (scale if method == LLDP45 else 1.0),
        atol=tol.atol * (scale if method == LLDP45 else 1.0),
        accepted_steps=stats.accepted_steps, failed_steps=stats.failed_steps,
        f_evals=stats.f_evals, jacobian_evals=stats.jacobian_evals,
        expm_evals=stats.expm_evals, relative_error=float(re), wall_time=stats.wall_time,
        time_ratio=float("nan"), dense_points=dense_points, status=status,
    )


def _finish(reports):
    dp = [r for r in reports if r.method == DP45]
    base = dp[0].wall_time if dp else float("nan")
    for r in reports:
        r.time_ratio = r.wall_time / base if base > 0 else float("nan")
    return sorted(reports, key=lambda r: (r.simulation, r.problem, r.method, r.tolerance))


def _mesh_error(key, complex_pairs, mesh, states):
    try:
        return relative_error(reference_solution(key, mesh), states, complex_pairs), "ok"
    except ReferenceFailure:
        return float("nan"), "reference-failed"


def _adaptive_row(sim, key, named, method, tol, scale, pade, h_max, refine=None):
    run_tol = tol.scaled(scale) if method == LLDP45 else tol
    cfg = AdaptiveConfig(run_tol.rtol, run_tol.atol, method=method, pade=pade, h_max=h_max)
    try:
        sol = integrate(named.problem, cfg)
    except IntegrationFailure:
        return _report(sim, named.name, method, tol, scale, SolverStats(), float("nan"),
                       status="failed")
    if refine is None:
        times, states = sol.mesh, sol.states
    else:
        times, states = _dense_samples(sol, refine)
    re, status = _mesh_error(key, named.complex_pairs, times, states)
    return _report(sim, named.name, method, tol, scale, sol.stats, re,
                   dense_points=len(times) if refine is not None else 0, status=status)


def _dense_samples(sol, refine):
    times = [sol.mesh[0]]
    states = [sol.states[0]]
    for di, t_next, y_next in zip(sol.interpolants, sol.mesh[1:], sol.states[1:]):
        for k in range(1, refine):
            theta = k / refine
            times.append(di.t_n + theta * di.h)
            states.append(di(theta))
        times.append(t_next)
        states.append(y_next)
    return np.array(times), np.array(states)


def _methods(methods):
    methods = tuple(methods)
    for m in methods:
        if m not in METHODS:
            raise UsageError(f"unknown method {m!r}")
    return methods


def simulation_a(name, tolerance="crude", pade=DEFAULT_ORDER, h_max=None, methods=METHODS):
    """Both fifth-order formulas over the mesh chosen by the adaptive classical code.

    A breakdown of the linearized formula part-way along the mesh yields a
    row with ``status="failed"`` and a NaN error.
    """
    methods = _methods(methods)
    tol = _tolerance(tolerance)
    key, named = name, _named(name)
    name = named.name
    cfg = AdaptiveConfig(tol.rtol, tol.atol, method=DP45, h_max=h_max)
    reports = []
    try:
        dp = integrate(named.problem, cfg)
    except IntegrationFailure:
        return _finish([_report("A", name, m, tol, 1.0, SolverStats(), float("nan"), status="failed")
                        for m in methods])
    if DP45 in methods:
        re, status = _mesh_error(key, named.complex_pairs, dp.mesh, dp.states)
        reports.append(_report("A", name, DP45, tol, 1.0, dp.stats, re, status=status))
    if LLDP45 in methods:
        stats = SolverStats()
        start = time.perf_counter()
        try:
            ll = integrate_on_mesh(named.problem, dp.mesh, LLDP45, pade, stats=stats)
        except StepComputationError:
            stats.wall_time = time.perf_counter() - start
            reports.append(_report("A", name, LLDP45, tol, 1.0, stats, float("nan"),
                                   status="failed"))
        else:
            re, status = _mesh_error(key, named.complex_pairs, ll.mesh, ll.states)
            reports.append(_report("A", name, LLDP45, tol, 1.0, ll.stats, re, status=status))
    return _finish(reports)


def simulation_b(name, tolerance="crude", pade=DEFAULT_ORDER, h_max=None, methods=METHODS):
    """Both codes adaptive, same tolerances, each on its own mesh."""
    return simulation_c(name, tolerance, 1.0, pade, h_max, methods, _sim="B")


def simulation_c(name, tolerance="crude", scale=1.0, pade=DEFAULT_ORDER, h_max=None,
                 methods=METHODS, _sim="C"):
    """Classical code at ``tolerance``, linearized code at ``scale`` times it."""
    if not scale > 0:
        raise UsageError(f"scale must be positive, got {scale}")
    methods = _methods(methods)
    tol = _tolerance(tolerance)
    named = _named(name)
    return _finish([_adaptive_row(_sim, name, named, m, tol, scale, pade, h_max) for m in methods])


def simulation_d(name, tolerance="crude", refine=4, pade=DEFAULT_ORDER, h_max=None,
                 methods=METHODS):
    """Relative error over mesh points plus ``refine - 1`` dense points per step."""
    if int(refine) != refine or refine < 1:
        raise UsageError(f"refine must be a positive integer, got {refine}")
    methods = _methods(methods)
    tol = _tolerance(tolerance)
    named = _named(name)
    return _finish([_adaptive_row("D", name, named, m, tol, 1.0, pade, h_max, refine=int(refine))
                    for m in methods])


def run_simulation(sim, name, tolerance="crude", scale=1.0, refine=4, pade=DEFAULT_ORDER,
                   h_max=None, methods=METHODS):
    """Dispatch on the simulation tag ``A``-``D``."""
    sim = sim.upper()
    if sim == "A":
        return simulation_a(name, tolerance, pade, h_max, methods)
    if sim == "B":
        return simulation_b(name, tolerance, pade, h_max, methods)
    if sim == "C":
        return simulation_c(name, tolerance, scale, pade, h_max, methods)
    if sim == "D":
        return simulation_d(name, tolerance, refine, pade, h_max, methods)
    raise UsageError(f"unknown simulation {sim!r}; expected A, B, C or D")


# --- report serialization ------------------------------------------------------

_INT_FIELDS = {f.name for f in dataclasses.fields(SimulationReport) if f.type in (int, "int")}
_FLOAT_FIELDS = {f.name for f in dataclasses.fields(SimulationReport) if f.type in (float, "float")}


def _format(name, value):
    if name in _FLOAT_FIELDS:
        return f"{value:.10e}"
    return str(value)


def _rows(reports, timing):
    for r in reports:
        values = dataclasses.asdict(r)
        if not timing:
            values["wall_time"] = 0.0
            values["time_ratio"] = 0.0
        yield [_format(c, values[c]) for c in COLUMNS]


def emit_report(reports, fmt="csv", out=None, timing=True):
    """Write reports as CSV or a Markdown table, one row per report.

    Floats are written in scientific notation with 11 significant digits.
    ``timing=False`` zeroes the wall-clock columns so repeated runs produce
    identical bytes.
    """
    if fmt not in ("csv", "markdown"):
        raise UsageError(f"unknown report format {fmt!r}")
    try:
        fh = open(out, "w", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write report to {out!r}: {exc}") from exc
    with fh:
        if fmt == "csv":
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(COLUMNS)
            writer.writerows(_rows(reports, timing))
        else:
            fh.write("| " + " | ".join(COLUMNS) + " |\n")
            fh.write("|" + "---|" * len(COLUMNS) + "\n")
            for row in _rows(reports, timing):
                fh.write("| " + " | ".join(row) + " |\n")


def parse_report(path):
    """Read a CSV written by :func:`emit_report` back into reports."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        reports = []
        for row in reader:
            values = {}
            for c in COLUMNS:
                raw = row[c]
                if c in _INT_FIELDS:
                    values[c] = int(raw)
                elif c in _FLOAT_FIELDS:
                    values[c] = float(raw)
                else:
                    values[c] = raw
            reports.append(SimulationReport(**values))
    return reports


# --- command line --------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser():
    parser = _Parser(prog="bench", description="Compare LLDP45 with the classical Dormand-Prince code.")
    parser.add_argument("--sim", required=True, type=str.upper, choices=["A", "B", "C", "D"])
    parser.add_argument("--problem", required=True, choices=list(PROBLEM_NAMES) + ["all"])
    parser.add_argument("--tol", required=True, choices=list(TOLERANCES))
    parser.add_argument("--scale", type=float, default=1.0,
                        help="tolerance factor for lldp45 in simulation C")
    parser.add_argument("--refine", type=int, default=4,
                        help="dense points per step in simulation D")
    parser.add_argument("--method", choices=["lldp45", "dp45", "both"], default="both")
    parser.add_argument("--pade", type=int, nargs=2, metavar=("P", "Q"), default=(3, 3))
    parser.add_argument("--hmax", type=float, default=None)
    parser.add_argument("--format", dest="fmt", choices=["csv", "markdown"], default="csv")
    parser.add_argument("--out", required=True)
    parser.add_argument("--no-timing", action="store_true",
                        help="write zero wall times so the output is reproducible byte for byte")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    methods = METHODS if args.method == "both" else (args.method,)
    names = PROBLEM_NAMES if args.problem == "all" else (args.problem,)
    try:
        pade = PadeOrder(*args.pade)
        if args.scale <= 0 or args.refine < 1:
            raise UsageError("--scale must be positive and --refine at least 1")
        if args.hmax is not None and not (args.hmax > 0 and math.isfinite(args.hmax)):
            raise UsageError("--hmax must be a positive number")
        reports = []
        for name in names:
            reports.extend(run_simulation(args.sim, name, args.tol, args.scale, args.refine,
                                          pade, args.hmax, methods))
        emit_report(reports, args.fmt, args.out, timing=not args.no_timing)
    except UsageError as exc:
        print(f"bench: error: {exc}", file=sys.stderr)
        return 1
    except LLDPError as exc:
        print(f"bench: failure: {exc}", file=sys.stderr)
        return 2
    bad = [r for r in reports if r.status != "ok"]
    for r in bad:
        print(f"bench: {r.simulation} {r.problem} {r.method} {r.tolerance}: {r.status}",
              file=sys.stderr)
    return 2 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
