"""Adaptive integration with a classical accept/reject step-size controller.

The same driver runs both the locally linearized (``lldp45``) and the
classical (``dp45``) pair; only the step function differs.
"""
import bisect
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import IntegrationFailure, StepComputationError, UsageError
from .matexp import DEFAULT_ORDER, PadeOrder
from .problem import eval_f
from .rk import DP45, LLDP45, METHODS, DenseInterpolant, dp_step, eval_dense, lldp_step

__all__ = [
    "AdaptiveConfig",
    "SolverStats",
    "SolutionPath",
    "initial_step",
    "error_norm",
    "next_step",
    "integrate",
    "integrate_on_mesh",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class AdaptiveConfig:
    """Tolerances and step bounds for :func:`integrate`.

    ``h_max`` and ``h_min`` default to ``(T - t0) / 10`` and
    ``16 eps max(|t0|, |T|)`` once a problem is known; see :meth:`bounds`.
    """

    rtol: float = 1e-3
    atol: float = 1e-6
    method: str = LLDP45
    pade: PadeOrder = DEFAULT_ORDER
    h_max: Optional[float] = None
    h_min: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.rtol < 1.0:
            raise UsageError(f"rtol must lie in (0, 1), got {self.rtol}")
        if not self.atol > 0.0:
            raise UsageError(f"atol must be positive, got {self.atol}")
        if self.method not in METHODS:
            raise UsageError(f"unknown method {self.method!r}")
        if self.h_max is not None and self.h_min is not None and not self.h_min < self.h_max:
            raise UsageError("need h_min < h_max")

    @property
    def tr(self):
        """Threshold ``atol / rtol`` below which the error is measured absolutely."""
        return self.atol / self.rtol

    def bounds(self, problem):
        """``(h_min, h_max)`` for ``problem``, filling in the defaults."""
        h_max = self.h_max if self.h_max is not None else (problem.T - problem.t0) / 10.0
        h_min = (self.h_min if self.h_min is not None
                 else 16.0 * _EPS * max(abs(problem.t0), abs(problem.T)))
        if not h_min < h_max:
            raise UsageError(f"need h_min < h_max, got {h_min} and {h_max}")
        return h_min, h_max


@dataclass
class SolverStats:
    accepted_steps: int = 0
    failed_steps: int = 0
    f_evals: int = 0
    jacobian_evals: int = 0
    expm_evals: int = 0
    wall_time: float = 0.0


@dataclass
class SolutionPath:
    """Accepted mesh, states and one dense interpolant per interval."""

    mesh: np.ndarray
    states: np.ndarray
    interpolants: List[DenseInterpolant] = field(repr=False)
    stats: SolverStats
    method: str

    @property
    def t(self):
        return self.mesh

    @property
    def y(self):
        return self.states

    def __call__(self, t):
        """Dense solution at the scalar time ``t``."""
        t = float(t)
        if not self.mesh[0] <= t <= self.mesh[-1]:
            raise UsageError(f"t={t} outside [{self.mesh[0]}, {self.mesh[-1]}]")
        n = bisect.bisect_right(self.mesh, t) - 1
        if n >= len(self.interpolants):
            return self.states[-1].copy()
        if t == self.mesh[n]:
            return self.states[n].copy()
        di = self.interpolants[n]
        return eval_dense(di, min(1.0, (t - di.t_n) / di.h))

    def sample(self, times):
        return np.array([self(t) for t in times])


def initial_step(p, cfg, f0=None):
    """First step size from the scaled slope at ``x0``."""
    h_min, h_max = cfg.bounds(p)
    if f0 is None:
        f0 = eval_f(p, p.t0, p.x0)
    rh = np.max(np.abs(f0) / np.maximum(np.abs(p.x0), cfg.tr)) / (0.8 * cfg.rtol ** 0.2)
    delta = 1.0 / rh if h_max * rh > 1.0 else h_max
    return min(h_max, max(h_min, delta))


def error_norm(y_prev, y5, err_vec, cfg):
    """``|| err_vec / max(|y_prev|, |y5|, tr) ||_inf``."""
    scale = np.maximum(np.maximum(np.abs(y_prev), np.abs(y5)), cfg.tr)
    return float(np.max(np.abs(err_vec) / scale))


def next_step(h, error, fail, cfg, h_bounds=None):
    """Proposed step after an attempt with scaled ``error``.

    Growth ``0.8 (rtol/error)^(1/5) h`` on success, the same factor floored
    at 0.1 on a first failure, and halving on a repeated failure. ``h_bounds``
    is ``(h_min, h_max)``; without it ``cfg.h_min``/``cfg.h_max`` must be set.
    """
    h_min, h_max = h_bounds if h_bounds is not None else (cfg.h_min, cfg.h_max)
    if error <= cfg.rtol:
        delta = h_max if error == 0.0 else 0.8 * (cfg.rtol / error) ** 0.2 * h
    elif not fail:
        delta = max(0.1, 0.8 * (cfg.rtol / error) ** 0.2) * h
    else:
        delta = 0.5 * h
    return min(h_max, max(h_min, delta))


def _stepper(cfg):
    if cfg.method == LLDP45:
        pade = cfg.pade

        def step(p, t, y, h, fsal, stats):
            return lldp_step(p, t, y, h, pade, fsal_in=fsal, stats=stats)
    else:
        def step(p, t, y, h, fsal, stats):
            return dp_step(p, t, y, h, fsal_in=fsal, stats=stats)
    return step


def integrate(p, cfg):
    """Integrate ``p`` over ``[t0, T]`` with error control.

    Raises
    ------
    IntegrationFailure
        When a step is rejected while already at ``h_min``.
    """
    start = time.perf_counter()
    h_min, h_max = cfg.bounds(p)
    bounds = (h_min, h_max)
    step = _stepper(cfg)
    stats = SolverStats()

    t, T = p.t0, p.T
    y = p.x0.copy()
    f_n = eval_f(p, t, y, stats)
    h = initial_step(p, cfg, f_n)
    mesh, states, dense = [t], [y], []
    fail = False
    # a remainder below h_min is absorbed into the last step instead of
    # becoming a spurious extra step
    reaches_end = t + h >= T - h_min
    if reaches_end:
        h = T - t

    while True:
        try:
            out = step(p, t, y, h, f_n, stats)
            error = error_norm(y, out.y5, out.err_vec, cfg)
            if not np.isfinite(error):
                error = np.inf
        except StepComputationError:
            out, error = None, np.inf
        h_new = next_step(h, error, fail, cfg, bounds)

        if error <= cfg.rtol:
            stats.accepted_steps += 1
            t = T if reaches_end else t + h
            y = out.y5
            f_n = out.fsal_f
            mesh.append(t)
            states.append(y)
            dense.append(out.dense)
            if reaches_end:
                break
            reaches_end = t + h_new >= T - h_min
            if reaches_end:
                h_new = T - t
            fail = False
        else:
            stats.failed_steps += 1
            if h <= h_min:
                stats.wall_time = time.perf_counter() - start
                raise IntegrationFailure(
                    f"step size fell to h_min={h_min:g} at t={t!r} (error {error:g})",
                    t=t, error=error)
            fail = True
            reaches_end = False
        h = h_new

    stats.wall_time = time.perf_counter() - start
    return SolutionPath(mesh=np.array(mesh), states=np.array(states), interpolants=dense,
                        stats=stats, method=cfg.method)


def integrate_on_mesh(p, mesh, method=LLDP45, pade=DEFAULT_ORDER, use="y5", stats=None):
    """Step the chosen formula across a prescribed mesh, without error control.

    ``use`` selects which member of the embedded pair is propagated. Step
    failures propagate as :class:`StepComputationError`; pass your own
    ``stats`` to keep the counts accumulated before the failure.
    """
    if method not in METHODS:
        raise UsageError(f"unknown method {method!r}")
    if use not in ("y5", "y4"):
        raise UsageError(f"use must be 'y5' or 'y4', got {use!r}")
    mesh = np.asarray(mesh, dtype=float)
    if mesh.ndim != 1 or mesh.size < 2 or np.any(np.diff(mesh) <= 0):
        raise UsageError("mesh must be strictly increasing with at least two points")
    start = time.perf_counter()
    stats = SolverStats() if stats is None else stats
    y = p.x0.copy()
    f_n = eval_f(p, mesh[0], y, stats)
    states, dense = [y], []
    for t0, t1 in zip(mesh[:-1], mesh[1:]):
        h = t1 - t0
        if method == LLDP45:
            out = lldp_step(p, t0, y, h, pade, fsal_in=f_n, stats=stats)
        else:
            out = dp_step(p, t0, y, h, fsal_in=f_n, stats=stats)
        if use == "y5":
            y, f_n = out.y5, out.fsal_f
        else:
            y, f_n = out.y4, None
        stats.accepted_steps += 1
        states.append(y)
        dense.append(out.dense)
    stats.wall_time = time.perf_counter() - start
    return SolutionPath(mesh=mesh.copy(), states=np.array(states), interpolants=dense,
                        stats=stats, method=method)
