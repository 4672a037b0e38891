"""Initial value problems and the augmented matrix used by local linearization."""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ComputationError, UsageError

__all__ = [
    "OdeProblem",
    "AugmentedSystem",
    "eval_f",
    "eval_jacobian",
    "eval_ft",
    "build_augmented",
    "extract_u",
]

_SQRT_EPS = np.sqrt(np.finfo(float).eps)


@dataclass(frozen=True)
class OdeProblem:
    """``dx/dt = f(t, x)`` on ``[t0, T]`` with ``x(t0) = x0``.

    Parameters
    ----------
    f : callable
        Vector field ``f(t, x) -> ndarray`` of length ``dimension``.
    x0 : array_like
        Initial state.
    t0, T : float
        Integration interval, ``t0 < T``.
    jacobian : callable, optional
        ``jacobian(t, x) -> (d, d) ndarray``. Central finite differences are
        used when absent.
    f_t : callable, optional
        Partial time derivative ``f_t(t, x)``; only consulted for
        non-autonomous problems, forward differences when absent.
    autonomous : bool
        Whether ``f`` ignores ``t``. Autonomous problems get the smaller
        ``(d+1) x (d+1)`` augmented matrix.
    """

    f: Callable
    x0: np.ndarray
    t0: float
    T: float
    jacobian: Optional[Callable] = None
    f_t: Optional[Callable] = None
    autonomous: bool = True
    name: str = ""

    def __post_init__(self):
        x0 = np.array(self.x0, dtype=float).reshape(-1)
        if x0.size < 1:
            raise UsageError("initial state must have at least one component")
        if not np.all(np.isfinite(x0)):
            raise UsageError("initial state must be finite")
        if not float(self.t0) < float(self.T):
            raise UsageError(f"need t0 < T, got [{self.t0}, {self.T}]")
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "T", float(self.T))

    @property
    def dimension(self):
        return self.x0.size


@dataclass(frozen=True)
class AugmentedSystem:
    """Block matrix ``D_n`` whose exponential carries the linearized flow.

    Autonomous::

        [[f_x, f],
         [ 0,  0]]

    Non-autonomous::

        [[f_x, f_t, f],
         [ 0,   0,  1],
         [ 0,   0,  0]]
    """

    d_n: np.ndarray
    d: int

    @property
    def jacobian(self):
        return self.d_n[:self.d, :self.d]


def _check_state(p, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (p.dimension,):
        raise UsageError(f"state has shape {x.shape}, expected ({p.dimension},)")
    return x


def eval_f(p, t, x, stats=None):
    """Evaluate the vector field, counting the call in ``stats.f_evals``."""
    value = np.asarray(p.f(t, x), dtype=float)
    if stats is not None:
        stats.f_evals += 1
    if value.shape != (p.dimension,):
        raise UsageError(f"vector field returned shape {value.shape}, expected ({p.dimension},)")
    if not np.all(np.isfinite(value)):
        raise ComputationError(f"non-finite vector field at t={t!r}, x={np.asarray(x)!r}")
    return value


def eval_jacobian(p, t, x):
    """Jacobian ``f_x(t, x)``, analytic if available, else central differences.

    The finite-difference increment for component ``i`` is
    ``sqrt(eps) * max(|x_i|, 1)``.
    """
    x = _check_state(p, x)
    d = p.dimension
    if p.jacobian is not None:
        jac = np.array(p.jacobian(t, x), dtype=float)
        if jac.shape != (d, d):
            raise UsageError(f"jacobian returned shape {jac.shape}, expected ({d}, {d})")
    else:
        jac = np.empty((d, d))
        for i in range(d):
            step = _SQRT_EPS * max(abs(x[i]), 1.0)
            xp = x.copy()
            xm = x.copy()
            xp[i] += step
            xm[i] -= step
            jac[:, i] = (np.asarray(p.f(t, xp), dtype=float)
                         - np.asarray(p.f(t, xm), dtype=float)) / (xp[i] - xm[i])
    if not np.all(np.isfinite(jac)):
        raise ComputationError(f"non-finite Jacobian at t={t!r}, x={x!r}")
    return jac


def eval_ft(p, t, x, fx=None):
    """Partial time derivative of ``f``; zero for autonomous problems."""
    if p.autonomous:
        return np.zeros(p.dimension)
    if p.f_t is not None:
        value = np.asarray(p.f_t(t, x), dtype=float)
    else:
        if fx is None:
            fx = np.asarray(p.f(t, x), dtype=float)
        step = _SQRT_EPS * max(abs(t), 1.0)
        t1 = t + step
        value = (np.asarray(p.f(t1, x), dtype=float) - fx) / (t1 - t)
    if not np.all(np.isfinite(value)):
        raise ComputationError(f"non-finite time derivative at t={t!r}")
    return value


def build_augmented(p, t, y, f=None, jac=None, ft=None):
    """Assemble ``D_n`` at ``(t, y)``.

    Pre-evaluated ``f``, ``jac`` and ``ft`` are used as given, so a stepper
    that already holds ``f(t, y)`` does not pay for a second evaluation.
    """
    y = _check_state(p, y)
    d = p.dimension
    if f is None:
        f = eval_f(p, t, y)
    if jac is None:
        jac = eval_jacobian(p, t, y)
    if p.autonomous:
        m = np.zeros((d + 1, d + 1))
        m[:d, :d] = jac
        m[:d, d] = f
    else:
        if ft is None:
            ft = eval_ft(p, t, y, f)
        m = np.zeros((d + 2, d + 2))
        m[:d, :d] = jac
        m[:d, d] = ft
        m[:d, d + 1] = f
        m[d, d + 1] = 1.0
    return AugmentedSystem(d_n=m, d=d)


def extract_u(m, d):
    """``L m r``: the first ``d`` entries of the last column of ``m``."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < d + 1:
        raise UsageError(f"cannot extract a {d}-vector from a matrix of shape {m.shape}")
    return m[:d, -1].copy()
