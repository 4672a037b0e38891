"""Dormand-Prince 5(4) steps, classical and locally linearized, with dense output.

The locally linearized step splits the increment into the exact flow of the
linearized field (read off a matrix exponential of the augmented matrix) and a
Dormand-Prince approximation of the nonlinear remainder::

    y5 = y + u_s + h * sum_j b_j k_j
    y4 = y + u_s + h * sum_j bhat_j k_j
    k_j = f(t + c_j h, y + u_j + h sum_i a_ji k_i) - f(t, y) - f_x u_j - f_t c_j h

with ``k_1 = 0`` and ``u_j = L exp(D c_j h) r``.
"""
from dataclasses import dataclass
from fractions import Fraction as F
from typing import Optional

import numpy as np

from .errors import ComputationError, StepComputationError, UsageError
from .matexp import DEFAULT_ORDER, exp_chain, expm
from .problem import build_augmented, eval_f, eval_ft, eval_jacobian, extract_u

__all__ = [
    "LLDP45",
    "DP45",
    "METHODS",
    "EmbeddedTableau",
    "StepOutcome",
    "DenseInterpolant",
    "dp45_tableau",
    "lldp_step",
    "dp_step",
    "eval_dense",
]

LLDP45 = "lldp45"
DP45 = "dp45"
METHODS = (LLDP45, DP45)

# exact rational coefficients
A_EXACT = (
    (),
    (F(1, 5),),
    (F(3, 40), F(9, 40)),
    (F(44, 45), F(-56, 15), F(32, 9)),
    (F(19372, 6561), F(-25360, 2187), F(64448, 6561), F(-212, 729)),
    (F(9017, 3168), F(-355, 33), F(46732, 5247), F(49, 176), F(-5103, 18656)),
    (F(35, 384), F(0), F(500, 1113), F(125, 192), F(-2187, 6784), F(11, 84)),
)
B_EXACT = (F(35, 384), F(0), F(500, 1113), F(125, 192), F(-2187, 6784), F(11, 84), F(0))
BHAT_EXACT = (F(5179, 57600), F(0), F(7571, 16695), F(393, 640), F(-92097, 339200),
              F(187, 2100), F(1, 40))
C_EXACT = (F(0), F(1, 5), F(3, 10), F(4, 5), F(8, 9), F(1), F(1))
# ALPHA_EXACT[j][i-1] multiplies theta**i in b_j(theta)
ALPHA_EXACT = (
    (F(1), F(-183, 64), F(37, 12), F(-145, 128)),
    (F(0), F(0), F(0), F(0)),
    (F(0), F(1500, 371), F(-1000, 159), F(1000, 371)),
    (F(0), F(-125, 32), F(125, 12), F(-375, 64)),
    (F(0), F(9477, 3392), F(-729, 106), F(25515, 6784)),
    (F(0), F(-11, 7), F(11, 3), F(-55, 28)),
    (F(0), F(3, 2), F(-4), F(5, 2)),
)


@dataclass(frozen=True)
class EmbeddedTableau:
    """Butcher tableau of an embedded pair plus its dense-output polynomials.

    ``a`` is ``s x s`` strictly lower triangular, ``alpha`` is ``s x 4`` with
    ``b_j(theta) = sum_i alpha[j, i-1] theta**i``.
    """

    s: int
    a: np.ndarray
    b: np.ndarray
    b_hat: np.ndarray
    c: np.ndarray
    alpha: np.ndarray

    @property
    def e(self):
        """Weights of the error estimate ``y5 - y4``."""
        return self.b - self.b_hat

    def dense_weights(self, theta):
        powers = np.array([theta, theta ** 2, theta ** 3, theta ** 4])
        return self.alpha @ powers


def dp45_tableau():
    """The Dormand-Prince 5(4) coefficients as floating point arrays."""
    s = 7
    a = np.zeros((s, s))
    for j, row in enumerate(A_EXACT):
        a[j, :len(row)] = [float(x) for x in row]
    arrays = dict(
        a=a,
        b=np.array([float(x) for x in B_EXACT]),
        b_hat=np.array([float(x) for x in BHAT_EXACT]),
        c=np.array([float(x) for x in C_EXACT]),
        alpha=np.array([[float(x) for x in row] for row in ALPHA_EXACT]),
    )
    for arr in arrays.values():
        arr.setflags(write=False)
    return EmbeddedTableau(s=s, **arrays)


_TAB = dp45_tableau()
# E computed from the exact rationals rather than b - b_hat in floating point
_E = np.array([float(b - bh) for b, bh in zip(B_EXACT, BHAT_EXACT)])


@dataclass
class DenseInterpolant:
    """Continuous extension over one accepted step ``[t_n, t_n + h]``."""

    t_n: float
    h: float
    y_n: np.ndarray
    stages: np.ndarray
    method: str
    d_n: Optional[np.ndarray] = None
    order: object = DEFAULT_ORDER

    @property
    def t_end(self):
        return self.t_n + self.h

    def __call__(self, theta):
        return eval_dense(self, theta)


@dataclass
class StepOutcome:
    """Everything one embedded step produces.

    ``err_vec`` is ``y5 - y4``; ``fsal_f`` is ``f(t + h, y5)``, reusable as
    the first field evaluation of the next step.
    """

    y5: np.ndarray
    y4: np.ndarray
    stages: np.ndarray
    u_s: np.ndarray
    err_vec: np.ndarray
    fsal_f: np.ndarray
    dense: DenseInterpolant


def _check_step(p, y, h):
    y = np.asarray(y, dtype=float)
    if y.shape != (p.dimension,):
        raise UsageError(f"state has shape {y.shape}, expected ({p.dimension},)")
    if not h > 0:
        raise UsageError(f"step must be positive, got {h}")
    return y


def _stage_f(p, t, x, stats):
    try:
        return eval_f(p, t, x, stats)
    except ComputationError as exc:
        raise StepComputationError(str(exc)) from exc


def lldp_step(p, t, y, h, order=DEFAULT_ORDER, fsal_in=None, stats=None):
    """One step of the locally linearized Dormand-Prince pair.

    Costs one Jacobian, one exponential chain and six field evaluations
    (seven when ``fsal_in`` is not supplied).

    Raises
    ------
    StepComputationError
        If the exponential cannot be formed or a stage is not finite; the
        adaptive driver treats this as a rejected step.
    """
    y = _check_step(p, y, h)
    d = p.dimension
    fn = _stage_f(p, t, y, stats) if fsal_in is None else fsal_in
    try:
        jac = eval_jacobian(p, t, y)
        ft = None if p.autonomous else eval_ft(p, t, y, fn)
        aug = build_augmented(p, t, y, f=fn, jac=jac, ft=ft)
    except ComputationError as exc:
        raise StepComputationError(str(exc)) from exc
    if stats is not None:
        stats.jacobian_evals += 1
        stats.expm_evals += 1
    try:
        chain = exp_chain(aug.d_n, h, order)
    except ComputationError as exc:
        raise StepComputationError(f"matrix exponential failed at t={t!r}, h={h!r}: {exc}") from exc

    a, c = _TAB.a, _TAB.c
    k = np.zeros((7, d))
    u = None
    for j in range(1, 6):
        u = extract_u(chain[C_EXACT[j]], d)
        arg = y + u + h * (a[j, :j] @ k[:j])
        fj = _stage_f(p, t + c[j] * h, arg, stats)
        kj = fj - fn - jac @ u
        if ft is not None:
            kj -= ft * (c[j] * h)
        k[j] = kj
    # stage 7 sits at c = 1 with a_7 = b, so its argument is y5 itself
    u_s = u
    y5 = y + u_s + h * (_TAB.b[:6] @ k[:6])
    f7 = _stage_f(p, t + h, y5, stats)
    k7 = f7 - fn - jac @ u_s
    if ft is not None:
        k7 -= ft * h
    k[6] = k7
    y4 = y + u_s + h * (_TAB.b_hat @ k)
    err_vec = h * (_E @ k)
    dense = DenseInterpolant(t_n=t, h=h, y_n=y, stages=k, method=LLDP45,
                             d_n=aug.d_n, order=order)
    return StepOutcome(y5=y5, y4=y4, stages=k, u_s=u_s, err_vec=err_vec,
                       fsal_f=f7, dense=dense)


def dp_step(p, t, y, h, fsal_in=None, stats=None):
    """One step of the classical Dormand-Prince pair (six evaluations with FSAL)."""
    y = _check_step(p, y, h)
    d = p.dimension
    a, c = _TAB.a, _TAB.c
    k = np.empty((7, d))
    k[0] = _stage_f(p, t, y, stats) if fsal_in is None else fsal_in
    for j in range(1, 6):
        k[j] = _stage_f(p, t + c[j] * h, y + h * (a[j, :j] @ k[:j]), stats)
    y5 = y + h * (_TAB.b[:6] @ k[:6])
    k[6] = _stage_f(p, t + h, y5, stats)
    y4 = y + h * (_TAB.b_hat @ k)
    err_vec = h * (_E @ k)
    dense = DenseInterpolant(t_n=t, h=h, y_n=y, stages=k, method=DP45)
    return StepOutcome(y5=y5, y4=y4, stages=k, u_s=np.zeros(d), err_vec=err_vec,
                       fsal_f=k[6].copy(), dense=dense)


def eval_dense(di, theta, order=None, scheme="chain"):
    """Evaluate the continuous extension at ``t_n + theta h``.

    The locally linearized variant needs ``exp(D_n theta h)`` and computes it
    afresh on every call. ``scheme="chain"`` forms it exactly as the step
    formed ``M_1`` (Pade of ``D_n theta h / 90`` followed by the product
    chain), so ``theta = 1`` reproduces the step's own exponential bit for bit.
    ``scheme="direct"`` uses a single scaled Pade approximant of
    ``D_n theta h``; with the (3,3) default that is only accurate to about
    1e-8 relative.
    """
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise UsageError(f"theta must lie in [0, 1], got {theta}")
    if scheme not in ("chain", "direct"):
        raise UsageError(f"unknown dense scheme {scheme!r}")
    weights = _TAB.dense_weights(theta)
    incr = di.h * (weights @ di.stages)
    if di.method == DP45:
        return di.y_n + incr
    if theta == 0.0:
        return di.y_n + incr
    order = order or di.order
    if scheme == "chain":
        m = exp_chain(di.d_n, theta * di.h, order)[1]
    else:
        m, _ = expm(di.d_n, theta * di.h, order)
    return di.y_n + extract_u(m, di.y_n.size) + incr
