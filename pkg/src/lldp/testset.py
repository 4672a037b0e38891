"""The ten benchmark problems: two periodic and two stiff semilinear systems,
Fermi-Pasta-Ulam, Brusselator, rigid body, a chemical reaction and Van der Pol
in a non-stiff and a mildly stiff regime.

Complex problems (``perlin``, ``pernolin``) are realified: the complex state
``(z1, z2)`` becomes ``(Re z1, Im z1, Re z2, Im z2)``.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import UsageError
from .matexp import PadeOrder, expm
from .problem import OdeProblem

__all__ = [
    "PROBLEM_NAMES",
    "NamedProblem",
    "make_problem",
    "hilbert",
    "analytic_reference",
    "fpu_hamiltonian",
]

PROBLEM_NAMES = ("perlin", "pernolin", "stifflin", "stiffnolin", "fpu",
                 "bruss", "rigid", "chm", "vdp1", "vdp100")

FPU_OMEGA = 50.0


@dataclass(frozen=True)
class NamedProblem:
    """A benchmark problem with its optional closed-form solution.

    ``complex_pairs`` marks realified complex systems: consecutive component
    pairs are the real and imaginary parts of one complex unknown.
    """

    name: str
    problem: OdeProblem
    analytic_reference: Optional[Callable] = None
    complex_pairs: bool = False


def hilbert(n):
    """``H[i, j] = 1 / (i + j - 1)`` with 1-based indices."""
    if n < 1:
        raise UsageError(f"Hilbert matrix order must be positive, got {n}")
    i = np.arange(1, n + 1)
    return 1.0 / (i[:, None] + i[None, :] - 1.0)


# --- periodic: dz/dt = A (z + 2) [+ 0.1 z^2], A = diag(i, -i) -----------------

_ROT = np.array([[0.0, -1.0], [1.0, 0.0]])  # multiplication by i
_PER_A = np.zeros((4, 4))
_PER_A[:2, :2] = _ROT
_PER_A[2:, 2:] = -_ROT
_PER_SHIFT = np.array([2.0, 0.0, 2.0, 0.0])


def _perlin_f(t, x):
    return _PER_A @ (x + _PER_SHIFT)


def _perlin_jac(t, x):
    return _PER_A.copy()


def _pernolin_f(t, x):
    u, v = x[0::2], x[1::2]
    sq = np.empty(4)
    sq[0::2] = u * u - v * v
    sq[1::2] = 2.0 * u * v
    return _PER_A @ (x + _PER_SHIFT) + 0.1 * sq


def _pernolin_jac(t, x):
    jac = _PER_A.copy()
    for k in (0, 2):
        u, v = x[k], x[k + 1]
        # derivative of 0.1 z^2 is 0.2 z, i.e. [[Re, -Im], [Im, Re]]
        jac[k:k + 2, k:k + 2] += 0.2 * np.array([[u, -v], [v, u]])
    return jac


def _perlin_exact(x0):
    z0 = x0[0::2] + 1j * x0[1::2]
    lam = np.array([1j, -1j])

    def exact(t):
        z = -2.0 + np.exp(lam * t) * (z0 + 2.0)
        out = np.empty(4)
        out[0::2] = z.real
        out[1::2] = z.imag
        return out

    return exact


# --- stiff: Hilbert matrix of order 12 ----------------------------------------

_H12 = hilbert(12)
_H12.setflags(write=False)


def _stifflin_f(t, x):
    return -100.0 * (_H12 @ (x + 1.0))


def _stifflin_jac(t, x):
    return -100.0 * _H12


def _stifflin_exact(x0):
    shifted = x0 + 1.0
    order = PadeOrder(6, 6)

    def exact(t):
        m, _ = expm(-100.0 * _H12, t, order)
        return -1.0 + m @ shifted

    return exact


def _stiffnolin_f(t, x):
    return 100.0 * (_H12 @ (x - 1.0)) + 100.0 * (x - 1.0) ** 2 - 60.0 * (x ** 3 - 1.0)


def _stiffnolin_jac(t, x):
    return 100.0 * _H12 + np.diag(200.0 * (x - 1.0) - 180.0 * x * x)


# --- Fermi-Pasta-Ulam, state (p1..p6, q1..q6), fixed ends q0 = q7 = 0 ---------

def _fpu_grad_v(q, w):
    grad = np.zeros(6)
    # stiff springs between q_{2i-1} and q_{2i}
    stretch = q[1::2] - q[0::2]
    grad[1::2] += 0.5 * w * w * stretch
    grad[0::2] -= 0.5 * w * w * stretch
    # soft quartic springs between q_{2i} and q_{2i+1}, i = 0..3
    qe = np.concatenate(([0.0], q, [0.0]))
    soft = qe[1::2] - qe[0::2]  # q1-q0, q3-q2, q5-q4, q7-q6
    cube = 4.0 * soft ** 3
    gext = np.zeros(8)
    gext[1::2] += cube
    gext[0::2] -= cube
    grad += gext[1:7]
    return grad


def _fpu_hess_v(q, w):
    hess = np.zeros((6, 6))
    block = np.array([[1.0, -1.0], [-1.0, 1.0]])
    for i in range(3):
        hess[2 * i:2 * i + 2, 2 * i:2 * i + 2] += 0.5 * w * w * block
    qe = np.concatenate(([0.0], q, [0.0]))
    hext = np.zeros((8, 8))
    for i in range(4):
        lo, hi = 2 * i, 2 * i + 1
        hext[lo:hi + 1, lo:hi + 1] += 12.0 * (qe[hi] - qe[lo]) ** 2 * block
    hess += hext[1:7, 1:7]
    return hess


def _fpu_f(t, x):
    p, q = x[:6], x[6:]
    return np.concatenate((-_fpu_grad_v(q, FPU_OMEGA), p))


def _fpu_jac(t, x):
    jac = np.zeros((12, 12))
    jac[:6, 6:] = -_fpu_hess_v(x[6:], FPU_OMEGA)
    jac[6:, :6] = np.eye(6)
    return jac


def fpu_hamiltonian(x, w=FPU_OMEGA):
    """Total energy of the Fermi-Pasta-Ulam chain at state ``(p, q)``."""
    x = np.asarray(x, dtype=float)
    p, q = x[:6], x[6:]
    qe = np.concatenate(([0.0], q, [0.0]))
    kinetic = 0.5 * np.sum(p * p)
    stiff = 0.25 * w * w * np.sum((q[1::2] - q[0::2]) ** 2)
    soft = np.sum((qe[1::2] - qe[0::2]) ** 4)
    return kinetic + stiff + soft


# --- small nonlinear systems --------------------------------------------------

def _bruss_f(t, x):
    x1, x2 = x
    return np.array([1.0 + x1 * x1 * x2 - 4.0 * x1, 3.0 * x1 - x1 * x1 * x2])


def _bruss_jac(t, x):
    x1, x2 = x
    return np.array([[2.0 * x1 * x2 - 4.0, x1 * x1],
                     [3.0 - 2.0 * x1 * x2, -x1 * x1]])


def _rigid_f(t, x):
    x1, x2, x3 = x
    return np.array([x2 * x3, -x1 * x3, -0.51 * x1 * x2])


def _rigid_jac(t, x):
    x1, x2, x3 = x
    return np.array([[0.0, x3, x2],
                     [-x3, 0.0, -x1],
                     [-0.51 * x2, -0.51 * x1, 0.0]])


def _chm_k(x1):
    return np.exp(20.7 - 1500.0 / x1)


def _chm_f(t, x):
    x1, x2, x3, x4 = x
    k = _chm_k(x1)
    return np.array([
        1.3 * (x3 - x1) + 10400.0 * k * x2,
        1880.0 * (x4 - x2 * (1.0 + k)),
        1752.0 - 269.0 * x3 + 267.0 * x1,
        0.1 + 320.0 * x2 - 321.0 * x4,
    ])


def _chm_jac(t, x):
    x1, x2, x3, x4 = x
    k = _chm_k(x1)
    dk = k * 1500.0 / (x1 * x1)
    return np.array([
        [-1.3 + 10400.0 * dk * x2, 10400.0 * k, 1.3, 0.0],
        [-1880.0 * x2 * dk, -1880.0 * (1.0 + k), 0.0, 1880.0],
        [267.0, 0.0, -269.0, 0.0],
        [0.0, 320.0, 0.0, -321.0],
    ])


def _vdp(eps):
    def f(t, x):
        x1, x2 = x
        return np.array([x2, eps * (1.0 - x1 * x1) * x2 - x1])

    def jac(t, x):
        x1, x2 = x
        return np.array([[0.0, 1.0],
                         [-2.0 * eps * x1 * x2 - 1.0, eps * (1.0 - x1 * x1)]])

    return f, jac


def make_problem(name):
    """Build one of the benchmark problems by name (see ``PROBLEM_NAMES``)."""
    if name == "perlin":
        x0 = np.array([-2.5, 0.0, -1.5, 0.0])
        prob = OdeProblem(_perlin_f, x0, 0.0, 4.0 * np.pi, jacobian=_perlin_jac, name=name)
        return NamedProblem(name, prob, _perlin_exact(prob.x0), complex_pairs=True)
    if name == "pernolin":
        x0 = np.array([1.0, 0.0, 1.0, 0.0])
        prob = OdeProblem(_pernolin_f, x0, 0.0, 4.0 * np.pi, jacobian=_pernolin_jac, name=name)
        return NamedProblem(name, prob, complex_pairs=True)
    if name == "stifflin":
        prob = OdeProblem(_stifflin_f, np.ones(12), 0.0, 1.0, jacobian=_stifflin_jac, name=name)
        return NamedProblem(name, prob, _stifflin_exact(prob.x0))
    if name == "stiffnolin":
        prob = OdeProblem(_stiffnolin_f, np.full(12, -0.5), 0.0, 1.0,
                          jacobian=_stiffnolin_jac, name=name)
        return NamedProblem(name, prob)
    if name == "fpu":
        x0 = np.zeros(12)
        x0[:4] = [1.0, 1.0, 1.0 / FPU_OMEGA, 1.0]
        return NamedProblem(name, OdeProblem(_fpu_f, x0, 0.0, 15.0, jacobian=_fpu_jac, name=name))
    if name == "bruss":
        return NamedProblem(name, OdeProblem(_bruss_f, [1.5, 3.0], 0.0, 20.0,
                                             jacobian=_bruss_jac, name=name))
    if name == "rigid":
        return NamedProblem(name, OdeProblem(_rigid_f, [0.0, 1.0, 1.0], 0.0, 12.0,
                                             jacobian=_rigid_jac, name=name))
    if name == "chm":
        return NamedProblem(name, OdeProblem(_chm_f, [50.0, 0.0, 600.0, 0.1], 0.0, 1.0,
                                             jacobian=_chm_jac, name=name))
    if name in ("vdp1", "vdp100"):
        eps, T = (1.0, 20.0) if name == "vdp1" else (100.0, 300.0)
        f, jac = _vdp(eps)
        return NamedProblem(name, OdeProblem(f, [2.0, 0.0], 0.0, T, jacobian=jac, name=name))
    raise UsageError(f"unknown problem {name!r}; expected one of {', '.join(PROBLEM_NAMES)}")


def analytic_reference(name, t):
    """Closed-form solution at time ``t`` (``perlin`` and ``stifflin`` only)."""
    if name not in ("perlin", "stifflin"):
        raise UsageError(f"no closed-form solution for {name!r}")
    return make_problem(name).analytic_reference(t)
