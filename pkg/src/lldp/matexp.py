"""Dense matrix exponentials by (p,q)-Pade approximation with scaling and squaring.

Matrices are plain two-dimensional ``numpy`` float arrays. Besides the single
exponential :func:`expm`, the module builds the product chain that yields
``exp(D c h)`` at every Dormand-Prince abscissa ``c`` from one base exponential
``exp(D h / 90)`` (:func:`exp_chain`).
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np

from .errors import PadeFailure, UsageError

__all__ = [
    "PadeOrder",
    "ExpChain",
    "mat_mul",
    "inf_norm",
    "pade_coefficients",
    "pade_expm_core",
    "scaling_exponent",
    "expm",
    "exp_chain",
]


@dataclass(frozen=True)
class PadeOrder:
    """Degrees of the numerator (``p``) and denominator (``q``) of the approximant.

    ``p + q > 4`` keeps the fifth order of the embedded formulas; the rational
    function is A-acceptable when ``p <= q <= p + 2``.
    """

    p: int = 3
    q: int = 3

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise UsageError(f"Pade degrees must be nonnegative, got ({self.p}, {self.q})")
        if self.p + self.q <= 4:
            raise UsageError(f"Pade order ({self.p}, {self.q}) needs p + q > 4")

    @property
    def a_stable(self):
        return self.p <= self.q <= self.p + 2


DEFAULT_ORDER = PadeOrder(3, 3)


def _as_matrix(a, name="a"):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise UsageError(f"{name} must be a non-empty 2-D matrix, got shape {a.shape}")
    return a


def _as_square(a, name="a"):
    a = _as_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise UsageError(f"{name} must be square, got shape {a.shape}")
    return a


def mat_mul(a, b):
    """Matrix product with an explicit shape check."""
    a = _as_matrix(a, "a")
    b = _as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise UsageError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def inf_norm(a):
    """Maximum absolute row sum."""
    a = _as_matrix(a)
    return float(np.abs(a).sum(axis=1).max())


def pade_coefficients(order):
    """Coefficients ``(n_j, d_j)`` of ``N(A) = sum n_j A^j`` and ``D(A) = sum d_j (-A)^j``."""
    p, q = order.p, order.q
    total = factorial(p + q)
    num = [factorial(p + q - j) * factorial(p) / (total * factorial(j) * factorial(p - j))
           for j in range(p + 1)]
    den = [factorial(p + q - j) * factorial(q) / (total * factorial(j) * factorial(q - j))
           for j in range(q + 1)]
    return np.array(num), np.array(den)


_COEFF_CACHE = {}


def _coefficients(order):
    try:
        return _COEFF_CACHE[order]
    except KeyError:
        _COEFF_CACHE[order] = pade_coefficients(order)
        return _COEFF_CACHE[order]


def _pade(a, order):
    # unchecked core shared by expm and exp_chain
    n = a.shape[0]
    num_c, den_c = _coefficients(order)
    eye = np.eye(n)
    num = num_c[0] * eye
    den = den_c[0] * eye
    power = eye
    for j in range(1, max(order.p, order.q) + 1):
        power = power @ a
        if j <= order.p:
            num = num + num_c[j] * power
        if j <= order.q:
            den = den + ((-1) ** j * den_c[j]) * power
    # with ||a|| <= 1/2 the denominator stays within distance 0.65 of I; only
    # unscaled input can make it singular, so the condition check is conditional
    if inf_norm(den - eye) >= 1.0 and np.linalg.cond(den, np.inf) * np.finfo(float).eps > 1.0:
        raise PadeFailure("Pade denominator is singular to working precision")
    try:
        result = np.linalg.solve(den, num)
    except np.linalg.LinAlgError as exc:
        raise PadeFailure(f"Pade denominator solve failed: {exc}") from exc
    if not np.all(np.isfinite(result)):
        raise PadeFailure("Pade approximant has non-finite entries")
    return result


def pade_expm_core(a, order=DEFAULT_ORDER):
    """Return ``D_pq(a)^{-1} N_pq(a)``, the (p,q) Pade approximant of ``exp(a)``.

    The caller is expected to have scaled ``a`` so that its infinity norm is at
    most 1/2. Raises :class:`PadeFailure` when the denominator is singular or the
    result is not finite.
    """
    a = _as_square(a)
    if not np.all(np.isfinite(a)):
        raise PadeFailure("non-finite entries in matrix exponential argument")
    return _pade(a, order)


def scaling_exponent(norm):
    """Smallest ``kappa >= 0`` with ``norm / 2**kappa <= 1/2``."""
    if not np.isfinite(norm):
        raise PadeFailure(f"cannot scale a matrix of norm {norm}")
    if norm <= 0.5:
        return 0
    _, e = np.frexp(norm)  # norm = m * 2**e, 0.5 <= m < 1
    kappa = max(int(e), 0)
    while kappa > 0 and np.ldexp(norm, -(kappa - 1)) <= 0.5:
        kappa -= 1
    while np.ldexp(norm, -kappa) > 0.5:
        kappa += 1
    return kappa


def _scaled_exp(ah, order):
    if not np.all(np.isfinite(ah)):
        raise PadeFailure("non-finite entries in matrix exponential argument")
    kappa = scaling_exponent(float(np.abs(ah).sum(axis=1).max()))
    m = _pade(np.ldexp(ah, -kappa), order)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(kappa):
            m = m @ m
    if not np.all(np.isfinite(m)):
        raise PadeFailure("matrix exponential overflowed during squaring")
    return m, kappa


def expm(a, h=1.0, order=DEFAULT_ORDER):
    """Approximate ``exp(a h)`` by scaling and squaring.

    Returns
    -------
    m : ndarray
        ``P_pq(2^-kappa a h) ** (2**kappa)``.
    kappa : int
        Number of squarings, the smallest integer with
        ``||2^-kappa a h||_inf <= 1/2``.
    """
    a = _as_square(a)
    h = float(h)
    if not np.isfinite(h):
        raise UsageError(f"step must be finite, got {h}")
    return _scaled_exp(a * h, order)


# fractions of h retained from the chain: the tableau abscissae plus the
# intermediate 1/90 and 1/10 factors
CHAIN_FRACTIONS = (
    Fraction(1, 90), Fraction(1, 10), Fraction(1, 5), Fraction(3, 10),
    Fraction(2, 5), Fraction(4, 5), Fraction(8, 9), Fraction(1),
)


@dataclass(frozen=True)
class ExpChain:
    """Exponentials ``exp(D c h)`` for the retained fractions ``c`` of one step."""

    h: float
    kappa: int
    matrices: dict = field(repr=False)

    def __getitem__(self, c):
        key = c if isinstance(c, Fraction) else Fraction(c).limit_denominator(1000)
        try:
            return self.matrices[key]
        except KeyError:
            raise UsageError(f"fraction {c} is not stored in the chain") from None


def exp_chain(d, h, order=DEFAULT_ORDER):
    """Exponentials of ``d`` at every Dormand-Prince abscissa from one Pade call.

    ``M_{1/90}`` comes from :func:`expm` on ``d h / 90``; every other matrix is
    a product of earlier ones::

        M_{2/90} = M_{1/90}^2, M_{4/90} = M_{2/90}^2, ..., M_{32/90} = M_{16/90}^2
        M_{80/90} = M_{32/90} M_{16/90} M_{32/90}
        M_{1/10} = M_{8/90} M_{1/90},   M_{1/5} = M_{1/10}^2
        M_{2/5} = M_{1/5}^2,            M_{4/5} = M_{2/5}^2
        M_{3/10} = M_{1/10} M_{1/5},    M_1 = M_{4/5} M_{1/5}
    """
    d = _as_square(d, "d")
    h = float(h)
    if not (np.isfinite(h) and h > 0):
        raise UsageError(f"chain step must be positive, got {h}")
    m1, kappa = _scaled_exp(d * (h / 90.0), order)
    with np.errstate(over="ignore", invalid="ignore"):
        m2 = m1 @ m1
        m4 = m2 @ m2
        m8 = m4 @ m4
        m16 = m8 @ m8
        m32 = m16 @ m16
        m80 = m32 @ m16 @ m32
        m_10 = m8 @ m1
        m_5 = m_10 @ m_10
        m2_5 = m_5 @ m_5
        m4_5 = m2_5 @ m2_5
        m3_10 = m_10 @ m_5
        m_one = m4_5 @ m_5
    if not (np.all(np.isfinite(m_one)) and np.all(np.isfinite(m80))
            and np.all(np.isfinite(m3_10))):
        raise PadeFailure("exponential chain overflowed")
    matrices = dict(zip(CHAIN_FRACTIONS, (m1, m_10, m_5, m3_10, m2_5, m4_5, m80, m_one)))
    return ExpChain(h=h, kappa=kappa, matrices=matrices)
