"""Closed-form BCH maps ``Z(A, B) = log(e^A e^B)`` for the supported algebras.

Composition convention: ``Z(A, B)`` generates the flow obtained by applying
the flow of ``B`` for unit time and then the flow of ``A`` (the literal
composition ``exp(X_A) o exp(X_B)``).  With the Jacobi-bracket sign used in
:mod:`flowbch.algebra` this is the same element as the principal logarithm of
``exp(rep A) @ exp(rep B)`` in any matrix representation, and the truncated
series ``A + B + [A,B]/2 + ...``.

The 2x2 traceless kernels use the entire functions

    C(d) = cos(sqrt d),   S(d) = sin(sqrt d) / sqrt d,

so that ``expm(M) = C(det M) I + S(det M) M`` for every traceless 2x2 ``M``
whatever the sign of ``det M``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import CHA, HEISENBERG, QCA, QSA, SU2C, AlgebraElement, AlgebraId
from .errors import AlgebraMismatchError, BranchError, NumericDomainError

SERIES_THRESHOLD = 1e-6
PARABOLIC_THRESHOLD = 1e-8

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


# ---------------------------------------------------------------------------
# scalar kernels


def _is_complex(z) -> bool:
    return isinstance(z, complex) or np.iscomplexobj(z)


def entire_C(d):
    """``cos(sqrt d)`` continued to ``cosh(sqrt(-d))`` for negative ``d``."""
    if _is_complex(d):
        return cmath.cos(cmath.sqrt(complex(d)))
    d = float(d)
    if d >= 0:
        return math.cos(math.sqrt(d))
    return math.cosh(math.sqrt(-d))


def entire_S(d):
    """``sin(sqrt d)/sqrt d``, equal to 1 at 0 and ``sinh(r)/r`` for ``d = -r**2``."""
    if abs(d) < SERIES_THRESHOLD:
        return 1.0 - d / 6.0 + d * d / 120.0 - d**3 / 5040.0
    if _is_complex(d):
        r = cmath.sqrt(complex(d))
        return cmath.sin(r) / r
    d = float(d)
    if d > 0:
        r = math.sqrt(d)
        return math.sin(r) / r
    r = math.sqrt(-d)
    return math.sinh(r) / r


def entire_T(d):
    """``(1 - S(d)) / d``; appears in time integrals of ``S`` squared."""
    # cancellation in 1 - S(d) costs eps/|d|; the series is used up to 0.1
    if abs(d) < 0.1:
        total, term = 0.0, 1.0 / 6.0
        for k in range(12):
            total += term
            term *= -d / ((2 * k + 4) * (2 * k + 5))
        return total
    return (1.0 - entire_S(d)) / d


def decay_phi(x: float) -> float:
    """``(1 - exp(-x)) / x``: time-averaged exponential decay."""
    if abs(x) < SERIES_THRESHOLD:
        return 1.0 - x / 2.0 + x * x / 6.0 - x**3 / 24.0
    return -math.expm1(-x) / x


def decay_psi(x: float) -> float:
    """``(x - 1 + exp(-x)) / x**2``, i.e. ``int_0^1 u exp(-x (1-u)) du``."""
    # cancellation costs 2 eps/|x|; the series is used up to 0.05
    if abs(x) < 0.05:
        total, term = 0.0, 0.5
        for k in range(12):
            total += term
            term *= -x / (k + 3)
        return total
    return (x + math.expm1(-x)) / (x * x)


class Regime(str, enum.Enum):
    HYPERBOLIC = "hyperbolic"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    OUT_OF_IMAGE = "out_of_image"


@dataclass(frozen=True)
class BranchReport:
    x_value: complex | float
    regime: Regime


def classify_branch(x) -> BranchReport:
    xr = x.real if _is_complex(x) else x
    if _is_complex(x) and x.imag != 0:
        if xr <= -1 and abs(x.imag) < 1e-14:
            return BranchReport(x, Regime.OUT_OF_IMAGE)
        # off the real axis there is no cut
        regime = Regime.PARABOLIC if abs(x - 1) < PARABOLIC_THRESHOLD else Regime.ELLIPTIC
        return BranchReport(x, regime)
    if abs(xr - 1) < PARABOLIC_THRESHOLD:
        return BranchReport(x, Regime.PARABOLIC)
    if xr > 1:
        return BranchReport(x, Regime.HYPERBOLIC)
    if xr > -1:
        return BranchReport(x, Regime.ELLIPTIC)
    return BranchReport(x, Regime.OUT_OF_IMAGE)


_G_SERIES = (1.0, -1.0 / 3.0, 2.0 / 15.0, -2.0 / 35.0, 8.0 / 315.0)


def branch_g(x):
    """Logarithm prefactor ``theta / sin(theta)`` with ``cos(theta) = x``.

    Equals ``arccosh(x)/sqrt(x**2-1)`` for ``x > 1`` and
    ``arccos(x)/sqrt(1-x**2)`` for ``|x| < 1``.  For complex ``x`` the
    principal ``arccos`` is used; the cut is ``(-inf, -1]``.
    """
    report = classify_branch(x)
    if report.regime is Regime.OUT_OF_IMAGE:
        raise BranchError(
            f"x = {x!r}: outside principal branch / not in exponential image"
        )
    if report.regime is Regime.PARABOLIC:
        u = x - 1
        return sum(c * u**k for k, c in enumerate(_G_SERIES))
    if _is_complex(x) and complex(x).imag != 0:
        theta = cmath.acos(complex(x))
        return theta / cmath.sin(theta)
    if _is_complex(x):
        x = complex(x).real
        return complex(branch_g(x))
    if x > 1:
        return math.acosh(x) / math.sqrt((x - 1.0) * (x + 1.0))
    return math.acos(x) / math.sqrt((1.0 - x) * (1.0 + x))


# ---------------------------------------------------------------------------
# 2x2 Hamiltonian-matrix composition


def hamiltonian_matrix(a, b, c) -> np.ndarray:
    """Matrix of the linear field of ``a q^2 + b p^2 + c qp`` acting on ``(q, p)``."""
    dtype = complex if any(_is_complex(v) for v in (a, b, c)) else float
    return np.array([[c, 2 * b], [-2 * a, -c]], dtype=dtype)


def _product_decomposition(first, second):
    """``A B = J S + lam I`` for the Hamiltonian matrices of two coefficient triples."""
    a1, b1, c1 = first
    a2, b2, c2 = second
    lam = -2 * a1 * b2 - 2 * a2 * b1 + c1 * c2
    S = np.array(
        [
            [2 * (a1 * c2 - a2 * c1), 2 * (a1 * b2 - a2 * b1)],
            [2 * (a1 * b2 - a2 * b1), 2 * (b2 * c1 - b1 * c2)],
        ]
    )
    return lam, S


def _half_trace(first, second):
    det_a = first[0] * 4 * first[1] - first[2] ** 2
    det_b = second[0] * 4 * second[1] - second[2] ** 2
    ca, sa = entire_C(det_a), entire_S(det_a)
    cb, sb = entire_C(det_b), entire_S(det_b)
    lam = -2 * first[0] * second[1] - 2 * second[0] * first[1] + first[2] * second[2]
    return ca, sa, cb, sb, lam, ca * cb + sa * sb * lam


def quadratic_branch(first: Sequence, second: Sequence) -> BranchReport:
    """Regime of ``x = tr(e^A e^B) / 2`` for two quadratic coefficient triples."""
    return classify_branch(_half_trace(first, second)[-1])


def compose_quadratic(first: Sequence, second: Sequence):
    """Coefficients ``(a, b, c)`` of ``log(e^A e^B)`` for two quadratic triples.

    Works for real and complex coefficients.  Raises :class:`BranchError` if
    the product has no principal logarithm.
    """
    A = hamiltonian_matrix(*first)
    B = hamiltonian_matrix(*second)
    ca, sa, cb, sb, lam, x = _half_trace(first, second)
    _, S = _product_decomposition(first, second)
    # traceless part of e^A e^B; equals S(det C) C
    N = sa * sb * (_J @ S) + ca * sb * B + cb * sa * A
    C = branch_g(x) * N
    return (-C[1, 0] / 2, C[0, 1] / 2, C[0, 0])


# ---------------------------------------------------------------------------
# closed forms per algebra


def _require(x: AlgebraElement, y: AlgebraElement, algebra: AlgebraId):
    if x.algebra is not algebra:
        raise AlgebraMismatchError(x.algebra, algebra)
    if y.algebra is not algebra:
        raise AlgebraMismatchError(y.algebra, algebra)


def bch_heisenberg(A: AlgebraElement, B: AlgebraElement) -> AlgebraElement:
    _require(A, B, HEISENBERG)
    a, b, z = A.coeffs
    ab, bb, zb = B.coeffs
    zeta = z + zb + 0.5 * (a * bb - ab * b)
    return AlgebraElement(HEISENBERG, np.array([a + ab, b + bb, zeta]))


def bch_contact_heisenberg(A: AlgebraElement, B: AlgebraElement) -> AlgebraElement:
    """BCH for ``span{q, p, s, 1}``.

    The flow of ``a q + b p + c s + z`` at unit time is affine:
    ``q -> q + b``, ``p -> e^{-c} p - a phi(c)``,
    ``s -> e^{-c} s - (a q + z) phi(c) - a b psi(c)``; matching the
    composition against the same form gives the coefficients below.
    """
    _require(A, B, CHA)
    a, b, c, z = A.coeffs
    ab, bb, cb, zb = B.coeffs
    gamma = c + cb
    beta = b + bb
    phi_g = decay_phi(gamma)
    decay = math.exp(-c)
    alpha = (a * decay_phi(c) + decay * ab * decay_phi(cb)) / phi_g
    offset = (
        -decay * (zb * decay_phi(cb) + ab * bb * decay_psi(cb))
        - (a * bb + z) * decay_phi(c)
        - a * b * decay_psi(c)
    )
    zeta = -(offset + alpha * beta * decay_psi(gamma)) / phi_g
    return AlgebraElement(CHA, np.array([alpha, beta, gamma, zeta]))


def bch_quadratic_symplectic(A: AlgebraElement, B: AlgebraElement) -> AlgebraElement:
    _require(A, B, QSA)
    return AlgebraElement(QSA, np.array(compose_quadratic(A.coeffs, B.coeffs), dtype=float))


def bch_quadratic_contact(A: AlgebraElement, B: AlgebraElement) -> AlgebraElement:
    """BCH for ``span{q^2, p^2, qp, s, 1}``.

    The ``s`` coefficients add.  The ``(q, p)`` block of each flow is
    ``e^{-d/2}`` times the flow of a traceless Hamiltonian matrix whose ``qp``
    coefficient is shifted by ``d/2``; the conformal factors multiply, so the
    block reduces to the symplectic composition.  The constant term comes
    from the affine ``s`` dynamics on ``q = p = 0``.
    """
    _require(A, B, QCA)
    a, b, c, d, z = A.coeffs
    ab, bb, cb, db, zb = B.coeffs
    delta = d + db
    zeta = (z * decay_phi(d) + math.exp(-d) * zb * decay_phi(db)) / decay_phi(delta)
    alpha, beta, shifted = compose_quadratic((a, b, c + d / 2), (ab, bb, cb + db / 2))
    gamma = shifted - delta / 2
    return AlgebraElement(QCA, np.array([alpha, beta, gamma, delta, zeta], dtype=float))


# su(2) <-> complexified quadratic symplectic algebra


def su2_to_quadratic(mu: Sequence) -> tuple:
    m1, m2, m3 = (complex(v) for v in mu)
    return (-0.5j * m1 - m2 / 2, 0.5j * m1 - m2 / 2, 1j * m3)


def quadratic_to_su2(coeffs: Sequence) -> np.ndarray:
    a, b, c = coeffs
    return np.array([1j * (a - b), -(a + b), -1j * c])


def su2_matrix(mu: Sequence) -> np.ndarray:
    """``sum mu_k Sigma_k``, identical to the Hamiltonian matrix of the image."""
    m1, m2, m3 = mu
    return np.array([[1j * m3, 1j * m1 - m2], [1j * m1 + m2, -1j * m3]])


REAL_RESIDUE_TOLERANCE = 1e-10


def bch_su2c(mu: Sequence, nu: Sequence) -> np.ndarray:
    """BCH on coefficient triples over ``(Sigma_1, Sigma_2, Sigma_3)``.

    Real inputs (elements of real ``su(2)``) give a real triple; the
    imaginary residue is checked against ``REAL_RESIDUE_TOLERANCE``.
    """
    mu = np.asarray(mu)
    nu = np.asarray(nu)
    result = quadratic_to_su2(compose_quadratic(su2_to_quadratic(mu), su2_to_quadratic(nu)))
    if not (np.iscomplexobj(mu) and np.any(mu.imag)) and not (
        np.iscomplexobj(nu) and np.any(nu.imag)
    ):
        residue = float(np.max(np.abs(result.imag)))
        if residue > REAL_RESIDUE_TOLERANCE:
            raise NumericDomainError(f"imaginary residue {residue:.3g} for real su(2) input")
        return result.real.copy()
    return result


def bch_su2c_element(A: AlgebraElement, B: AlgebraElement) -> AlgebraElement:
    _require(A, B, SU2C)
    return AlgebraElement(SU2C, np.asarray(bch_su2c(A.coeffs, B.coeffs), dtype=complex))


_DISPATCH = {
    HEISENBERG: bch_heisenberg,
    CHA: bch_contact_heisenberg,
    QSA: bch_quadratic_symplectic,
    QCA: bch_quadratic_contact,
    SU2C: bch_su2c_element,
}


def bch(A: AlgebraElement, B: AlgebraElement) -> AlgebraElement:
    """Closed-form ``log(e^A e^B)`` for any supported algebra."""
    if A.algebra is not B.algebra:
        raise AlgebraMismatchError(A.algebra, B.algebra)
    return _DISPATCH[A.algebra](A, B)


def bch_product(factors: Sequence[AlgebraElement]) -> AlgebraElement:
    """``log(e^{F_1} e^{F_2} ... e^{F_n})`` by left-nested pairwise BCH."""
    total = factors[0]
    for factor in factors[1:]:
        total = bch(total, factor)
    return total
