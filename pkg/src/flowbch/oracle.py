"""Ground-truth BCH computations that share no code with the closed forms.

Three independent routes are provided:

* ``bch_matrix_oracle``: principal log of ``expm(rep A) @ expm(rep B)`` in a
  faithful matrix representation, projected back onto the basis;
* ``dynkin_series``: the BCH series truncated at order 1 to 4;
* ``generator_extraction_oracle``: compose the exact flows numerically, read
  off the resulting affine (or linear) map, and take its matrix logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import (
    CHA,
    HEISENBERG,
    QCA,
    QSA,
    SIGMA_MATRICES,
    SU2C,
    AlgebraElement,
    AlgebraId,
    adjoint_matrix,
    bracket,
    dimension,
)
from .errors import (
    AlgebraMismatchError,
    ExponentialOverflowError,
    NonPrincipalLogError,
    NotInImageError,
)
from .flows import ContactState, SpinorState, SymplecticState, composed_flow

PROJECTION_TOLERANCE = 1e-9


# ---------------------------------------------------------------------------
# dense matrix exponential and logarithm


def _norm1(M: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(M), axis=0)))


def matrix_exp(M: np.ndarray) -> np.ndarray:
    """Scaling and squaring around a Taylor kernel on ``M / 2**k`` with norm <= 1/2."""
    M = np.asarray(M)
    if not np.all(np.isfinite(M)):
        raise ExponentialOverflowError("exponential overflow: non-finite input")
    norm = _norm1(M)
    if norm > 700 * M.shape[0]:
        raise ExponentialOverflowError(f"exponential overflow: |M|_1 = {norm:.3g}")
    k = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    A = M / 2.0**k
    n = M.shape[0]
    result = np.eye(n, dtype=A.dtype)
    term = np.eye(n, dtype=A.dtype)
    for j in range(1, 30):
        term = term @ A / j
        result = result + term
        if _norm1(term) < 1e-18 * _norm1(result):
            break
    for _ in range(k):
        result = result @ result
    if not np.all(np.isfinite(result)):
        raise ExponentialOverflowError("exponential overflow")
    return result


def _sqrt_denman_beavers(M: np.ndarray) -> np.ndarray:
    Y = M.astype(np.result_type(M, float))
    Z = np.eye(M.shape[0], dtype=Y.dtype)
    for _ in range(100):
        Y_next = 0.5 * (Y + np.linalg.inv(Z))
        Z = 0.5 * (Z + np.linalg.inv(Y))
        converged = _norm1(Y_next - Y) <= 1e-15 * _norm1(Y_next)
        Y = Y_next
        if converged:
            break
    return Y


def _check_principal(M: np.ndarray) -> None:
    eig = np.linalg.eigvals(M)
    scale = max(1.0, float(np.max(np.abs(eig))))
    for lam in eig:
        if abs(lam.imag) <= 1e-12 * scale and lam.real <= 1e-300:
            raise NonPrincipalLogError(
                f"non-principal logarithm: eigenvalue {complex(lam):.6g} on the closed negative axis"
            )


def matrix_log(M: np.ndarray) -> np.ndarray:
    """Principal logarithm by inverse scaling and squaring.

    Square roots are taken until ``|M - I| < 0.25``; the remainder uses the
    ``2 artanh`` series in ``(M - I)(M + I)^-1``.
    """
    M = np.asarray(M)
    _check_principal(M)
    n = M.shape[0]
    eye = np.eye(n)
    k = 0
    while _norm1(M - eye) >= 0.25:
        M = _sqrt_denman_beavers(M)
        k += 1
        if k > 60:
            raise NonPrincipalLogError("non-principal logarithm: square roots did not converge")
    Y = (M - eye) @ np.linalg.inv(M + eye)
    Y2 = Y @ Y
    term = Y
    total = Y.copy()
    for j in range(1, 40):
        term = term @ Y2
        contribution = term / (2 * j + 1)
        total = total + contribution
        if _norm1(contribution) < 1e-18 * max(_norm1(total), 1e-300):
            break
    return 2.0 ** (k + 1) * total


# ---------------------------------------------------------------------------
# representations


def _unit(n: int, *entries) -> np.ndarray:
    """Matrix with the given 1-based ``(row, col, value)`` entries."""
    M = np.zeros((n, n))
    for row, col, value in entries:
        M[row - 1, col - 1] = value
    return M


_CHA_IMAGES = {
    "q": _unit(4, (2, 3, 1), (3, 4, 1)),
    "p": _unit(4, (1, 3, -1)),
    "s": _unit(4, (2, 2, -1), (4, 4, 1)),
    "one": _unit(4, (1, 4, 1)),
}


@dataclass(frozen=True, eq=False)
class Representation:
    algebra: AlgebraId
    dim: int
    basis_images: tuple[np.ndarray, ...]

    def flattened(self) -> np.ndarray:
        return np.stack([m.ravel() for m in self.basis_images], axis=1)


def _build_representation(algebra: AlgebraId) -> Representation:
    if algebra is CHA:
        images = tuple(_CHA_IMAGES[k] for k in ("q", "p", "s", "one"))
    elif algebra is HEISENBERG:
        images = tuple(_CHA_IMAGES[k] for k in ("q", "p", "one"))
    elif algebra is QSA:
        images = (
            np.array([[0.0, 0.0], [-2.0, 0.0]]),
            np.array([[0.0, 2.0], [0.0, 0.0]]),
            np.array([[1.0, 0.0], [0.0, -1.0]]),
        )
    elif algebra is SU2C:
        images = SIGMA_MATRICES
    else:
        # centerless, so the adjoint representation is faithful
        images = tuple(adjoint_matrix(AlgebraElement.basis(QCA, i)) for i in range(dimension(QCA)))
    return Representation(algebra, images[0].shape[0], tuple(images))


_REPRESENTATIONS = {alg: _build_representation(alg) for alg in AlgebraId}


def representation(algebra) -> Representation:
    return _REPRESENTATIONS[AlgebraId.parse(algebra)]


def represent(x: AlgebraElement) -> np.ndarray:
    rep = representation(x.algebra)
    return sum(c * m for c, m in zip(x.coeffs, rep.basis_images))


def project(M: np.ndarray, algebra) -> AlgebraElement:
    """Least-squares coordinates of ``M`` over the representation's basis images."""
    algebra = AlgebraId.parse(algebra)
    rep = representation(algebra)
    M = np.asarray(M)
    F = rep.flattened().astype(complex)
    coords, *_ = np.linalg.lstsq(F, M.ravel().astype(complex), rcond=None)
    residual = float(np.max(np.abs(F @ coords - M.ravel()))) / max(1.0, float(np.max(np.abs(M))))
    if algebra is not SU2C:
        residual = max(residual, float(np.max(np.abs(coords.imag))))
        coords = coords.real
    if residual > PROJECTION_TOLERANCE:
        raise NotInImageError(f"not in algebra image: residual {residual:.3g}")
    return AlgebraElement(algebra, coords)


def _require_same(A: AlgebraElement, B: AlgebraElement) -> AlgebraId:
    if A.algebra is not B.algebra:
        raise AlgebraMismatchError(A.algebra, B.algebra)
    return A.algebra


def bch_matrix_oracle(A: AlgebraElement, B: AlgebraElement) -> AlgebraElement:
    algebra = _require_same(A, B)
    product = matrix_exp(represent(A)) @ matrix_exp(represent(B))
    return project(matrix_log(product), algebra)


# ---------------------------------------------------------------------------
# truncated series


def dynkin_series(A: AlgebraElement, B: AlgebraElement, order: int) -> AlgebraElement:
    """BCH series through total degree ``order`` (1 to 4)."""
    _require_same(A, B)
    if order not in (1, 2, 3, 4):
        raise ValueError(f"unsupported order {order}; expected 1..4")
    Z = A + B
    if order >= 2:
        AB = bracket(A, B)
        Z = Z + AB * 0.5
    if order >= 3:
        AAB = bracket(A, AB)
        BBA = bracket(B, -AB)
        Z = Z + (AAB + BBA) * (1.0 / 12.0)
    if order >= 4:
        Z = Z - bracket(B, AAB) * (1.0 / 24.0)
    return Z


# ---------------------------------------------------------------------------
# generator extraction from composed flows


def _affine_matrix(A, B) -> np.ndarray:
    """Homogeneous 4x4 matrix of the affine composite map on ``(q, p, s)``."""
    origin = composed_flow(A, B, ContactState(0, 0, 0)).to_array()
    M = np.eye(4)
    M[:3, 3] = origin
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        M[:3, i] = composed_flow(A, B, ContactState(*e)).to_array() - origin
    return M


def _linear_matrix(A, B, state_type) -> np.ndarray:
    cols = [composed_flow(A, B, state_type(*e)).to_array() for e in np.eye(2)]
    return np.stack(cols, axis=1)


def _quadratic_from_hamiltonian_matrix(L: np.ndarray):
    return (-L[1, 0] / 2, L[0, 1] / 2, L[0, 0])


def generator_extraction_oracle(A: AlgebraElement, B: AlgebraElement) -> AlgebraElement:
    """Generator of ``flow_A o flow_B`` recovered from the composite map itself."""
    algebra = _require_same(A, B)
    if algebra in (HEISENBERG, CHA):
        # for H = a q + b p + c s + z the log has rows (0,0,0,b), (0,-c,0,-a), (-a,0,-c,-z)
        L = matrix_log(_affine_matrix(A, B))
        a, b, c, z = -L[1, 3], L[0, 3], -L[1, 1], -L[2, 3]
        coeffs = [a, b, z] if algebra is HEISENBERG else [a, b, c, z]
        return AlgebraElement(algebra, np.array(coeffs))
    if algebra is QSA:
        L = matrix_log(_linear_matrix(A, B, SymplecticState))
        return AlgebraElement(QSA, np.array(_quadratic_from_hamiltonian_matrix(L)))
    if algebra is SU2C:
        L = matrix_log(_linear_matrix(A, B, SpinorState))
        mu = [-0.5j * (L[0, 1] + L[1, 0]), 0.5 * (L[1, 0] - L[0, 1]), -1j * L[0, 0]]
        return AlgebraElement(SU2C, np.array(mu))

    # QCA: s-sector from the affine dynamics on q = p = 0
    s_at_0 = composed_flow(A, B, ContactState(0, 0, 0)).s
    s_at_1 = composed_flow(A, B, ContactState(0, 0, 1)).s
    delta = -math.log(s_at_1 - s_at_0)
    average = -math.expm1(-delta) / delta if abs(delta) > 1e-12 else 1.0 - delta / 2
    zeta = -s_at_0 / average
    block = np.stack(
        [composed_flow(A, B, ContactState(*e, 0.0)).to_array()[:2] for e in np.eye(2)], axis=1
    )
    L = matrix_log(math.exp(delta / 2) * block)
    alpha, beta, shifted = _quadratic_from_hamiltonian_matrix(L)
    return AlgebraElement(QCA, np.array([alpha, beta, shifted - delta / 2, delta, zeta]))


def relative_error(value: AlgebraElement, reference: AlgebraElement) -> float:
    """``|value - reference|_inf / max(|reference|_inf, 1e-300)``."""
    scale = float(np.max(np.abs(reference.coeffs)))
    return value.max_abs_diff(reference) / max(scale, 1e-300)
