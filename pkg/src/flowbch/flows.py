"""States, contact Hamiltonian vector fields and their flows.

In canonical coordinates ``(q, p, s)`` the contact Hamiltonian vector field
of ``H`` is

    dq/dt = H_p,   dp/dt = -H_q - p H_s,   ds/dt = p H_p - H.

Quadratic symplectic Hamiltonians act on ``(q, p)`` alone through
``dq/dt = H_p, dp/dt = -H_q``; complexified ``su(2)`` elements act linearly on
complex two-vectors.  Every closed-form flow has an equivalent RK4 path so the
two can be checked against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .algebra import (
    CHA,
    CONTACT_ALGEBRAS,
    HEISENBERG,
    QCA,
    QSA,
    SU2C,
    AlgebraElement,
    basis_monomials,
)
from .bch import decay_phi, decay_psi, entire_C, entire_S, entire_T, hamiltonian_matrix, su2_matrix
from .errors import DivergentTrajectoryError, NotContactElementError
from .polynomial import Polynomial, jacobi_bracket_values


def _finite(name: str, *values) -> None:
    for v in values:
        if not np.isfinite(v):
            raise ValueError(f"{name} components must be finite, got {values}")


@dataclass(frozen=True)
class ContactState:
    q: float
    p: float
    s: float

    def __post_init__(self):
        for field in ("q", "p", "s"):
            object.__setattr__(self, field, float(getattr(self, field)))
        _finite("ContactState", self.q, self.p, self.s)

    def to_array(self) -> np.ndarray:
        return np.array([self.q, self.p, self.s])

    @classmethod
    def from_array(cls, y) -> ContactState:
        return cls(*(float(v) for v in y))


@dataclass(frozen=True)
class SymplecticState:
    q: float
    p: float

    def __post_init__(self):
        for field in ("q", "p"):
            object.__setattr__(self, field, float(getattr(self, field)))
        _finite("SymplecticState", self.q, self.p)

    def to_array(self) -> np.ndarray:
        return np.array([self.q, self.p])

    @classmethod
    def from_array(cls, y) -> SymplecticState:
        return cls(*(float(v) for v in y))


@dataclass(frozen=True)
class SpinorState:
    """Complex two-vector acted on by ``exp(t sum mu_k Sigma_k)``."""

    u: complex
    v: complex

    def __post_init__(self):
        for field in ("u", "v"):
            object.__setattr__(self, field, complex(getattr(self, field)))
        _finite("SpinorState", self.u, self.v)

    def to_array(self) -> np.ndarray:
        return np.array([self.u, self.v])

    @classmethod
    def from_array(cls, y) -> SpinorState:
        return cls(*(complex(v) for v in y))


@dataclass(frozen=True)
class TangentVector:
    dq: float
    dp: float
    ds: float

    def __post_init__(self):
        _finite("TangentVector", self.dq, self.dp, self.ds)

    def to_array(self) -> np.ndarray:
        return np.array([self.dq, self.dp, self.ds])


State = Union[ContactState, SymplecticState, SpinorState]

_STATE_KIND = {
    HEISENBERG: ContactState,
    CHA: ContactState,
    QCA: ContactState,
    QSA: SymplecticState,
    SU2C: SpinorState,
}


def state_kind(algebra) -> type:
    return _STATE_KIND[algebra]


# ---------------------------------------------------------------------------
# vector fields


def _monomial_terms(algebra, coeffs: np.ndarray, y: np.ndarray):
    """Value and gradient of ``sum coeffs[..., m] * monomial_m`` at states ``y[..., :]``.

    ``coeffs`` has shape ``(..., dim)`` and broadcasts against ``y[..., 0]``.
    """
    q, p = y[..., 0], y[..., 1]
    s = y[..., 2] if y.shape[-1] > 2 else np.zeros_like(q)
    h = hq = hp = hs = 0.0
    for m, (i, j, k) in enumerate(basis_monomials(algebra)):
        c = coeffs[..., m]
        h = h + c * q**i * p**j * s**k
        if i:
            hq = hq + c * i * q ** (i - 1) * p**j * s**k
        if j:
            hp = hp + c * j * q**i * p ** (j - 1) * s**k
        if k:
            hs = hs + c * k * q**i * p**j * s ** (k - 1)
    zero = np.zeros_like(q)
    return h + zero, hq + zero, hp + zero, hs + zero


def _contact_field_array(algebra, coeffs, y):
    h, hq, hp, hs = _monomial_terms(algebra, coeffs, y)
    p = y[..., 1]
    return np.stack([hp, -hq - p * hs, p * hp - h], axis=-1)


def _symplectic_field_array(coeffs, y):
    _, hq, hp, _ = _monomial_terms(QSA, coeffs, y)
    return np.stack([hp, -hq], axis=-1)


def _su2_field_array(coeffs, y):
    mats = _su2_matrices(coeffs)
    return np.einsum("...ij,...j->...i", mats, y)


def _su2_matrices(coeffs):
    m1, m2, m3 = coeffs[..., 0], coeffs[..., 1], coeffs[..., 2]
    return np.stack(
        [np.stack([1j * m3, 1j * m1 - m2], -1), np.stack([1j * m1 + m2, -1j * m3], -1)], -2
    )


def field_function(algebra) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Vectorized ``(coeffs, states) -> velocities`` for the algebra's state space."""
    if algebra in CONTACT_ALGEBRAS:
        return lambda coeffs, y: _contact_field_array(algebra, coeffs, y)
    if algebra is QSA:
        return _symplectic_field_array
    return _su2_field_array


def contact_vector_field(H: AlgebraElement, x: ContactState) -> TangentVector:
    """``(H_p, -H_q - p H_s, p H_p - H)`` at ``x``."""
    if H.algebra not in CONTACT_ALGEBRAS:
        raise NotContactElementError(f"not a contact algebra element: {H.algebra}")
    v = _contact_field_array(H.algebra, H.coeffs, x.to_array())
    return TangentVector(*(float(c) for c in v))


def jacobi_bracket_at(f, g, x: ContactState) -> float:
    """Coordinate Jacobi bracket ``{f, g}`` evaluated at ``x``.

    ``f`` and ``g`` may be algebra elements (from any polynomial algebra, not
    necessarily the same one) or :class:`Polynomial` instances.
    """
    fp = f if isinstance(f, Polynomial) else f.to_polynomial()
    gp = g if isinstance(g, Polynomial) else g.to_polynomial()
    return float(
        jacobi_bracket_values(
            fp.value_and_gradient(x.q, x.p, x.s), gp.value_and_gradient(x.q, x.p, x.s), x.p
        )
    )


# ---------------------------------------------------------------------------
# exact flows


def _flow_heisenberg(coeffs, y, t):
    a, b, z = coeffs
    q0, p0, s0 = y[..., 0], y[..., 1], y[..., 2]
    return np.stack(
        [q0 + b * t, p0 - a * t, s0 - 0.5 * a * b * t * t - (a * q0 + z) * t], axis=-1
    )


def _flow_contact_heisenberg(coeffs, y, t):
    a, b, c, z = coeffs
    q0, p0, s0 = y[..., 0], y[..., 1], y[..., 2]
    decay = math.exp(-c * t)
    phi = t * decay_phi(c * t)
    psi = t * t * decay_psi(c * t)
    return np.stack(
        [q0 + b * t, decay * p0 - a * phi, decay * s0 - (a * q0 + z) * phi - a * b * psi],
        axis=-1,
    )


def _linear_propagator(M: np.ndarray, t: float) -> np.ndarray:
    """``expm(t M)`` for traceless 2x2 ``M``."""
    d = t * t * (M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    return entire_C(d) * np.eye(2) + t * entire_S(d) * M


def _flow_quadratic_symplectic(coeffs, y, t):
    E = _linear_propagator(hamiltonian_matrix(*coeffs), t)
    return y @ E.T


def _flow_quadratic_contact(coeffs, y, t):
    a, b, c, d, z = coeffs
    A = hamiltonian_matrix(a, b, c + d / 2)
    det = float(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    x0 = y[..., :2]
    s0 = y[..., 2]
    qp = math.exp(-d * t / 2) * (x0 @ _linear_propagator(A, t).T)

    W = np.diag([-a, b])
    Ax = x0 @ A.T
    k1 = np.einsum("...i,ij,...j->...", x0, W, x0)
    k2 = 2 * np.einsum("...i,ij,...j->...", x0, W, Ax)
    k3 = np.einsum("...i,ij,...j->...", Ax, W, Ax)
    y4 = 4 * t * t * det
    sq = entire_S(t * t * det)
    quad = (
        k1 * (t / 2) * (1 + entire_S(y4))
        + k2 * (t * t / 2) * sq * sq
        + k3 * 2 * t**3 * entire_T(y4)
    )
    s = math.exp(-d * t) * (s0 + quad) - z * t * decay_phi(d * t)
    return np.concatenate([qp, s[..., None]], axis=-1)


def _flow_su2(coeffs, y, t):
    return y @ _linear_propagator(su2_matrix(coeffs), t).T


_EXACT = {
    HEISENBERG: _flow_heisenberg,
    CHA: _flow_contact_heisenberg,
    QSA: _flow_quadratic_symplectic,
    QCA: _flow_quadratic_contact,
    SU2C: _flow_su2,
}


def _check_state(H: AlgebraElement, x0) -> None:
    expected = _STATE_KIND[H.algebra]
    if not isinstance(x0, expected):
        raise TypeError(f"{H.algebra} flows act on {expected.__name__}, got {type(x0).__name__}")


def exact_flow_array(H: AlgebraElement, y: np.ndarray, t: float) -> np.ndarray:
    """Closed-form time-``t`` flow applied to an array of states ``y[..., :]``."""
    return _EXACT[H.algebra](H.coeffs, np.asarray(y), float(t))


def exact_flow(H: AlgebraElement, x0: State, t: float) -> State:
    _check_state(H, x0)
    if t == 0:
        return x0
    return type(x0).from_array(exact_flow_array(H, x0.to_array(), t))


def composed_flow(A: AlgebraElement, B: AlgebraElement, x0: State, t: float = 1.0) -> State:
    """Flow of ``B`` for time ``t``, then flow of ``A``: the map generated by ``Z(A, B)``."""
    return exact_flow(A, exact_flow(B, x0, t), t)


# ---------------------------------------------------------------------------
# RK4 reference integrator


def rk4_array(field, coeffs: np.ndarray, y: np.ndarray, t: float, n_steps: int) -> np.ndarray:
    """Classical RK4 for ``dy/dt = field(coeffs, y)``, vectorized over leading axes."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    h = t / n_steps
    y = np.array(y, dtype=np.result_type(y, coeffs, float))
    for step in range(n_steps):
        k1 = field(coeffs, y)
        k2 = field(coeffs, y + (h / 2) * k1)
        k3 = field(coeffs, y + (h / 2) * k2)
        k4 = field(coeffs, y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if step % 64 == 63 and not np.all(np.isfinite(y)):
            raise DivergentTrajectoryError(f"divergent trajectory at step {step + 1}")
    if not np.all(np.isfinite(y)):
        raise DivergentTrajectoryError("divergent trajectory")
    return y


def _scalar_field(H: AlgebraElement) -> Callable[[tuple], tuple]:
    """Pure-Python vector field; far cheaper than numpy for one trajectory."""
    c = [complex(v) if H.algebra is SU2C else float(v) for v in H.coeffs]
    if H.algebra is HEISENBERG:
        a, b, z = c
        return lambda y: (b, -a, -a * y[0] - z)
    if H.algebra is CHA:
        a, b, g, z = c
        return lambda y: (b, -a - g * y[1], -a * y[0] - g * y[2] - z)
    if H.algebra is QSA:
        a, b, g = c
        return lambda y: (2 * b * y[1] + g * y[0], -2 * a * y[0] - g * y[1])
    if H.algebra is QCA:
        a, b, g, d, z = c

        def field(y):
            q, p, s = y
            hp = 2 * b * p + g * q
            h = a * q * q + b * p * p + g * q * p + d * s + z
            return (hp, -2 * a * q - g * p - d * p, p * hp - h)

        return field
    (m11, m12), (m21, m22) = su2_matrix(c).tolist()
    return lambda y: (m11 * y[0] + m12 * y[1], m21 * y[0] + m22 * y[1])


def rk4_flow(H: AlgebraElement, x0: State, t: float, n_steps: int) -> State:
    """``n_steps`` classical RK4 steps on the exact vector field of ``H``."""
    _check_state(H, x0)
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    field = _scalar_field(H)
    h = t / n_steps
    y = tuple(x0.to_array().tolist())
    for _ in range(n_steps):
        k1 = field(y)
        k2 = field(tuple(v + h / 2 * k for v, k in zip(y, k1)))
        k3 = field(tuple(v + h / 2 * k for v, k in zip(y, k2)))
        k4 = field(tuple(v + h * k for v, k in zip(y, k3)))
        y = tuple(
            v + h / 6 * (r1 + 2 * r2 + 2 * r3 + r4) for v, r1, r2, r3, r4 in zip(y, k1, k2, k3, k4)
        )
    if not all(np.isfinite(v) for v in y):
        raise DivergentTrajectoryError("divergent trajectory")
    return type(x0).from_array(y)


# ---------------------------------------------------------------------------
# symplectic lift


def lift_symplectic(H: AlgebraElement) -> AlgebraElement:
    """Quadratic contact element generating the extended flow of a symplectic ``H``.

    The ``(q, p)`` dynamics are unchanged and ``s`` follows
    ``ds/dt = b p^2 - a q^2``.
    """
    if H.algebra is not QSA:
        raise ValueError(f"expected a qsa element, got {H.algebra}")
    return AlgebraElement(QCA, np.concatenate([H.coeffs, [0.0, 0.0]]))


def lift_state(x: SymplecticState, s: float = 0.0) -> ContactState:
    return ContactState(x.q, x.p, s)
