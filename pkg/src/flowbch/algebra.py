"""The five finite-dimensional Lie algebras handled by the package.

Each algebra is a coefficient space over a fixed ordered basis.  The four
polynomial algebras are realised as spaces of contact Hamiltonians in
canonical coordinates ``(q, p, s)``; their structure constants are obtained
by evaluating the coordinate Jacobi bracket on the basis monomials, so that
every other module (flows, closed forms, oracles) uses one sign convention.
The complexified ``su(2)`` is realised by the Pauli matrices
``Sigma_1 = i sigma_1, Sigma_2 = -i sigma_2, Sigma_3 = i sigma_3``.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import AlgebraMismatchError
from .polynomial import Polynomial, jacobi_bracket


class AlgebraId(str, enum.Enum):
    HEISENBERG = "heisenberg"
    CONTACT_HEISENBERG = "cha"
    QUADRATIC_SYMPLECTIC = "qsa"
    QUADRATIC_CONTACT = "qca"
    SU2_COMPLEXIFIED = "su2c"

    @classmethod
    def parse(cls, tag: str | AlgebraId) -> AlgebraId:
        if isinstance(tag, AlgebraId):
            return tag
        key = tag.strip().lower()
        aliases = {
            "h": cls.HEISENBERG,
            "contact_heisenberg": cls.CONTACT_HEISENBERG,
            "quadratic_symplectic": cls.QUADRATIC_SYMPLECTIC,
            "quadratic_contact": cls.QUADRATIC_CONTACT,
            "su2": cls.SU2_COMPLEXIFIED,
        }
        if key in aliases:
            return aliases[key]
        return cls(key)

    def __str__(self) -> str:
        return self.value


HEISENBERG = AlgebraId.HEISENBERG
CHA = AlgebraId.CONTACT_HEISENBERG
QSA = AlgebraId.QUADRATIC_SYMPLECTIC
QCA = AlgebraId.QUADRATIC_CONTACT
SU2C = AlgebraId.SU2_COMPLEXIFIED

# Basis labels and (q, p, s) exponents of the corresponding monomials.
BASIS_LABELS: dict[AlgebraId, tuple[str, ...]] = {
    HEISENBERG: ("q", "p", "one"),
    CHA: ("q", "p", "s", "one"),
    QSA: ("q2", "p2", "qp"),
    QCA: ("q2", "p2", "qp", "s", "one"),
    SU2C: ("sigma1", "sigma2", "sigma3"),
}

_MONOMIALS = {
    "q": (1, 0, 0),
    "p": (0, 1, 0),
    "s": (0, 0, 1),
    "one": (0, 0, 0),
    "q2": (2, 0, 0),
    "p2": (0, 2, 0),
    "qp": (1, 1, 0),
}

POLYNOMIAL_ALGEBRAS = (HEISENBERG, CHA, QSA, QCA)
CONTACT_ALGEBRAS = (HEISENBERG, CHA, QCA)

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
SIGMA_MATRICES = (1j * _PAULI[0], -1j * _PAULI[1], 1j * _PAULI[2])


def dimension(algebra: AlgebraId | str) -> int:
    return len(BASIS_LABELS[AlgebraId.parse(algebra)])


def is_complex(algebra: AlgebraId | str) -> bool:
    return AlgebraId.parse(algebra) is SU2C


def basis_monomials(algebra: AlgebraId) -> tuple[tuple[int, int, int], ...]:
    if algebra is SU2C:
        raise ValueError("su2c has no polynomial realisation")
    return tuple(_MONOMIALS[label] for label in BASIS_LABELS[algebra])


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Coefficient vector over the ordered basis of ``algebra``."""

    algebra: AlgebraId
    coeffs: np.ndarray

    def __post_init__(self):
        algebra = AlgebraId.parse(self.algebra)
        raw = np.asarray(self.coeffs)
        if raw.ndim != 1 or raw.shape[0] != dimension(algebra):
            raise ValueError(
                f"{algebra} expects {dimension(algebra)} coefficients, got shape {raw.shape}"
            )
        if algebra is SU2C:
            arr = raw.astype(complex)
        else:
            if np.iscomplexobj(raw):
                if np.any(raw.imag != 0):
                    raise ValueError(f"{algebra} coefficients must be real")
                raw = raw.real
            arr = raw.astype(float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "coeffs", arr)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, algebra) -> AlgebraElement:
        algebra = AlgebraId.parse(algebra)
        return cls(algebra, np.zeros(dimension(algebra)))

    @classmethod
    def basis(cls, algebra, index: int | str) -> AlgebraElement:
        algebra = AlgebraId.parse(algebra)
        if isinstance(index, str):
            index = BASIS_LABELS[algebra].index(index)
        coeffs = np.zeros(dimension(algebra))
        coeffs[index] = 1.0
        return cls(algebra, coeffs)

    @classmethod
    def from_terms(cls, algebra, terms: Mapping[str, complex] | None = None, **kw) -> AlgebraElement:
        """Build from basis labels, e.g. ``from_terms("qca", s=1, one=2)``."""
        algebra = AlgebraId.parse(algebra)
        labels = BASIS_LABELS[algebra]
        coeffs = np.zeros(len(labels), dtype=complex if algebra is SU2C else float)
        for label, value in {**(terms or {}), **kw}.items():
            coeffs[labels.index(label)] = value
        return cls(algebra, coeffs)

    # -- vector-space structure ---------------------------------------------
    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    def __getitem__(self, key):
        if isinstance(key, str):
            key = BASIS_LABELS[self.algebra].index(key)
        return self.coeffs[key]

    def _check(self, other: AlgebraElement):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if other.algebra is not self.algebra:
            raise AlgebraMismatchError(self.algebra, other.algebra)
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.algebra, self.coeffs - other.coeffs)

    def __neg__(self):
        return AlgebraElement(self.algebra, -self.coeffs)

    def __mul__(self, scalar):
        if isinstance(scalar, AlgebraElement):
            return NotImplemented
        return AlgebraElement(self.algebra, self.coeffs * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return AlgebraElement(self.algebra, self.coeffs / scalar)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlgebraElement)
            and other.algebra is self.algebra
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def __repr__(self) -> str:
        terms = ", ".join(
            f"{label}={value!r}" for label, value in zip(BASIS_LABELS[self.algebra], self.coeffs.tolist())
        )
        return f"AlgebraElement({self.algebra.value}: {terms})"

    # -- realisations -----------------------------------------------------
    def to_polynomial(self) -> Polynomial:
        return Polynomial(
            {mono: float(c) for mono, c in zip(basis_monomials(self.algebra), self.coeffs)}
        )

    def max_abs_diff(self, other: AlgebraElement) -> float:
        self._check(other)
        return float(np.max(np.abs(self.coeffs - other.coeffs)))

    # -- serialization ------------------------------------------------------
    def to_record(self) -> dict:
        if self.algebra is SU2C:
            coeffs = [[float(c.real), float(c.imag)] for c in self.coeffs]
        else:
            coeffs = [float(c) for c in self.coeffs]
        return {"algebra": self.algebra.value, "coeffs": coeffs}

    @classmethod
    def from_record(cls, record: Mapping) -> AlgebraElement:
        algebra = AlgebraId.parse(record["algebra"])
        raw = record["coeffs"]
        if algebra is SU2C:
            coeffs = [complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c) for c in raw]
        else:
            coeffs = [float(c) for c in raw]
        return cls(algebra, np.array(coeffs))


def element(algebra, coeffs: Iterable) -> AlgebraElement:
    return AlgebraElement(AlgebraId.parse(algebra), np.asarray(list(coeffs)))


@dataclass(frozen=True, eq=False)
class StructureTable:
    """``[e_i, e_j] = sum_k constants[i, j, k] e_k``."""

    algebra: AlgebraId
    constants: np.ndarray


def _coefficients_in_basis(poly: Polynomial, algebra: AlgebraId) -> np.ndarray:
    monos = basis_monomials(algebra)
    leftover = set(poly.terms) - set(monos)
    if leftover:
        raise ArithmeticError(f"bracket leaves {algebra}: monomials {sorted(leftover)}")
    return np.array([poly.terms.get(m, 0.0) for m in monos])


def _project_su2(matrix: np.ndarray) -> np.ndarray:
    # the Sigma matrices are orthogonal with squared Frobenius norm 2
    return np.array([np.vdot(m, matrix) / 2 for m in SIGMA_MATRICES])


@functools.cache
def structure_table(algebra: AlgebraId | str) -> StructureTable:
    algebra = AlgebraId.parse(algebra)
    n = dimension(algebra)
    dtype = complex if algebra is SU2C else float
    c = np.zeros((n, n, n), dtype=dtype)
    for i, j in itertools.product(range(n), repeat=2):
        if algebra is SU2C:
            a, b = SIGMA_MATRICES[i], SIGMA_MATRICES[j]
            c[i, j] = _project_su2(a @ b - b @ a)
        else:
            fi = AlgebraElement.basis(algebra, i).to_polynomial()
            fj = AlgebraElement.basis(algebra, j).to_polynomial()
            c[i, j] = _coefficients_in_basis(jacobi_bracket(fi, fj), algebra)
    c.setflags(write=False)
    return StructureTable(algebra, c)


def _same_algebra(x: AlgebraElement, y: AlgebraElement) -> AlgebraId:
    if x.algebra is not y.algebra:
        raise AlgebraMismatchError(x.algebra, y.algebra)
    return x.algebra


def bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    algebra = _same_algebra(x, y)
    c = structure_table(algebra).constants
    return AlgebraElement(algebra, np.einsum("i,j,ijk->k", x.coeffs, y.coeffs, c))


def adjoint_matrix(x: AlgebraElement) -> np.ndarray:
    """Matrix of ``ad_x`` acting on coefficient column vectors."""
    c = structure_table(x.algebra).constants
    return np.einsum("i,ijk->kj", x.coeffs, c)


def killing_form(x: AlgebraElement, y: AlgebraElement):
    _same_algebra(x, y)
    value = np.trace(adjoint_matrix(x) @ adjoint_matrix(y))
    return complex(value) if x.algebra is SU2C else float(value)


def trace_distance(x: AlgebraElement, y: AlgebraElement) -> float:
    """Pseudo-distance ``b(x - y, x - y)**2`` built from the Killing form.

    Degenerate: it vanishes on the radical of the Killing form, e.g. on
    differences along the constant ``1`` in the contact algebras.
    """
    diff = x - y
    return float(abs(killing_form(diff, diff)) ** 2)
