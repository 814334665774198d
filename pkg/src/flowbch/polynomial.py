"""Polynomials in the canonical contact coordinates (q, p, s).

Only what the bracket machinery needs: exact arithmetic on monomial
dictionaries, partial derivatives, and pointwise evaluation that broadcasts
over numpy arrays.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Mapping

import numpy as np

Monomial = tuple[int, int, int]  # exponents of (q, p, s)

_AXIS = {"q": 0, "p": 1, "s": 2}


class Polynomial:
    """Real polynomial ``sum c * q**i * p**j * s**k`` stored as ``{(i, j, k): c}``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, float] | None = None):
        clean = {}
        for mono, coeff in (terms or {}).items():
            if coeff != 0:
                clean[tuple(int(e) for e in mono)] = coeff
        self.terms: dict[Monomial, float] = clean

    @classmethod
    def monomial(cls, mono: Monomial, coeff: float = 1.0) -> Polynomial:
        return cls({mono: coeff})

    @classmethod
    def constant(cls, value: float) -> Polynomial:
        return cls({(0, 0, 0): value})

    def __add__(self, other: Polynomial) -> Polynomial:
        out = defaultdict(float, self.terms)
        for mono, coeff in other.terms.items():
            out[mono] += coeff
        return Polynomial(out)

    def __neg__(self) -> Polynomial:
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other) -> Polynomial:
        if not isinstance(other, Polynomial):
            return Polynomial({m: c * other for m, c in self.terms.items()})
        out = defaultdict(float)
        for (i1, j1, k1), c1 in self.terms.items():
            for (i2, j2, k2), c2 in other.terms.items():
                out[(i1 + i2, j1 + j2, k1 + k2)] += c1 * c2
        return Polynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"Polynomial({self.terms!r})"

    def diff(self, var: str) -> Polynomial:
        axis = _AXIS[var]
        out = {}
        for mono, coeff in self.terms.items():
            e = mono[axis]
            if e == 0:
                continue
            lowered = list(mono)
            lowered[axis] -= 1
            out[tuple(lowered)] = coeff * e
        return Polynomial(out)

    def __call__(self, q, p, s=0.0):
        q, p, s = np.asarray(q, float), np.asarray(p, float), np.asarray(s, float)
        total = np.zeros(np.broadcast(q, p, s).shape)
        for (i, j, k), coeff in self.terms.items():
            total = total + coeff * q**i * p**j * s**k
        return total if total.ndim else float(total)

    def value_and_gradient(self, q, p, s=0.0):
        """Return ``(f, df/dq, df/dp, df/ds)`` at the given point(s)."""
        return (
            self(q, p, s),
            self.diff("q")(q, p, s),
            self.diff("p")(q, p, s),
            self.diff("s")(q, p, s),
        )


def jacobi_bracket(f: Polynomial, g: Polynomial) -> Polynomial:
    """Coordinate Jacobi bracket of two polynomials, computed exactly.

    ``{f,g} = (f g_s - g f_s) + p (f_s g_p - g_s f_p) + (f_q g_p - g_q f_p)``
    """
    p = Polynomial.monomial((0, 1, 0))
    fq, fp, fs = f.diff("q"), f.diff("p"), f.diff("s")
    gq, gp, gs = g.diff("q"), g.diff("p"), g.diff("s")
    return (f * gs - g * fs) + p * (fs * gp - gs * fp) + (fq * gp - gq * fp)


def jacobi_bracket_values(f_vals, g_vals, p):
    """Pointwise Jacobi bracket from ``(value, d/dq, d/dp, d/ds)`` tuples."""
    f, fq, fp, fs = f_vals
    g, gq, gp, gs = g_vals
    return (f * gs - g * fs) + p * (fs * gp - gs * fp) + (fq * gp - gq * fp)
