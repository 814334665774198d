"""Contact splitting integrators for the damped harmonic oscillator.

The Hamiltonian ``H = p^2/(2m) + k q^2/2 + gamma s`` splits into three exactly
solvable pieces ``T``, ``V``, ``C``.  A permutation such as ``"TVC"`` denotes
the one-step map ``e^{tau T} e^{tau V} e^{tau C}``, so the flow of ``C`` is
applied first and that of ``T`` last.  Its modified Hamiltonian is obtained by
two nested BCH compositions in the quadratic contact algebra.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from itertools import permutations as _permutations
from typing import Iterable, Sequence, TextIO

import numpy as np

from .algebra import QCA, QSA, AlgebraElement, trace_distance
from .bch import bch_product, bch_quadratic_symplectic, hamiltonian_matrix
from .errors import BranchError, NumericDomainError
from .flows import ContactState, SymplecticState, exact_flow, exact_flow_array

PERMUTATIONS: tuple[str, ...] = tuple("".join(p) for p in _permutations("TVC"))
CSV_HEADER = ("perm", "gamma", "tau", "a", "b", "c", "d", "distance", "status")


@dataclass(frozen=True)
class OscillatorParams:
    m: float = 1.0
    k: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        if not (self.m > 0 and self.k > 0):
            raise ValueError("mass and stiffness must be positive")
        if not self.gamma >= 0:
            raise ValueError("damping rate must be non-negative")

    def pieces(self) -> dict[str, AlgebraElement]:
        return {
            "T": AlgebraElement.from_terms(QCA, p2=1 / (2 * self.m)),
            "V": AlgebraElement.from_terms(QCA, q2=self.k / 2),
            "C": AlgebraElement.from_terms(QCA, s=self.gamma),
        }

    def hamiltonian(self) -> AlgebraElement:
        return AlgebraElement.from_terms(
            QCA, q2=self.k / 2, p2=1 / (2 * self.m), s=self.gamma
        )


@dataclass(frozen=True)
class IntegratorSpec:
    permutation: str
    tau: float
    params: OscillatorParams = field(default_factory=OscillatorParams)
    order: int = 1

    def __post_init__(self):
        perm = self.permutation.upper()
        if perm not in PERMUTATIONS:
            raise ValueError(f"unknown permutation {self.permutation!r}; expected one of {PERMUTATIONS}")
        object.__setattr__(self, "permutation", perm)
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")

    def factors(self) -> list[AlgebraElement]:
        """Exponents of the one-step product, leftmost (applied last) first."""
        pieces = self.params.pieces()
        h1, h2, h3 = (pieces[name] for name in self.permutation)
        tau = self.tau
        if self.order == 1:
            return [h1 * tau, h2 * tau, h3 * tau]
        half = tau / 2
        return [h1 * half, h2 * half, h3 * tau, h2 * half, h1 * half]


def splitting_map(spec: IntegratorSpec, x0: ContactState) -> ContactState:
    """One step of the splitting integrator, built from exact sub-flows."""
    x = x0
    for factor in reversed(spec.factors()):
        x = exact_flow(factor, x, 1.0)
    return x


def splitting_map_array(spec: IntegratorSpec, y: np.ndarray) -> np.ndarray:
    for factor in reversed(spec.factors()):
        y = exact_flow_array(factor, y, 1.0)
    return y


def modified_hamiltonian(spec: IntegratorSpec) -> AlgebraElement:
    """``H~`` with ``exp(tau X_H~)`` equal to one step of ``spec``.

    The ``s`` coefficients add exactly under composition, so the ``s`` entry
    is set to ``gamma`` rather than carrying ``(gamma tau) / tau`` round-off.
    """
    try:
        Z = bch_product(spec.factors())
    except BranchError as exc:
        raise BranchError(f"timestep outside convergence region: tau = {spec.tau} ({exc})") from exc
    coeffs = np.array(Z.coeffs / spec.tau)
    coeffs[3] = spec.params.gamma
    return AlgebraElement(QCA, coeffs)


# ---------------------------------------------------------------------------
# symplectic oscillator


def symplectic_euler_matrix(tau: float) -> np.ndarray:
    """Kick by ``V`` then drift by ``T`` for ``m = k = 1``."""
    return np.array([[1 - tau * tau, tau], [-tau, 1.0]])


def reference_frequency(tau: float) -> float:
    """``2 arccos(1 - tau^2/2) / (tau sqrt(4 - tau^2))``, the diagnostic comparison scale."""
    # arccos(1 - tau^2/2) = 2 arcsin(tau/2) without the cancellation at small tau
    return 4 * math.asin(tau / 2) / (tau * math.sqrt(4 - tau * tau))


@dataclass(frozen=True)
class SymplecticModifiedHamiltonian:
    tau: float
    a: float
    b: float
    c: float
    residual: float
    reference_ratio: float

    def element(self) -> AlgebraElement:
        return AlgebraElement(QSA, np.array([self.a, self.b, self.c]))


def ho_modified_hamiltonian_symplectic(tau: float) -> SymplecticModifiedHamiltonian:
    """Modified Hamiltonian ``a q^2 + b p^2 + c qp`` of ``e^{tau T} e^{tau V}``, ``m = k = 1``.

    ``residual`` is the max-entry mismatch between the time-``tau`` flow of
    the result and the one-step matrix; ``reference_ratio`` is ``a`` divided by
    :func:`reference_frequency`.
    """
    if not 0 < tau < 2:
        raise BranchError(f"tau = {tau}: outside arccos domain (0, 2)")
    T = AlgebraElement.from_terms(QSA, p2=0.5)
    V = AlgebraElement.from_terms(QSA, q2=0.5)
    Z = bch_quadratic_symplectic(T * tau, V * tau) / tau
    a, b, c = (float(v) for v in Z.coeffs)
    columns = [exact_flow(Z, SymplecticState(*e), tau).to_array() for e in np.eye(2)]
    residual = float(np.max(np.abs(np.stack(columns, axis=1) - symplectic_euler_matrix(tau))))
    return SymplecticModifiedHamiltonian(tau, a, b, c, residual, a / reference_frequency(tau))


# ---------------------------------------------------------------------------
# distance sweeps


@dataclass(frozen=True)
class SweepRecord:
    permutation: str
    gamma: float
    tau: float
    a_coeff: float
    b_coeff: float
    c_coeff: float
    d_coeff: float
    distance: float
    status: str = "ok"

    def row(self) -> list[str]:
        numbers = (self.gamma, self.tau, self.a_coeff, self.b_coeff, self.c_coeff, self.d_coeff, self.distance)
        return [self.permutation, *("%.17g" % v for v in numbers), self.status]


def default_tau_grid(n_points: int = 200, tau_min: float = 1e-2, tau_max: float = 1.0) -> np.ndarray:
    if not (0 < tau_min <= tau_max) or n_points < 1:
        raise ValueError("tau range must be positive with tau_min <= tau_max")
    return np.geomspace(tau_min, tau_max, n_points)


def sweep_record(perm: str, gamma: float, tau: float, order: int = 1) -> SweepRecord:
    params = OscillatorParams(gamma=gamma)
    try:
        H = modified_hamiltonian(IntegratorSpec(perm, tau, params, order))
    except NumericDomainError as exc:
        nan = math.nan
        return SweepRecord(perm, gamma, tau, nan, nan, nan, nan, nan, f"error: {exc}")
    a, b, c, d, _ = (float(v) for v in H.coeffs)
    return SweepRecord(perm, gamma, tau, a, b, c, d, trace_distance(params.hamiltonian(), H))


def distance_sweep(
    gammas: Iterable[float] = (0.5, 2.0, 4.0),
    tau_grid: Iterable[float] | None = None,
    perms: Sequence[str] = PERMUTATIONS,
    order: int = 1,
) -> list[SweepRecord]:
    """One record per (perm, gamma, tau), sorted by (gamma, tau, perm)."""
    taus = default_tau_grid() if tau_grid is None else tau_grid
    records = [
        sweep_record(perm.upper(), float(g), float(t), order)
        for g in gammas
        for t in taus
        for perm in perms
    ]
    records.sort(key=lambda r: (r.gamma, r.tau, r.permutation))
    return records


def write_sweep_csv(records: Iterable[SweepRecord], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for record in records:
        writer.writerow(record.row())


def sweep_csv_text(records: Iterable[SweepRecord]) -> str:
    buffer = io.StringIO()
    write_sweep_csv(records, buffer)
    return buffer.getvalue()


def minimal_distance_counts(records: Iterable[SweepRecord]) -> dict[float, dict[str, int]]:
    """For each gamma, how many tau values each permutation wins."""
    best: dict[tuple[float, float], SweepRecord] = {}
    for r in records:
        if r.status != "ok":
            continue
        key = (r.gamma, r.tau)
        if key not in best or r.distance < best[key].distance:
            best[key] = r
    counts: dict[float, dict[str, int]] = {}
    for (gamma, _), r in sorted(best.items()):
        counts.setdefault(gamma, {}).setdefault(r.permutation, 0)
        counts[gamma][r.permutation] += 1
    return counts


def minimal_distance_summary(records: Iterable[SweepRecord]) -> dict[float, tuple[str, float]]:
    """Winning permutation per gamma and its share of grid points."""
    summary = {}
    for gamma, counts in minimal_distance_counts(records).items():
        perm = max(sorted(counts), key=counts.get)
        summary[gamma] = (perm, counts[perm] / sum(counts.values()))
    return summary


def cyclic_classes() -> list[tuple[str, str, str]]:
    """Permutations related by cyclic rotation (conjugate one-step maps)."""
    classes = []
    for start in ("TVC", "TCV"):
        classes.append(tuple(start[i:] + start[:i] for i in range(3)))
    return classes


def block_determinant(H: AlgebraElement) -> float:
    """Determinant of the shifted ``(q, p)`` Hamiltonian matrix of a QCA element."""
    a, b, c, d, _ = H.coeffs
    M = hamiltonian_matrix(a, b, c + d / 2)
    return float(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
