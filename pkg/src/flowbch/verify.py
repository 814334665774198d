"""Randomized property suites behind ``flowbch verify``.

Every check draws from its own generator seeded by ``(seed, check name)`` so
reports are reproducible and checks are independent of one another.
"""

from __future__ import annotations

import itertools
import json
import math
import zlib
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterator

import numpy as np

from .bch import bch
from .algebra import (
    CHA,
    CONTACT_ALGEBRAS,
    HEISENBERG,
    POLYNOMIAL_ALGEBRAS,
    QCA,
    QSA,
    SU2C,
    AlgebraElement,
    AlgebraId,
    adjoint_matrix,
    bracket,
    dimension,
    killing_form,
)
from .errors import NumericDomainError
from .flows import (
    ContactState,
    composed_flow,
    contact_vector_field,
    exact_flow,
    exact_flow_array,
    field_function,
    jacobi_bracket_at,
    rk4_array,
    rk4_flow,
    state_kind,
)
from .oracle import (
    bch_matrix_oracle,
    dynkin_series,
    generator_extraction_oracle,
    matrix_exp,
    matrix_log,
    project,
    relative_error,
    represent,
    representation,
)
from .polynomial import Polynomial

SUITES = ("brackets", "flows", "bch", "representations")

ALL_ALGEBRAS = tuple(AlgebraId)


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = 42
    trials: int = 1000
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    samples: int


@dataclass
class SuiteReport:
    name: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def n_passed(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def n_failed(self) -> int:
        return len(self.checks) - self.n_passed

    @property
    def worst_margin(self) -> float:
        """Largest ``worst / tolerance`` over the suite; below 1 means all pass."""
        return max((c.worst / c.tolerance for c in self.checks), default=0.0)


# ---------------------------------------------------------------------------
# sampling


def check_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def random_element(rng: np.random.Generator, algebra: AlgebraId, scale: float = 2.0) -> AlgebraElement:
    n = dimension(algebra)
    coeffs = rng.uniform(-scale, scale, n)
    if algebra is SU2C:
        coeffs = coeffs + 1j * rng.uniform(-scale, scale, n) / 4
    return AlgebraElement(algebra, coeffs)


def random_state(rng: np.random.Generator, algebra: AlgebraId, scale: float = 1.0):
    kind = state_kind(algebra)
    if algebra is SU2C:
        return kind(*(rng.uniform(-scale, scale, 2) + 1j * rng.uniform(-scale, scale, 2)))
    n = 2 if algebra is QSA else 3
    return kind(*rng.uniform(-scale, scale, n))


def in_branch_pairs(
    rng: np.random.Generator,
    algebra: AlgebraId,
    count: int,
    reference: Callable,
    scale: float = 2.0,
    accept: Callable | None = None,
) -> Iterator[tuple[AlgebraElement, AlgebraElement, AlgebraElement, AlgebraElement]]:
    """Yield ``(A, B, closed_form, reference)`` for pairs where both evaluate.

    Pairs on which either route raises a numeric-domain error are outside the
    principal branch and are redrawn.
    """
    produced = attempts = 0
    while produced < count and attempts < 50 * count:
        attempts += 1
        A = random_element(rng, algebra, scale)
        B = random_element(rng, algebra, scale)
        if accept is not None and not accept(A, B):
            continue
        try:
            Z = bch(A, B)
            R = reference(A, B)
        except NumericDomainError:
            continue
        produced += 1
        yield A, B, Z, R


# ---------------------------------------------------------------------------
# check helpers


class _Checks:
    def __init__(self, config: VerifyConfig, report: SuiteReport):
        self.config = config
        self.report = report

    def rng(self, name: str) -> np.random.Generator:
        return check_rng(self.config.seed, f"{self.report.name}.{name}")

    def record(self, name: str, residuals, tolerance: float) -> None:
        residuals = list(residuals)
        worst = max(residuals, default=0.0)
        passed = bool(np.isfinite(worst)) and worst <= tolerance and len(residuals) > 0
        self.report.checks.append(CheckResult(name, passed, float(worst), tolerance, len(residuals)))


def _max_abs(x) -> float:
    return float(np.max(np.abs(x)))


# ---------------------------------------------------------------------------
# brackets


def _suite_brackets(c: _Checks) -> None:
    n = c.config.trials
    n_small = min(n, 100)
    for algebra in ALL_ALGEBRAS:
        rng = c.rng(f"antisymmetry.{algebra}")
        res = []
        for _ in range(n):
            x, y = random_element(rng, algebra), random_element(rng, algebra)
            res.append(_max_abs((bracket(x, y) + bracket(y, x)).coeffs))
        c.record(f"antisymmetry[{algebra}]", res, 1e-12)

        basis = [AlgebraElement.basis(algebra, i) for i in range(dimension(algebra))]
        res = []
        for x, y, z in itertools.product(basis, repeat=3):
            total = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y))
            res.append(_max_abs(total.coeffs))
        c.record(f"jacobi_identity[{algebra}]", res, 1e-12)

        rng = c.rng(f"adjoint.{algebra}")
        res = []
        for _ in range(n_small):
            x, y = random_element(rng, algebra), random_element(rng, algebra)
            ax, ay = adjoint_matrix(x), adjoint_matrix(y)
            res.append(_max_abs(adjoint_matrix(bracket(x, y)) - (ax @ ay - ay @ ax)))
        c.record(f"adjoint_homomorphism[{algebra}]", res, 1e-12)

        rng = c.rng(f"killing.{algebra}")
        res = []
        for _ in range(n_small):
            x, y, z = (random_element(rng, algebra) for _ in range(3))
            res.append(abs(killing_form(bracket(z, x), y) + killing_form(x, bracket(z, y))))
        c.record(f"killing_invariance[{algebra}]", res, 1e-10)

    for algebra in POLYNOMIAL_ALGEBRAS:
        rng = c.rng(f"position.{algebra}")
        basis = [AlgebraElement.basis(algebra, i) for i in range(dimension(algebra))]
        res = []
        for _ in range(n_small):
            x = ContactState(*rng.uniform(-2, 2, 3))
            for ei, ej in itertools.product(basis, repeat=2):
                expected = bracket(ei, ej).to_polynomial()(x.q, x.p, x.s)
                res.append(abs(jacobi_bracket_at(ei, ej, x) - expected))
        c.record(f"structure_constants_position_independent[{algebra}]", res, 1e-10)

    rng = c.rng("leibniz")
    one = Polynomial.constant(1.0)
    res = []
    for _ in range(n_small):
        f, g, h = (random_element(rng, QCA).to_polynomial() for _ in range(3))
        x = ContactState(*rng.uniform(-2, 2, 3))
        gx, hx = g(x.q, x.p, x.s), h(x.q, x.p, x.s)
        lhs = jacobi_bracket_at(f, g * h, x)
        # the anomaly term is g h {1, f} = -g h {f, 1}
        rhs = (
            gx * jacobi_bracket_at(f, h, x)
            + hx * jacobi_bracket_at(f, g, x)
            + gx * hx * jacobi_bracket_at(one, f, x)
        )
        res.append(abs(lhs - rhs))
    c.record("leibniz_anomaly[qca]", res, 1e-10)


# ---------------------------------------------------------------------------
# flows


def exact_vs_rk4_residuals(rng, algebra: AlgebraId, count: int, t: float = 1.0, n_steps: int = 10_000):
    """Scaled discrepancy ``max|exact - rk4| / max(1, max|exact|)`` per Hamiltonian."""
    hams = [random_element(rng, algebra) for _ in range(count)]
    states = [random_state(rng, algebra) for _ in range(count)]
    y0 = np.stack([s.to_array() for s in states])
    coeffs = np.stack([H.coeffs for H in hams])
    numeric = rk4_array(field_function(algebra), coeffs, y0, t, n_steps)
    residuals = []
    for H, y, r in zip(hams, y0, numeric):
        e = exact_flow_array(H, y, t)
        residuals.append(_max_abs(e - r) / max(1.0, _max_abs(e)))
    return residuals


def _finite_difference_commutator(F: AlgebraElement, G: AlgebraElement, x: np.ndarray, h: float = 1e-5):
    """``[X_F, X_G]^i = X_F^j d_j X_G^i - X_G^j d_j X_F^i`` by central differences."""

    def field(H, y):
        return contact_vector_field(H, ContactState(*y)).to_array()

    def jac(H):
        cols = []
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            cols.append((field(H, x + e) - field(H, x - e)) / (2 * h))
        return np.stack(cols, axis=1)

    return jac(G) @ field(F, x) - jac(F) @ field(G, x)


def rk4_convergence_order(H: AlgebraElement, x0: ContactState, steps=(10, 20, 40, 80), t: float = 1.0):
    """Least-squares slope of ``log(error)`` against ``log(n_steps)``, negated."""
    exact = exact_flow(H, x0, t).to_array()
    errors = [_max_abs(rk4_flow(H, x0, t, n).to_array() - exact) for n in steps]
    slope = np.polyfit(np.log(steps), np.log(errors), 1)[0]
    return -slope, errors


def _suite_flows(c: _Checks) -> None:
    n_small = min(c.config.trials, 100)
    for algebra in ALL_ALGEBRAS:
        rng = c.rng(f"rk4.{algebra}")
        c.record(f"exact_vs_rk4[{algebra}]", exact_vs_rk4_residuals(rng, algebra, n_small), 1e-8)

        rng = c.rng(f"group.{algebra}")
        res = []
        for _ in range(n_small):
            H, x = random_element(rng, algebra), random_state(rng, algebra)
            t1, t2 = rng.uniform(-1, 1, 2)
            lhs = exact_flow(H, exact_flow(H, x, t1), t2).to_array()
            rhs = exact_flow(H, x, t1 + t2).to_array()
            res.append(_max_abs(lhs - rhs) / max(1.0, _max_abs(rhs)))
        c.record(f"group_property[{algebra}]", res, 1e-10)

    for algebra in (CHA, QCA):
        rng = c.rng(f"decay.{algebra}")
        res = []
        for _ in range(n_small):
            H, x = random_element(rng, algebra), random_state(rng, algebra)
            rate = H["s"]
            poly = H.to_polynomial()
            h0 = poly(x.q, x.p, x.s)
            for t in (0.5, 1.0, 2.0):
                xt = exact_flow(H, x, t)
                expected = h0 * math.exp(-rate * t)
                res.append(abs(poly(xt.q, xt.p, xt.s) - expected) / max(1.0, abs(expected)))
        c.record(f"hamiltonian_decay_law[{algebra}]", res, 1e-9)

    for algebra in CONTACT_ALGEBRAS:
        rng = c.rng(f"commutator.{algebra}")
        basis = [AlgebraElement.basis(algebra, i) for i in range(dimension(algebra))]
        res = []
        for _ in range(max(1, n_small // 10)):
            x = rng.uniform(-1, 1, 3)
            for F, G in itertools.product(basis, repeat=2):
                expected = contact_vector_field(bracket(F, G), ContactState(*x)).to_array()
                # X_{F,G} = [X_G, X_F]
                res.append(_max_abs(_finite_difference_commutator(G, F, x) - expected))
        c.record(f"vector_field_bracket_compatibility[{algebra}]", res, 1e-6)

    H = AlgebraElement(CHA, np.array([1.0, 1.0, 1.0, 0.0]))
    order, _ = rk4_convergence_order(H, ContactState(0.3, -0.2, 0.1))
    c.record("rk4_convergence_order[cha q+p+s]", [abs(order - 4.0)], 0.3)

    rng = c.rng("heisenberg_limit")
    res = []
    for _ in range(n_small):
        a, b, z = rng.uniform(-2, 2, 3)
        x = random_state(rng, CHA)
        cha = exact_flow(AlgebraElement(CHA, np.array([a, b, 1e-12, z])), x, 1.0).to_array()
        heis = exact_flow(AlgebraElement(HEISENBERG, np.array([a, b, z])), x, 1.0).to_array()
        res.append(_max_abs(cha - heis) / max(1.0, _max_abs(heis)))
    c.record("small_damping_limit[cha->heisenberg]", res, 1e-9)


# ---------------------------------------------------------------------------
# closed forms


def _bch_reference(algebra: AlgebraId):
    if algebra is QCA:
        return generator_extraction_oracle
    return bch_matrix_oracle


def series_ratio(A: AlgebraElement, B: AlgebraElement, eps=(0.1, 0.05)):
    """Truncation errors of the order-4 series at two scales and their ratio."""
    errors = [
        _max_abs((bch(A * e, B * e) - dynkin_series(A * e, B * e, 4)).coeffs) for e in eps
    ]
    ratio = errors[0] / errors[1] if errors[1] > 0 else math.inf
    return errors, ratio


def _suite_bch(c: _Checks) -> None:
    n = c.config.trials
    tol = c.config.tolerance
    for algebra in ALL_ALGEBRAS:
        rng = c.rng(f"oracle.{algebra}")
        ref = _bch_reference(algebra)
        res = [relative_error(Z, R) for _, _, Z, R in in_branch_pairs(rng, algebra, n, ref)]
        label = "generator_extraction" if algebra is QCA else "matrix"
        c.record(f"closed_form_vs_{label}_oracle[{algebra}]", res, tol)

        rng = c.rng(f"flow_identity.{algebra}")
        res = []
        for A, B, Z, _ in in_branch_pairs(rng, algebra, 20, lambda A, B: None, scale=1.0):
            x = random_state(rng, algebra)
            res.append(_max_abs(exact_flow(Z, x, 1.0).to_array() - composed_flow(A, B, x).to_array()))
        c.record(f"flow_identity[{algebra}]", res, 1e-8)

        rng = c.rng(f"inverse.{algebra}")
        res = []
        for A, B, _, _ in in_branch_pairs(rng, algebra, min(n, 200), lambda A, B: None, scale=1.0):
            try:
                lhs, rhs = bch(B, A), -bch(-A, -B)
            except NumericDomainError:
                continue
            res.append(_max_abs((lhs - rhs).coeffs))
        c.record(f"group_inverse_symmetry[{algebra}]", res, 1e-10)

        rng = c.rng(f"series.{algebra}")
        res = []
        for _ in range(20):
            A, B = random_element(rng, algebra, 1.0), random_element(rng, algebra, 1.0)
            errors, ratio = series_ratio(A, B)
            if max(errors) < 1e-13:
                res.append(0.0)  # series exact, as for Heisenberg
            else:
                res.append(abs(ratio / 32.0 - 1.0))
        c.record(f"order4_series_ratio[{algebra}]", res, 0.3)

    rng = c.rng("oracles_cross")
    res = [
        relative_error(R, generator_extraction_oracle(A, B))
        for A, B, _, R in in_branch_pairs(rng, CHA, min(n, 200), bch_matrix_oracle)
    ]
    c.record("matrix_vs_generator_extraction[cha]", res, tol)

    rng = c.rng("qca_small_matrix")
    res = [
        relative_error(Z, R)
        for _, _, Z, R in in_branch_pairs(rng, QCA, min(n, 200), bch_matrix_oracle, scale=0.3)
    ]
    c.record("closed_form_vs_adjoint_matrix_oracle[qca small]", res, tol)


# ---------------------------------------------------------------------------
# representations


def _suite_representations(c: _Checks) -> None:
    n = c.config.trials
    n_small = min(n, 100)
    for algebra in ALL_ALGEBRAS:
        rep = representation(algebra)
        basis = [AlgebraElement.basis(algebra, i) for i in range(dimension(algebra))]
        res = []
        for x, y in itertools.product(basis, repeat=2):
            X, Y = represent(x), represent(y)
            res.append(_max_abs(represent(bracket(x, y)) - (X @ Y - Y @ X)))
        c.record(f"representation_homomorphism[{algebra}]", res, 1e-12)

        flat = rep.flattened()
        sv = np.linalg.svd(flat, compute_uv=False)
        # faithful iff the flattened images have full column rank
        c.record(f"representation_condition_number[{algebra}]", [float(sv[0] / sv[-1])], 1e3)

        rng = c.rng(f"project.{algebra}")
        res = []
        for _ in range(n_small):
            x = random_element(rng, algebra)
            res.append(x.max_abs_diff(project(represent(x), algebra)))
        c.record(f"project_left_inverse[{algebra}]", res, 1e-12)

    rng = c.rng("exp_inverse")
    res = []
    for _ in range(n_small):
        dim = int(rng.integers(2, 6))
        M = rng.normal(size=(dim, dim))
        M *= rng.uniform(0, 2) / np.linalg.norm(M, 2)
        res.append(_max_abs(matrix_exp(M) @ matrix_exp(-M) - np.eye(dim)))
    c.record("matrix_exp_inverse", res, 1e-12)

    rng = c.rng("log_roundtrip")
    res = []
    for _ in range(n_small):
        dim = int(rng.integers(2, 6))
        M = rng.normal(size=(dim, dim))
        M *= rng.uniform(0, 1.5) / np.linalg.norm(M, 2)
        E = matrix_exp(M)
        res.append(_max_abs(matrix_exp(matrix_log(E)) - E))
    c.record("matrix_log_roundtrip", res, 1e-10)


_RUNNERS = {
    "brackets": _suite_brackets,
    "flows": _suite_flows,
    "bch": _suite_bch,
    "representations": _suite_representations,
}


def run_suite(name: str, config: VerifyConfig = VerifyConfig()) -> SuiteReport:
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES + ('all',)}")
    report = SuiteReport(name)
    with np.errstate(all="ignore"):
        _RUNNERS[name](_Checks(config, report))
    return report


def run(suite: str = "all", config: VerifyConfig = VerifyConfig()) -> list[SuiteReport]:
    names = SUITES if suite == "all" else (suite,)
    return [run_suite(name, config) for name in names]


def all_passed(reports: list[SuiteReport]) -> bool:
    return all(r.n_failed == 0 for r in reports)


def format_plain(reports: list[SuiteReport]) -> str:
    lines = []
    for r in reports:
        lines.append(f"suite {r.name}")
        for chk in r.checks:
            status = "PASS" if chk.passed else "FAIL"
            lines.append(
                f"  {status}  {chk.name:<56} worst={chk.worst:.3e} tol={chk.tolerance:.1e} n={chk.samples}"
            )
        lines.append(
            f"  summary: {r.n_passed} passed, {r.n_failed} failed, worst residual/tolerance {r.worst_margin:.3e}"
        )
    lines.append(f"overall: {'PASS' if all_passed(reports) else 'FAIL'}")
    return "\n".join(lines) + "\n"


def format_json(reports: list[SuiteReport]) -> str:
    payload = {
        "suites": [
            {
                "name": r.name,
                "passed": r.n_passed,
                "failed": r.n_failed,
                "worst_margin": r.worst_margin,
                "checks": [asdict(chk) for chk in r.checks],
            }
            for r in reports
        ],
        "passed": all_passed(reports),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def format_csv(reports: list[SuiteReport]) -> str:
    lines = ["suite,check,status,worst,tolerance,samples"]
    for r in reports:
        for chk in r.checks:
            status = "pass" if chk.passed else "fail"
            lines.append(
                f'{r.name},"{chk.name}",{status},{chk.worst:.17g},{chk.tolerance:.17g},{chk.samples}'
            )
    return "\n".join(lines) + "\n"
