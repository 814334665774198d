import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowbch.algebra import CHA, HEISENBERG, QCA, QSA, SU2C, AlgebraElement, AlgebraId, dimension
from flowbch.bch import (
    Regime,
    bch,
    bch_contact_heisenberg,
    bch_heisenberg,
    bch_product,
    bch_quadratic_contact,
    bch_quadratic_symplectic,
    bch_su2c,
    branch_g,
    classify_branch,
    compose_quadratic,
    decay_phi,
    decay_psi,
    entire_C,
    entire_S,
    entire_T,
    hamiltonian_matrix,
    quadratic_to_su2,
    su2_matrix,
    su2_to_quadratic,
)
from flowbch.errors import AlgebraMismatchError, BranchError
from flowbch.oracle import bch_matrix_oracle, dynkin_series, matrix_exp
from flowbch.verify import random_element, series_ratio


def E(alg, **terms):
    return AlgebraElement.from_terms(alg, **terms)


class TestKernels:
    def test_limits(self):
        assert entire_C(0.0) == 1 and entire_S(0.0) == 1
        assert entire_C(math.pi**2) == pytest.approx(-1, abs=1e-15)
        assert entire_S(math.pi**2) == pytest.approx(0, abs=1e-15)
        assert entire_C(-1.0) == pytest.approx(math.cosh(1))
        assert entire_S(-4.0) == pytest.approx(math.sinh(2) / 2)

    @pytest.mark.parametrize("d0", [1e-6, -1e-6])
    def test_smooth_across_series_switch(self, d0):
        below = entire_S(d0 * (1 - 1e-9))
        above = entire_S(d0 * (1 + 1e-9))
        assert abs(below - above) < 1e-13
        exact = math.sin(math.sqrt(d0)) / math.sqrt(d0) if d0 > 0 else math.sinh(math.sqrt(-d0)) / math.sqrt(-d0)
        assert below == pytest.approx(exact, rel=1e-14)

    def test_complex_matches_real(self):
        for d in (2.3, -1.7, 5e-7):
            assert abs(entire_C(complex(d)) - entire_C(d)) < 1e-14
            assert abs(entire_S(complex(d)) - entire_S(d)) < 1e-14

    def test_traceless_exponential(self, rng):
        for _ in range(100):
            a, b, c = rng.uniform(-2, 2, 3)
            M = hamiltonian_matrix(a, b, c)
            d = float(np.linalg.det(M))
            closed = entire_C(d) * np.eye(2) + entire_S(d) * M
            assert np.max(np.abs(closed - matrix_exp(M))) <= 1e-12 * max(1, np.max(np.abs(closed)))

    @pytest.mark.parametrize("x", [1e-9, 1e-6, 1e-3, 0.04, 0.06, 0.09, 0.11, 1.0, -0.5, -3.0, 20.0])
    def test_decay_kernels(self, x):
        assert decay_phi(x) == pytest.approx(-math.expm1(-x) / x, rel=1e-12)
        if abs(x) > 1e-4:
            assert decay_psi(x) == pytest.approx((x - 1 + math.exp(-x)) / x**2, rel=1e-7)
        assert decay_phi(x) == pytest.approx(_integral(lambda u: math.exp(-x * (1 - u))), rel=1e-10)
        assert decay_psi(x) == pytest.approx(_integral(lambda u: u * math.exp(-x * (1 - u))), rel=1e-10)

    @pytest.mark.parametrize("y", [1e-8, 0.05, 0.099, 0.101, 2.0, -3.0, 40.0])
    def test_entire_T(self, y):
        assert entire_T(y) == pytest.approx((1 - entire_S(y)) / y, rel=1e-7)
        if abs(y) < 0.11:
            assert entire_T(y) == pytest.approx(1 / 6 - y / 120 + y * y / 5040 - y**3 / 362880, rel=1e-9)

    def test_branch_g_values(self):
        assert branch_g(1.0) == 1
        assert branch_g(math.cosh(1)) == pytest.approx(1 / math.sinh(1), rel=1e-14)
        assert branch_g(0.0) == pytest.approx(math.pi / 2, rel=1e-15)
        assert branch_g(1 + 5e-9) == pytest.approx(math.acosh(1 + 5e-9) / math.sqrt((5e-9) * (2 + 5e-9)), rel=1e-8)

    def test_branch_g_continuous_at_one(self):
        for eps in (1e-8, 1e-7, 1e-5):
            assert branch_g(1 + eps) == pytest.approx(1 - eps / 3, rel=1e-9)
            assert branch_g(1 - eps) == pytest.approx(1 + eps / 3, rel=1e-9)

    def test_branch_g_cut(self):
        for x in (-1.0, -2.0, complex(-1.5, 0)):
            with pytest.raises(BranchError, match="outside principal branch"):
                branch_g(x)

    def test_branch_g_complex(self):
        z = 0.3 + 0.4j
        theta = cmath.acos(z)
        assert abs(branch_g(z) - theta / cmath.sin(theta)) < 1e-15

    def test_regimes(self):
        assert classify_branch(2.0).regime is Regime.HYPERBOLIC
        assert classify_branch(0.5).regime is Regime.ELLIPTIC
        assert classify_branch(1 + 1e-10).regime is Regime.PARABOLIC
        assert classify_branch(-1.0).regime is Regime.OUT_OF_IMAGE


class TestHeisenberg:
    def test_example(self):
        Z = bch_heisenberg(AlgebraElement(HEISENBERG, [1, 2, 0]), AlgebraElement(HEISENBERG, [3, -1, 0]))
        # convention log(e^A e^B): zeta = (a b' - a' b) / 2 = (1*(-1) - 3*2) / 2
        assert Z == AlgebraElement(HEISENBERG, [4, 1, -3.5])

    def test_identities(self, rng):
        A = AlgebraElement(HEISENBERG, rng.uniform(-2, 2, 3))
        assert bch_heisenberg(A, AlgebraElement.zero(HEISENBERG)) == A
        assert bch_heisenberg(A, A).max_abs_diff(2 * A) == 0

    def test_mismatch(self):
        with pytest.raises(AlgebraMismatchError):
            bch_heisenberg(E(HEISENBERG, q=1), E(CHA, q=1))


class TestContactHeisenberg:
    def test_gamma_adds(self):
        Z = bch_contact_heisenberg(E(CHA, s=1), E(CHA, s=2))
        assert Z["s"] == 3

    def test_small_damping_limit(self, rng):
        for _ in range(20):
            a, b = rng.uniform(-2, 2, 3), rng.uniform(-2, 2, 3)
            Z = bch_contact_heisenberg(
                AlgebraElement(CHA, [a[0], a[1], 1e-10, a[2]]), AlgebraElement(CHA, [b[0], b[1], 1e-10, b[2]])
            )
            H = bch_heisenberg(AlgebraElement(HEISENBERG, a), AlgebraElement(HEISENBERG, b))
            assert np.max(np.abs(Z.coeffs[[0, 1, 3]] - H.coeffs)) <= 1e-8

    def test_argument_order_matters(self):
        A, B = E(CHA, q=1, s=1), E(CHA, p=1, one=2)
        assert bch(A, B).max_abs_diff(bch(B, A)) > 0.1


class TestQuadraticSymplectic:
    def test_spot_value(self):
        Z = bch_quadratic_symplectic(E(QSA, qp=1), E(QSA, q2=1))
        assert Z.max_abs_diff(E(QSA, qp=1, q2=2 / (math.e**2 - 1))) <= 1e-12

    def test_identities(self, rng):
        for _ in range(20):
            A = random_element(rng, QSA, 1.0)
            assert bch_quadratic_symplectic(A, AlgebraElement.zero(QSA)).max_abs_diff(A) <= 1e-14
            if 4 * np.linalg.det(hamiltonian_matrix(*A.coeffs)) >= math.pi**2:
                continue  # e^{2A} leaves the principal branch
            Z = bch_quadratic_symplectic(A, A)
            assert Z.max_abs_diff(2 * A) <= 1e-10

    def test_outside_image(self):
        # a quarter-period rotation squared is minus the identity
        r = math.pi / 4
        A = E(QSA, q2=r, p2=r)
        with pytest.raises(BranchError, match="not in exponential image"):
            bch_quadratic_symplectic(A, A)

    def test_decomposition_identity(self, rng):
        from flowbch.bch import _J, _product_decomposition

        for _ in range(10):
            x, y = rng.uniform(-2, 2, 3), rng.uniform(-2, 2, 3)
            lam, S = _product_decomposition(x, y)
            AB = hamiltonian_matrix(*x) @ hamiltonian_matrix(*y)
            assert np.allclose(AB, _J @ S + lam * np.eye(2), atol=1e-13)
            assert lam == pytest.approx(np.trace(AB) / 2, abs=1e-13)


class TestQuadraticContact:
    def test_delta_adds(self):
        assert bch_quadratic_contact(E(QCA, s=0.3), E(QCA, s=1.1)).max_abs_diff(E(QCA, s=1.4)) <= 1e-15

    def test_s_then_constant(self):
        # log(e^s e^1) = s + 1/(e-1); log(e^1 e^s) = s + e/(e-1)
        Z = bch_quadratic_contact(E(QCA, s=1), E(QCA, one=1))
        W = bch_quadratic_contact(E(QCA, one=1), E(QCA, s=1))
        assert Z.max_abs_diff(E(QCA, s=1, one=1 / (math.e - 1))) <= 1e-14
        assert W.max_abs_diff(E(QCA, s=1, one=math.e / (math.e - 1))) <= 1e-14

    def test_conformal_reduction(self, rng):
        for _ in range(30):
            a, b = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
            try:
                S = bch_quadratic_symplectic(AlgebraElement(QSA, a), AlgebraElement(QSA, b))
            except BranchError:
                continue
            Z = bch_quadratic_contact(AlgebraElement(QCA, np.r_[a, 0, 0]), AlgebraElement(QCA, np.r_[b, 0, 0]))
            assert np.max(np.abs(Z.coeffs[:3] - S.coeffs)) <= 1e-10

    def test_small_delta_branch(self, rng):
        A = AlgebraElement(QCA, np.r_[rng.uniform(-1, 1, 3), 1e-8, 0.7])
        B = AlgebraElement(QCA, np.r_[rng.uniform(-1, 1, 3), -1e-8 + 1e-12, -0.2])
        assert bch(A, B).max_abs_diff(bch_matrix_oracle(A, B)) <= 1e-9


class TestSu2c:
    def test_commuting_axis(self):
        assert np.allclose(bch_su2c((0, 0, 0.3), (0, 0, 0.9)), (0, 0, 1.2), atol=1e-15)

    def test_quarter_turns(self):
        assert np.allclose(bch_su2c((math.pi / 2, 0, 0), (0, math.pi / 2, 0)), (0, 0, math.pi / 2), atol=1e-10)

    def test_identity(self, rng):
        mu = rng.uniform(-1, 1, 3)
        assert np.allclose(bch_su2c(mu, np.zeros(3)), mu, atol=1e-15)

    def test_real_output_for_real_input(self, rng):
        out = bch_su2c(rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3))
        assert out.dtype == float

    def test_complex_input(self, rng):
        mu = rng.uniform(-1, 1, 3) + 0.3j * rng.uniform(-1, 1, 3)
        nu = rng.uniform(-1, 1, 3)
        out = bch_su2c(mu, nu)
        ref = bch_matrix_oracle(AlgebraElement(SU2C, mu), AlgebraElement(SU2C, nu)).coeffs
        assert np.allclose(out, ref, atol=1e-12)

    def test_coordinate_maps(self, rng):
        mu = rng.uniform(-1, 1, 3)
        assert np.allclose(quadratic_to_su2(su2_to_quadratic(mu)), mu)
        assert np.allclose(hamiltonian_matrix(*su2_to_quadratic(mu)), su2_matrix(mu))

    def test_bold_S_matches_coefficient_form(self, rng):
        from flowbch.bch import _product_decomposition

        mu, nu = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
        lam, S = _product_decomposition(su2_to_quadratic(mu), su2_to_quadratic(nu))
        m1, m2, m3 = mu
        n1, n2, n3 = nu
        assert lam == pytest.approx(-np.dot(mu, nu), abs=1e-15)
        s11 = m1 * n3 - m3 * n1 + 1j * (m3 * n2 - m2 * n3)
        assert S[0, 0] == pytest.approx(s11, abs=1e-15)

    def test_cut(self):
        with pytest.raises(BranchError):
            bch_su2c((math.pi / 2, 0, 0), (math.pi / 2, 0, 0))


@pytest.mark.parametrize("alg", list(AlgebraId), ids=str)
def test_group_inverse_symmetry(alg, rng):
    for _ in range(20):
        A, B = random_element(rng, alg, 0.7), random_element(rng, alg, 0.7)
        assert bch(B, A).max_abs_diff(-bch(-A, -B)) <= 1e-10


@pytest.mark.parametrize("alg", list(AlgebraId), ids=str)
def test_order4_series_consistency(alg, rng):
    for _ in range(5):
        A, B = random_element(rng, alg, 1.0), random_element(rng, alg, 1.0)
        errors, ratio = series_ratio(A, B, eps=(0.02, 0.01))
        if max(errors) < 1e-13:
            continue
        assert 32 * 0.7 <= ratio <= 32 * 1.3


@pytest.mark.parametrize("alg", list(AlgebraId), ids=str)
def test_series_order2_agrees_at_small_scale(alg, rng):
    A, B = random_element(rng, alg, 1e-3), random_element(rng, alg, 1e-3)
    assert bch(A, B).max_abs_diff(dynkin_series(A, B, 2)) <= 1e-8


def test_product_of_factors():
    factors = [E(QCA, p2=0.05), E(QCA, q2=0.05), E(QCA, s=0.2)]
    assert bch_product(factors).max_abs_diff(bch(bch(factors[0], factors[1]), factors[2])) == 0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=6, max_size=6))
def test_compose_quadratic_matches_matrix_log(c):
    from flowbch.errors import NumericDomainError

    try:
        z = compose_quadratic(c[:3], c[3:])
        ref = bch_matrix_oracle(AlgebraElement(QSA, c[:3]), AlgebraElement(QSA, c[3:]))
    except NumericDomainError:
        return
    assert np.allclose(z, ref.coeffs, atol=1e-9 * max(1, np.max(np.abs(ref.coeffs))))


def _integral(f, n=2000):
    # composite Simpson on [0, 1]
    u = np.linspace(0, 1, n + 1)
    w = np.ones(n + 1)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    return float(np.sum(w * np.array([f(x) for x in u])) / (3 * n))
