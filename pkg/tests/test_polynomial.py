import numpy as np

from flowbch.polynomial import Polynomial, jacobi_bracket, jacobi_bracket_values

q = Polynomial.monomial((1, 0, 0))
p = Polynomial.monomial((0, 1, 0))
s = Polynomial.monomial((0, 0, 1))
one = Polynomial.constant(1.0)


def test_arithmetic_and_derivatives():
    f = q * q * 3.0 + p * s - one
    assert f.terms == {(2, 0, 0): 3.0, (0, 1, 1): 1.0, (0, 0, 0): -1.0}
    assert f.diff("q") == q * 6.0
    assert f.diff("s") == p
    assert f - f == Polynomial()


def test_evaluation_broadcasts():
    f = q * p + s
    assert f(2.0, 3.0, 1.0) == 7.0
    values = f(np.array([1.0, 2.0]), 1.0, 0.0)
    assert np.array_equal(values, [1.0, 2.0])


def test_canonical_brackets():
    assert jacobi_bracket(q, p) == one
    assert jacobi_bracket(q, s) == q
    assert jacobi_bracket(one, s) == one
    assert jacobi_bracket(p, s) == Polynomial()
    assert jacobi_bracket(s, one) == -one


def test_pointwise_matches_exact(rng):
    f = q * q + p * s * 2.0
    g = p * p * 0.5 - q * s + one
    exact = jacobi_bracket(f, g)
    for _ in range(10):
        x = rng.uniform(-2, 2, 3)
        pointwise = jacobi_bracket_values(f.value_and_gradient(*x), g.value_and_gradient(*x), x[1])
        assert np.isclose(pointwise, exact(*x), atol=1e-12)
