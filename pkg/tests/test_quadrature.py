import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gerber_shiu.errors import ConvergenceError, DomainError
from gerber_shiu.quadrature import (
    composite_nodes,
    gauss_rule,
    integrate,
    integrate_to_infinity,
    integration_matrix,
)


def test_two_point_rule_nodes():
    rule = gauss_rule(2)
    np.testing.assert_allclose(rule.nodes, [-1 / np.sqrt(3), 1 / np.sqrt(3)], atol=1e-15)
    np.testing.assert_allclose(rule.weights, [1.0, 1.0], atol=1e-15)


@pytest.mark.parametrize("q", [1, 2, 3, 5, 8, 16, 32, 64])
def test_matches_numpy_legendre(q):
    x_ref, w_ref = np.polynomial.legendre.leggauss(q)
    rule = gauss_rule(q)
    np.testing.assert_allclose(rule.nodes, x_ref, atol=1e-14)
    np.testing.assert_allclose(rule.weights, w_ref, atol=1e-14)
    assert abs(rule.weights.sum() - 2.0) < 1e-14


@pytest.mark.parametrize("q", [0, -1, 65, 2.5])
def test_bad_order(q):
    with pytest.raises(DomainError):
        gauss_rule(q)


def test_rules_are_cached_and_read_only():
    rule = gauss_rule(7)
    assert gauss_rule(7) is rule
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.0


@given(q=st.integers(1, 20), data=st.data())
def test_exact_to_degree_2q_minus_1(q, data):
    deg = data.draw(st.integers(0, 2 * q - 1))
    a = data.draw(st.floats(-3, 3))
    width = data.draw(st.floats(0.1, 4))
    b = a + width
    est = integrate(gauss_rule(q), lambda x: x**deg, a, b)
    exact = (b ** (deg + 1) - a ** (deg + 1)) / (deg + 1)
    assert abs(est - exact) <= 1e-12 * max(1.0, abs(exact), abs(a) ** (deg + 1), abs(b) ** (deg + 1))


def test_not_exact_at_degree_2q():
    q = 3
    est = integrate(gauss_rule(q), lambda x: x ** (2 * q), -1, 1)
    assert abs(est - 2 / (2 * q + 1)) > 1e-6


def test_interval_orientation():
    rule = gauss_rule(4)
    assert integrate(rule, np.sin, 1.0, 1.0) == 0.0
    with pytest.raises(DomainError):
        integrate(rule, np.sin, 1.0, 0.0)


def test_batched_integrand():
    out = integrate(gauss_rule(10), lambda x: np.stack([np.ones_like(x), x]), 0.0, 2.0)
    np.testing.assert_allclose(out, [2.0, 2.0], atol=1e-14)


def test_composite_nodes_shape_and_sum():
    x, w = composite_nodes(gauss_rule(5), np.linspace(0, 3, 7))
    assert x.shape == w.shape == (6, 5)
    assert abs(np.sum(np.exp(x) * w) - (np.e**3 - 1)) < 1e-12


def test_semi_infinite_exponential():
    assert abs(integrate_to_infinity(lambda x: np.exp(-x)) - 1.0) < 1e-13
    assert abs(integrate_to_infinity(lambda x: x * np.exp(-2 * x), 1.0) - 0.75 * np.exp(-2)) < 1e-13


def test_semi_infinite_divergence():
    with pytest.raises(ConvergenceError):
        integrate_to_infinity(lambda x: 1.0 / (1.0 + x), cap=1e3)


@pytest.mark.parametrize("q", [4, 12, 32])
def test_integration_matrix_exact_on_polynomials(q):
    x = gauss_rule(q).nodes
    S = integration_matrix(q)
    for deg in range(q):
        got = S @ x**deg
        want = (x ** (deg + 1) - (-1.0) ** (deg + 1)) / (deg + 1)
        np.testing.assert_allclose(got, want, atol=1e-13)
