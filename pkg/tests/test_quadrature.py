import math

import numpy as np
import pytest
from scipy import integrate

from histoq.quadrature import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    QuadratureError,
    QuadratureSpec,
    gauss_kronrod,
    gauss_kronrod_2d,
)


def _rule(weights, degree):
    return float(weights @ NODES**degree)


@pytest.mark.parametrize("degree", range(0, 23))
def test_kronrod_rule_exact_through_degree_22(degree):
    exact = 0.0 if degree % 2 else 2.0 / (degree + 1)
    assert _rule(KRONROD_WEIGHTS, degree) == pytest.approx(exact, abs=1e-14)


def test_gauss_rule_exact_through_degree_13_only():
    for degree in range(14):
        exact = 0.0 if degree % 2 else 2.0 / (degree + 1)
        assert _rule(GAUSS_WEIGHTS, degree) == pytest.approx(exact, abs=1e-14)
    assert abs(_rule(GAUSS_WEIGHTS, 14) - 2.0 / 15) > 1e-8


def test_gauss_weights_vanish_on_kronrod_only_nodes():
    assert np.count_nonzero(GAUSS_WEIGHTS) == 7
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)


@pytest.mark.parametrize(
    "f, a, b",
    [
        (np.exp, 0.0, 3.0),
        (lambda x: np.sin(40 * x) ** 2, -1.0, 2.0),
        (lambda x: 1.0 / (1 + 25 * x**2), -1.0, 1.0),
        (lambda x: np.sqrt(np.abs(x)), -1.0, 1.0),
        (lambda x: np.exp(-(x**2)) * np.cos(8 * x), -8.0, 8.0),
    ],
)
def test_matches_scipy_quad(f, a, b):
    ref, _ = integrate.quad(f, a, b, limit=500, epsabs=1e-13, epsrel=1e-13)
    r = gauss_kronrod(f, a, b, QuadratureSpec(abs_tol=1e-12, rel_tol=1e-11))
    assert r.value == pytest.approx(ref, rel=1e-10, abs=1e-12)
    assert r.error <= max(1e-12, 1e-11 * abs(r.value))


def test_complex_integrand():
    r = gauss_kronrod(lambda x: np.exp(1j * x), 0.0, math.pi)
    assert isinstance(r.value, complex)
    assert abs(r.value - 2j) < 1e-12


def test_reversed_and_empty_limits():
    f = lambda x: x**2
    assert gauss_kronrod(f, 2.0, 0.0).value == pytest.approx(-8 / 3, abs=1e-14)
    assert gauss_kronrod(f, 1.0, 1.0).value == 0.0


def test_breakpoints_handle_a_kink_in_one_pass():
    f = lambda x: np.abs(x - 0.3)
    r = gauss_kronrod(f, -1.0, 1.0, breakpoints=[0.3])
    assert r.panels == 2
    assert r.value == pytest.approx(0.5 * 1.3**2 + 0.5 * 0.7**2, abs=1e-14)


def test_max_width_sets_initial_panels():
    r = gauss_kronrod(lambda x: np.ones_like(x), 0.0, 10.0, max_width=1.0)
    assert r.panels == 10
    assert r.value == pytest.approx(10.0)


def test_panel_cap_raises():
    f = lambda x: np.sin(1.0 / (x + 1e-9))
    with pytest.raises(QuadratureError):
        gauss_kronrod(f, 0.0, 1.0, QuadratureSpec(abs_tol=1e-14, rel_tol=1e-14, max_panels=64))


def test_initial_panels_over_cap_raise():
    with pytest.raises(QuadratureError):
        gauss_kronrod(np.cos, 0.0, 100.0, QuadratureSpec(max_panels=10), max_width=1.0)


def test_rejects_infinite_limits_and_bad_width():
    with pytest.raises(ValueError):
        gauss_kronrod(np.cos, 0.0, math.inf)
    with pytest.raises(ValueError):
        gauss_kronrod(np.cos, 0.0, 1.0, max_width=0.0)


def test_spec_validation_and_refinement():
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_panels=0)
    s = QuadratureSpec().refined()
    assert s.abs_tol == pytest.approx(1e-12)
    assert s.max_panels == 4 * 2**14


def test_2d_against_scipy_dblquad():
    f = lambda x, y: np.exp(-(x**2) - 2 * y**2) * np.cos(3 * x * y)
    ref, _ = integrate.dblquad(lambda y, x: f(x, y), -3, 3, -3, 3, epsabs=1e-13, epsrel=1e-13)
    r = gauss_kronrod_2d(f, (-3, 3), (-3, 3), QuadratureSpec(abs_tol=1e-12, rel_tol=1e-11), max_width=1.0)
    assert r.value == pytest.approx(ref, abs=1e-11)


def test_2d_complex_and_degenerate():
    r = gauss_kronrod_2d(lambda x, y: np.exp(1j * (x + y)), (0, math.pi), (0, math.pi))
    assert abs(r.value - (2j) ** 2) < 1e-10
    assert gauss_kronrod_2d(lambda x, y: x * y, (1, 1), (0, 1)).value == 0.0


def test_2d_panel_cap_raises():
    f = lambda x, y: np.sin(1e4 * x * y)
    with pytest.raises(QuadratureError):
        gauss_kronrod_2d(f, (0, 1), (0, 1), QuadratureSpec(abs_tol=1e-14, rel_tol=1e-14, max_panels=8))
