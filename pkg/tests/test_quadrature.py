import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wdqm.quadrature import (
    FULL_LINE,
    WeightedGrid,
    full_line_grid,
    gauss_jacobi,
    gauss_legendre,
    half_line_grid,
    speed_measure_grid,
)


def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre(8)
    for n in range(16):
        exact = 0.0 if n % 2 else 2.0 / (n + 1)
        assert x**n @ w == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("a,b", [(0.0, -0.6), (0.0, 0.4), (0.5, 1.7), (-0.3, 2.0)])
def test_gauss_jacobi_moments(a, b):
    # int_{-1}^{1} (1-x)^a (1+x)^b x^n dx against a fine reference via substitution
    x, w = gauss_jacobi(12, a, b)
    assert np.all(w > 0)
    beta = math.gamma(a + 1) * math.gamma(b + 1) / math.gamma(a + b + 2)
    assert w.sum() == pytest.approx(2 ** (a + b + 1) * beta, rel=1e-13)
    # first moment: 2^{a+b+1} B(a+1,b+1) (b-a)/(a+b+2)
    assert x @ w == pytest.approx(2 ** (a + b + 1) * beta * (b - a) / (a + b + 2), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("nu", [-0.3, 0.0, 0.5, 1.5])
@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_full_line_gaussian_moment(nu, beta):
    grid = full_line_grid(nu, 14.0 / math.sqrt(beta), 24)
    exact = math.gamma(nu + 0.5) / beta ** (nu + 0.5)
    assert grid.integrate(np.exp(-beta * grid.nodes**2)) == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("alpha", [-0.8, -0.5, 0.0, 1.0])
def test_speed_measure_gaussian_moment(alpha):
    grid = speed_measure_grid(alpha, 12.0, 24)
    # int 2 z^{2a+1} exp(-z^2/2) dz = 2^{a+1} Gamma(a+1)
    exact = 2 ** (alpha + 1) * math.gamma(alpha + 1)
    assert grid.integrate(np.exp(-grid.nodes**2 / 2)) == pytest.approx(exact, rel=1e-13)


def test_grid_invariants():
    grid = full_line_grid(-0.3, 5.0, 6)
    assert grid.domain == FULL_LINE
    assert grid.is_symmetric
    assert np.all(np.diff(grid.nodes) > 0)
    assert np.all(grid.weights > 0)
    assert grid.same_as(full_line_grid(-0.3, 5.0, 6))
    assert not grid.same_as(full_line_grid(0.3, 5.0, 6))
    with pytest.raises(ValueError):
        grid.nodes[0] = 1.0


def test_grid_validation():
    with pytest.raises(ValueError):
        WeightedGrid(np.array([0.0, 0.0]), np.array([1.0, 1.0]), FULL_LINE, 0.0)
    with pytest.raises(ValueError):
        WeightedGrid(np.array([0.0, 1.0]), np.array([1.0, -1.0]), FULL_LINE, 0.0)
    with pytest.raises(ValueError):
        WeightedGrid(np.array([-1.0, 1.0]), np.array([1.0, 1.0]), "half_line", 0.0)


@settings(max_examples=30, deadline=None)
@given(power=st.floats(-0.9, 3.0), n=st.integers(0, 6))
def test_half_line_monomial_moments(power, n):
    grid = half_line_grid(power, 1.0, 4)
    exact = 1.0 / (power + n + 1)
    assert grid.integrate(grid.nodes**n) == pytest.approx(exact, rel=1e-12)
