import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wdqm.quadrature import full_line_grid, half_line_grid
from wdqm.specfun import DunklParam
from wdqm.transform import (
    SampledFunction,
    TruncationError,
    choose_cutoff,
    dunkl_transform,
    gaussian_transform,
    inverse_dunkl_transform,
    smeared_orthogonality_check,
)

NUS = [-0.3, 0.0, 0.5, 1.5]
K = np.linspace(-5.0, 5.0, 21)


def gaussian(alpha):
    return lambda x: np.exp(-alpha * x * x / 2.0)


def test_gaussian_example_nu_half():
    g = dunkl_transform(gaussian(1.0), 0.5, K)
    assert np.max(np.abs(g.values - np.exp(-(K**2) / 2))) < 1e-12


def test_fourier_limit():
    # nu = 0: ordinary unitary Fourier transform, checked on a shifted Gaussian
    f = lambda x: np.exp(-((x - 0.7) ** 2) / 2)  # noqa: E731
    g = dunkl_transform(f, 0.0, K)
    exact = np.exp(-(K**2) / 2 - 0.7j * K)
    assert np.max(np.abs(g.values - exact)) < 1e-12


@pytest.mark.parametrize("nu", NUS)
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_gaussian_pair_forward(nu, alpha):
    g = dunkl_transform(gaussian(alpha), nu, K)
    assert np.max(np.abs(g.values - gaussian_transform(alpha, K, nu))) < 1e-8
    assert g.parity_hint == "even"
    assert np.max(np.abs(g.values.imag)) < 1e-15


@pytest.mark.parametrize("nu", NUS)
@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_gaussian_pair_inverse(nu, beta):
    x = np.linspace(-4.0, 4.0, 17)
    f = inverse_dunkl_transform(lambda k: np.exp(-k * k / (2 * beta)), nu, x)
    assert np.max(np.abs(f.values - beta ** (nu + 0.5) * np.exp(-beta * x * x / 2))) < 1e-8


def test_inverse_example():
    x = np.linspace(-3, 3, 13)
    f = inverse_dunkl_transform(lambda k: np.exp(-k * k / 4), 0.5, x)
    assert np.max(np.abs(f.values - 2 * np.exp(-x * x))) < 1e-12


def test_inverse_fourier_limit():
    x = np.linspace(-3, 3, 13)
    f = inverse_dunkl_transform(gaussian(1.0), 0.0, x)
    assert np.max(np.abs(f.values - np.exp(-x * x / 2))) < 1e-12


def test_odd_function_transform_against_mpmath():
    # D[x exp(-x^2/2)](k) = -i k exp(-k^2/2) for every nu (shift of index)
    nu = 0.8
    f = lambda x: x * np.exp(-x * x / 2)  # noqa: E731
    k = np.array([0.3, 1.1, 2.5])
    g = dunkl_transform(f, nu, k)
    assert g.parity_hint == "odd"
    p = DunklParam(nu)
    for kk, val in zip(k, g.values):
        # direct mpmath quadrature of the odd part: (2/c) int_0^inf x^{2nu} f(x) (-i) Im E(ikx) dx
        im = mp.quad(
            lambda x: x ** (2 * nu) * x * mp.exp(-x * x / 2)
            * mp.gamma(nu + 0.5) * (kk * x / 2) ** (0.5 - nu) * mp.besselj(nu + 0.5, kk * x),
            [0, mp.inf],
        )
        assert abs(val - (-2j * float(im) / p.c_nu)) < 1e-10
        assert abs(val - (-1j * kk * math.exp(-kk * kk / 2))) < 1e-10


def test_round_trip():
    nu = 0.8
    f = lambda x: x * np.exp(-x * x)  # noqa: E731
    kgrid = full_line_grid(nu, 12.0, 48)
    g = dunkl_transform(f, nu, kgrid)
    x = np.linspace(-3, 3, 25)
    back = inverse_dunkl_transform(g, nu, x)
    assert np.max(np.abs(back.values - f(x))) <= 1e-7


def test_round_trip_half_line_parity():
    nu = 0.3
    kgrid = half_line_grid(2 * nu, 12.0, 24)
    g = dunkl_transform(gaussian(1.0), nu, kgrid)
    g = SampledFunction(g.nodes, g.values, "even", kgrid)
    x = np.array([-1.0, 0.0, 0.5, 2.0])
    back = inverse_dunkl_transform(g, nu, x)
    assert np.max(np.abs(back.values - np.exp(-x * x / 2))) < 1e-10


def test_linearity():
    rng = np.random.default_rng(7)
    nu = 0.4
    a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
    f1, f2 = gaussian(0.8), lambda x: x * np.exp(-1.3 * x * x / 2)
    lhs = dunkl_transform(lambda x: a * f1(x) + b * f2(x), nu, K).values
    rhs = a * dunkl_transform(f1, nu, K).values + b * dunkl_transform(f2, nu, K).values
    assert np.max(np.abs(lhs - rhs)) < 1e-13


@settings(max_examples=8, deadline=None)
@given(nu=st.floats(-0.4, 2.0), alpha=st.floats(0.3, 3.0), shift=st.floats(-1.0, 1.0))
def test_plancherel(nu, alpha, shift):
    f = lambda x: np.exp(-alpha * (x - shift) ** 2 / 2)  # noqa: E731
    xgrid = full_line_grid(nu, 12.0 / math.sqrt(alpha) + 1.0, 32)
    kgrid = full_line_grid(nu, 12.0 * math.sqrt(alpha) + 1.0, 32)
    g = dunkl_transform(f, nu, kgrid)
    lhs = xgrid.integrate(np.abs(f(xgrid.nodes)) ** 2)
    rhs = kgrid.integrate(np.abs(g.values) ** 2)
    assert rhs == pytest.approx(lhs, rel=1e-7)


@settings(max_examples=10, deadline=None)
@given(nu=st.floats(-0.4, 2.0), c=st.floats(0.2, 2.0))
def test_parity_of_results(nu, c):
    k = np.linspace(-3.0, 3.0, 7)
    even = dunkl_transform(lambda x: np.exp(-c * x**4), nu, k)
    odd = dunkl_transform(lambda x: np.sin(x) * np.exp(-c * x * x), nu, k)
    assert np.max(np.abs(even.values.imag)) <= 1e-15 * np.max(np.abs(even.values))
    assert np.max(np.abs(odd.values.real)) <= 1e-15 * np.max(np.abs(odd.values))
    assert even.parity_hint == "even" and odd.parity_hint == "odd"


def test_truncation_reported():
    with pytest.raises(TruncationError):
        dunkl_transform(gaussian(0.01), 0.5, K, x_max=5.0)
    assert choose_cutoff(gaussian(1.0), 0.5) > 7.0


def test_sampled_function_validation():
    grid = full_line_grid(0.5, 4.0, 2)
    with pytest.raises(ValueError):
        SampledFunction.on_grid(lambda x: x, grid, parity_hint="even")
    with pytest.raises(ValueError):
        SampledFunction(grid.nodes, np.full(len(grid), np.nan))
    s = SampledFunction.on_grid(lambda x: x**3, grid, parity_hint="odd")
    assert s.parity_hint == "odd"
    with pytest.raises(ValueError):
        dunkl_transform(SampledFunction(np.array([0.0, 1.0]), np.array([1.0, 2.0])), 0.5, K)


@pytest.mark.parametrize("nu,k1", [(0.0, 1.0), (0.5, 2.0)])
def test_smeared_orthogonality_examples(nu, k1):
    assert smeared_orthogonality_check(k1, 0.05, nu) == pytest.approx(1.0, abs=0.02)


def test_smeared_orthogonality_converges():
    err = [abs(smeared_orthogonality_check(2.0, w, 0.5) - 1) for w in (0.05, 0.025)]
    assert err[1] <= 0.5 * err[0]
    # exact at nu = 0 once the kappa window holds the whole Gaussian
    assert abs(smeared_orthogonality_check(1.0, 0.1, 0.0) - 1) < 1e-10


def test_smeared_orthogonality_kappa_pairing():
    assert smeared_orthogonality_check(1.5, 0.1, 1.2, smearing="kappa") == pytest.approx(1.0, abs=1e-8)


def test_smeared_orthogonality_domain():
    with pytest.raises(ValueError):
        smeared_orthogonality_check(-1.0, 0.05, 0.5)
    with pytest.raises(ValueError):
        smeared_orthogonality_check(1.0, 0.9, 0.5)
