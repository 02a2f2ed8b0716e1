import numpy as np
import pytest

from wdqm.dynamics import MassTime, free_propagator
from wdqm.specfun import DomainError
from wdqm.trotter import (
    GridMismatchError,
    SliceConfig,
    chain,
    compose,
    dispersion_half_width,
    free_reference,
    harmonic_potential,
    ho_convergence_table,
    naive_kernel_diagnostic,
    naive_kernel_values,
    naive_slice_action,
    relative_error,
    short_time_kernel,
    trotter_grid,
    zero_potential,
)

MT = MassTime(eps_m=0.25)


@pytest.fixture(scope="module")
def grid256():
    return trotter_grid(0.5, 8.0, 256)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0])
def test_ho_exact_scheme_converges(nu):
    cfg = SliceConfig(64, 1.0, trotter_grid(nu, 8.0), MT)
    errs = [r.rel_error for r in ho_convergence_table(cfg, nu, 1.0)]
    assert errs[-1] < 1e-3
    assert all(b < a for a, b in zip(errs, errs[1:]))
    # second order in the slice time while the grid error stays below it
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_free_semigroup(grid256, n):
    cfg = SliceConfig(n, 1.0, grid256, MT)
    k = compose(short_time_kernel(zero_potential(), cfg, 0.5), n)
    assert k.n_slices == n and k.total_time == pytest.approx(1.0)
    assert relative_error(k, free_reference(grid256, 1.0, 0.5, MT), 2.0) < 1e-7


def test_recombined_grid_refinement():
    # the recombined slices compose exactly, so only the grid error is left
    errs = {}
    for n_nodes in (128, 256, 384):
        cfg = SliceConfig(8, 1.0, trotter_grid(0.5, 8.0, n_nodes), MT)
        errs[n_nodes] = ho_convergence_table(cfg, 0.5, 1.0, (8,), "recombined")[0].rel_error
    assert errs[256] < 0.01 * errs[128]
    assert errs[384] < 1e-8


def test_naive_scheme_does_not_converge_for_nu_one():
    cfg = SliceConfig(8, 1.0, trotter_grid(1.0, 8.0), MT)
    d = naive_kernel_diagnostic(cfg, 1.0)
    assert d.exact_monotone
    assert not d.naive_converges
    assert min(d.naive_errors) > 1.0


def test_naive_centrifugal_coefficient():
    # with hbar^2 nu^2 / 2m the only O(1/z) remainder, z = m x y / hbar eps,
    # is the reflected-path term of modulus nu / 2z
    nu, eps = 4.0, 0.05
    mt = MassTime()
    x, y = np.array([6.0, 7.5, 5.0]), np.array([6.2, 7.4, 5.5])
    z = x * y / eps
    exact = free_propagator(x, y, eps, nu, mt)
    r_derived = np.abs(exact / naive_kernel_values(x, y, eps, nu, mt, "derived") - 1)
    r_printed = np.abs(exact / naive_kernel_values(x, y, eps, nu, mt, "printed") - 1)
    assert np.allclose(r_derived * 2 * z / nu, 1.0, atol=0.01)
    assert np.max(np.abs(r_printed * 2 * z / nu - 1.0)) > 0.5
    kin, cent, pot = naive_slice_action(2.0, 1.0, 0.1, harmonic_potential(1.0), nu, mt)
    assert kin == pytest.approx(5.0)
    assert cent == pytest.approx(nu * nu / 2 * 0.1 / 2.0)
    assert pot == pytest.approx(0.5 * (2.0 + 0.5) * 0.1)
    with pytest.raises(ValueError):
        naive_kernel_values(x, y, eps, nu, mt, "other")
    with pytest.raises(DomainError):
        naive_kernel_values(0.0, 1.0, eps, nu, mt)


def test_composition_errors(grid256):
    cfg = SliceConfig(4, 1.0, grid256, MT)
    k = short_time_kernel(zero_potential(), cfg, 0.5)
    other = short_time_kernel(zero_potential(), SliceConfig(4, 1.0, trotter_grid(0.5, 7.0, 256), MT), 0.5)
    with pytest.raises(GridMismatchError):
        chain(k, other)
    with pytest.raises(ValueError):
        chain(k, short_time_kernel(harmonic_potential(1.0), cfg, 0.5))
    with pytest.raises(ValueError):
        compose(k, 0)
    with pytest.raises(ValueError):
        short_time_kernel(zero_potential(), cfg, 0.5, scheme="recombined")
    with pytest.raises(ValueError):
        short_time_kernel(zero_potential(), cfg, 0.5, scheme="midpoint")


def test_chain_matches_apply(grid256):
    cfg = SliceConfig(2, 1.0, grid256, MT)
    k = short_time_kernel(harmonic_potential(1.0), cfg, 0.5)
    psi = np.exp(-grid256.nodes**2)
    assert np.allclose(chain(k, k).apply(psi), k.apply(k.apply(psi)), atol=1e-13)


def test_slice_config_validation(grid256):
    with pytest.raises(ValueError):
        SliceConfig(0, 1.0, grid256)
    with pytest.raises(DomainError):
        SliceConfig(4, -1.0, grid256)
    with pytest.raises(ValueError):
        trotter_grid(0.5, 8.0, 100)
    with pytest.raises(DomainError):
        harmonic_potential(0.0)
    cfg = SliceConfig(8, 2.0, grid256, MT)
    assert cfg.epsilon == 0.25 and cfg.regularizer == 0.25
    assert cfg.with_slices(4).epsilon == 0.5
    assert dispersion_half_width(1.0, MassTime()) == pytest.approx(2.0 + 6.0)
