"""Property suites run by the ``check`` command.

Each check computes one residual and compares it with a tolerance. The
suites are short enough to run in a few seconds each.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import MassTime, evolve_gaussian, free_propagator, ho_propagator, mehler_kernel, packet_moments, packet_observables
from .quadrature import full_line_grid, speed_measure_grid
from .specfun import DunklParam, dunkl_kernel
from .specfun.dunkl import _series
from .stochastic import (
    bessel_density,
    bessel_ho_kernel,
    density_decomposition_check,
    dunkl_heat_kernel,
    dunkl_sector_indices,
    ho_heat_kernel,
    smeared_initial_value,
    wiener_density,
)
from .transform import dunkl_transform, gaussian_transform, inverse_dunkl_transform


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)


def _max_rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def kernel_suite() -> list[tuple[str, float, float]]:
    out = []
    x = np.linspace(0.5, 20.0, 40)
    res = max(_max_rel(dunkl_kernel(x, nu), _series(x.astype(complex), nu).real) for nu in (-0.3, 0.5, 1.5))
    out.append(("series vs Bessel form, real axis", res, 1e-9))
    xi = np.linspace(0.5, 8.0, 16)
    res = max(
        float(np.max(np.abs(dunkl_kernel(1j * xi, nu) - _series(1j * xi, nu))))
        for nu in (-0.3, 0.5, 1.5)
    )
    out.append(("series vs Bessel form, imaginary axis", res, 1e-9))
    x = np.linspace(-20, 20, 81)
    out.append(("zero deformation gives exp", _max_rel(dunkl_kernel(x, 0.0), np.exp(x)), 1e-12))
    z = dunkl_kernel(-2.3j, 0.8)
    out.append(("conjugation symmetry", abs(z - np.conj(dunkl_kernel(2.3j, 0.8))), 1e-14))
    # D_x E(lambda x) = lambda E(lambda x) with a central difference
    nu, lam, x0, h = 0.7, 0.9, 1.3, 1e-5
    e = lambda s: float(dunkl_kernel(lam * s, nu))  # noqa: E731
    d = (e(x0 + h) - e(x0 - h)) / (2 * h) + nu / x0 * (e(x0) - e(-x0))
    out.append(("eigenfunction of the Dunkl derivative", abs(d - lam * e(x0)) / abs(lam * e(x0)), 1e-8))
    return out


def transform_suite() -> list[tuple[str, float, float]]:
    out = []
    k = np.linspace(0.0, 4.0, 9)
    worst = 0.0
    for nu in (-0.3, 0.5):
        for alpha in (0.5, 2.0):
            g = dunkl_transform(lambda x, a=alpha: np.exp(-a * x * x / 2), nu, k)
            worst = max(worst, float(np.max(np.abs(g.values - gaussian_transform(alpha, k, nu)))))
    out.append(("Gaussian transform pair", worst, 1e-8))
    nu = 0.8
    f = lambda x: (1 + x) * np.exp(-x * x / 2)  # noqa: E731
    grid = full_line_grid(nu, 12.0, 48)
    g = dunkl_transform(f, nu, grid)
    xs = np.array([-1.5, -0.2, 0.4, 2.0])
    back = inverse_dunkl_transform(g, nu, xs)
    out.append(("transform round trip", float(np.max(np.abs(back.values - f(xs)))), 1e-7))
    return out


def propagator_suite() -> list[tuple[str, float, float]]:
    out = []
    x, y = np.meshgrid(np.linspace(-2, 2, 7), np.linspace(-2, 2, 7))
    t = 0.7
    closed = np.exp(1j * (x - y) ** 2 / (2 * t)) / np.sqrt(2j * np.pi * t)
    out.append(("zero deformation free kernel", _max_rel(free_propagator(x, y, t, 0.0), closed), 1e-12))
    out.append(("oscillator reduces to Mehler", _max_rel(ho_propagator(x, y, t, 1.3, 0.0), mehler_kernel(x, y, t, 1.3)), 1e-12))
    out.append(
        ("small frequency limit", _max_rel(ho_propagator(x, y, t, 1e-5, 0.6), free_propagator(x, y, t, 0.6)), 1e-8)
    )
    tau = 0.7
    wick = ho_propagator(0.5, -0.3, -1j * tau, 1.0, 0.5)
    out.append(("Wick rotation gives the heat kernel", abs(wick - ho_heat_kernel(0.5, -0.3, tau, 1.0, 0.5)) / abs(wick), 1e-12))
    ps = evolve_gaussian(1.0, 2.0, 0.5)
    num = packet_moments(ps, weighted=False)
    ref = packet_observables(ps)
    out.append(("packet width moments", max(abs(a - b) / b for a, b in zip(num, ref)), 1e-6))
    mt = MassTime().regularized()
    grid = full_line_grid(0.5, 40.0, 160)
    z = grid.nodes
    conv = grid.integrate(free_propagator(0.4, z, 0.3, 0.5, mt) * free_propagator(z, -0.2, 0.5, 0.5, mt))
    direct = free_propagator(0.4, -0.2, 0.8, 0.5, mt)
    out.append(("Kolmogorov-Chapman composition", abs(conv - direct) / abs(direct), 1e-4))
    return out


def densities_suite() -> list[tuple[str, float, float]]:
    out = []
    nu, y, tau = 0.7, 0.4, 0.9
    grid = full_line_grid(nu, 14.0, 28)
    z = grid.nodes
    out.append(("heat kernel normalization", abs(grid.integrate(dunkl_heat_kernel(z, y, tau, nu)) - 1.0), 1e-8))
    x, s, t = -0.3, 0.4, 0.5
    conv = grid.integrate(dunkl_heat_kernel(x, z, s, nu) * dunkl_heat_kernel(z, y, t, nu))
    direct = dunkl_heat_kernel(x, y, s + t, nu)
    out.append(("heat kernel convolution", abs(conv - direct) / direct, 1e-8))
    # positivity holds for nu >= 0 only; below zero E_nu(-w) changes sign
    g = np.linspace(-3.0, 3.0, 20)
    px, py = np.meshgrid(g, g)
    bad = sum(
        int(np.sum(dunkl_heat_kernel(px, py, tt, v) <= 0)) for v in (0.0, 0.5, 1.5) for tt in (0.1, 0.3, 1.0, 3.0, 10.0)
    )
    out.append(("heat kernel positivity (nu >= 0)", float(bad), 0.0))
    xs, ys = np.meshgrid(np.linspace(-5, 5, 41), np.linspace(-5, 5, 41))
    phi = lambda u: np.exp(-((u - 0.3) ** 2))  # noqa: E731
    errs = [abs(smeared_initial_value(0.5, tt, nu, phi) - float(phi(0.5))) for tt in (0.1, 0.03, 0.01, 0.003)]
    monotone = all(b < a for a, b in zip(errs, errs[1:]))
    out.append(("smeared initial condition monotone", errs[-1] if monotone else float("inf"), 1e-2))
    res = max(
        float(np.max(density_decomposition_check(xs, ys, 0.6, v)))
        for v in (0.0, 0.5, 1.3)
    )
    out.append(("decomposition into Bessel densities", res, 1e-10))
    out.append(("zero deformation gives Wiener density", _max_rel(dunkl_heat_kernel(xs, ys, 0.6, 0.0), wiener_density(xs, ys, 0.6)), 1e-12))
    even, odd = dunkl_sector_indices(DunklParam(0.5))
    ho = ho_heat_kernel(xs, ys, 0.8, 1.0, 0.5)
    parts = bessel_ho_kernel(np.abs(xs), np.abs(ys), 0.8, 1.0, even) + xs * ys * bessel_ho_kernel(
        np.abs(xs), np.abs(ys), 0.8, 1.0, odd
    )
    out.append(("oscillator kernel decomposition", _max_rel(parts, ho), 1e-10))
    sg = speed_measure_grid(0.5, 14.0, 28)
    mass = sg.integrate(bessel_density(sg.nodes, 0.8, 0.6, 0.5))
    out.append(("Bessel density normalization", abs(mass - 1.0), 1e-8))
    return out


SUITES: dict[str, Callable[[], list]] = {
    "kernel": kernel_suite,
    "transform": transform_suite,
    "propagator": propagator_suite,
    "densities": densities_suite,
}


def run_suite(name: str) -> list[CheckResult]:
    names = list(SUITES) if name == "all" else [name]
    results = []
    for s in names:
        if s not in SUITES:
            raise KeyError(f"unknown suite {s!r}")
        results.extend(CheckResult(s, n, float(r), float(t)) for n, r, t in SUITES[s]())
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'suite':<11} {'check':<{width}} {'residual':>10} {'tol':>8}  status"]
    for r in results:
        lines.append(
            f"{r.suite:<11} {r.name:<{width}} {r.residual:>10.2e} {r.tolerance:>8.0e}  {'PASS' if r.passed else 'FAIL'}"
        )
    return "\n".join(lines)
