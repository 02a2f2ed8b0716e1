"""Time-sliced path integrals as weighted matrix products on a grid.

A transfer kernel ``T(x_j, x_{j-1})`` holds the short-time propagator for one
slice; inserting the weighted resolution of unity between slices turns the
N-fold path integral into ``T W T W ... T`` with ``W = diag(weights)``, where
the grid weights already contain ``|x|^{2 nu}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dynamics import MassTime, free_propagator, ho_propagator
from .quadrature import FULL_LINE, WeightedGrid, full_line_grid
from .specfun import DomainError, as_param

SCHEMES = ("exact_dunkl", "naive_asymptotic", "recombined")


class GridMismatchError(ValueError):
    """Kernels built on different grids cannot be composed."""


@dataclass(frozen=True)
class Potential:
    """A real potential with a descriptor used to tag kernels."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    omega: float | None = None

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))


def zero_potential() -> Potential:
    return Potential("zero", lambda x: np.zeros_like(x))


def harmonic_potential(omega: float, mass: float = 1.0) -> Potential:
    if not omega > 0:
        raise DomainError("omega must be positive")
    return Potential(f"harmonic(omega={omega})", lambda x: 0.5 * mass * omega**2 * x * x, omega)


@dataclass(frozen=True)
class SliceConfig:
    """N slices of a total time on a full-line weighted grid."""

    n_slices: int
    total_time: float
    grid: WeightedGrid
    mt: MassTime = field(default_factory=MassTime)

    def __post_init__(self):
        if self.n_slices < 1 or int(self.n_slices) != self.n_slices:
            raise ValueError("n_slices must be a positive integer")
        if not self.total_time > 0:
            raise DomainError("total_time must be positive")
        if self.grid.domain != FULL_LINE:
            raise ValueError("path integrals need a full-line grid")

    @property
    def epsilon(self) -> float:
        return self.total_time / self.n_slices

    @property
    def regularizer(self) -> float:
        return self.mt.eps_m

    def with_slices(self, n: int) -> "SliceConfig":
        return SliceConfig(n, self.total_time, self.grid, self.mt)


def dispersion_half_width(total_time: float, mt: MassTime, inner: float = 2.0, beta0: float = 1.0) -> float:
    """Half-width covering ``inner`` plus six free-dispersion widths at ``total_time``."""
    sigma = math.sqrt((1.0 + (mt.hbar * beta0 * total_time / mt.mass) ** 2) / (2.0 * beta0))
    return inner + 6.0 * sigma


def trotter_grid(nu: float, half_width: float, n_nodes: int = 384, order: int = 16) -> WeightedGrid:
    """Gauss-Legendre panel grid with ``n_nodes`` nodes (a multiple of 2*order)."""
    if n_nodes % (2 * order):
        raise ValueError(f"n_nodes must be a multiple of {2 * order}")
    return full_line_grid(nu, half_width, n_nodes // (2 * order), order)


@dataclass(frozen=True, eq=False)
class TransferKernel:
    """Matrix ``K(x_i, x_j)`` over grid nodes for ``n_slices`` slices of ``slice_time``."""

    matrix: np.ndarray
    slice_time: float
    potential_id: str
    grid: WeightedGrid
    n_slices: int = 1
    scheme: str = "exact_dunkl"

    @property
    def total_time(self) -> float:
        return self.slice_time * self.n_slices

    def apply(self, values: np.ndarray) -> np.ndarray:
        """``int dy |y|^{2 nu} K(x, y) psi(y)`` at the grid nodes."""
        return self.matrix @ (self.grid.weights * np.asarray(values))


def _pair(grid: WeightedGrid) -> tuple[np.ndarray, np.ndarray]:
    return np.meshgrid(grid.nodes, grid.nodes, indexing="ij")


def naive_kernel_values(x, y, eps: float, p, mt: MassTime, centrifugal: str = "derived") -> np.ndarray:
    """Short-time kernel from the leading large-argument form of ``E_nu``.

    ``|x y|^{-nu} sqrt(m/2 pi i hbar eps) exp{(i/hbar)(m (x-y)^2 / 2 eps - C eps / (x y))}``
    with ``C = hbar^2 nu^2 / 2m`` (``centrifugal="derived"``, what the
    expansion actually gives) or ``C = nu^2 / m`` (``"printed"``).
    """
    p = as_param(p)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    xy = x * y
    if np.any(xy == 0):
        raise DomainError("the naive kernel diverges at x = 0 or y = 0")
    m_c = mt.complex_mass
    coeff = _centrifugal_coefficient(p.nu, mt, centrifugal)
    kinetic = 1j * m_c * (x - y) ** 2 / (2.0 * mt.hbar * eps)
    singular = -1j * coeff * eps / (mt.hbar * xy)
    pref = np.sqrt(m_c / (2j * math.pi * mt.hbar * eps)) / np.abs(xy) ** p.nu
    return pref * np.exp(kinetic + singular)


def _centrifugal_coefficient(nu: float, mt: MassTime, centrifugal: str) -> float:
    if centrifugal == "derived":
        return mt.hbar**2 * nu * nu / (2.0 * mt.mass)
    if centrifugal == "printed":
        return nu * nu / mt.mass
    raise ValueError(f"unknown centrifugal convention {centrifugal!r}")


def naive_slice_action(xj, xjm1, eps: float, V: Potential, p, mt: MassTime, centrifugal: str = "derived"):
    """Pieces of the naive slice exponent, each times ``eps`` where relevant.

    Returns ``(kinetic, centrifugal, potential)`` so that the slice phase is
    ``(i/hbar) (kinetic - centrifugal - potential)`` with the effective
    potential ``C / xhat^2 + V`` evaluated at ``xhat^2 = x_j x_{j-1}``.
    """
    nu = as_param(p).nu
    xj = np.asarray(xj, dtype=float)
    xjm1 = np.asarray(xjm1, dtype=float)
    kinetic = mt.mass * (xj - xjm1) ** 2 / (2.0 * eps)
    cent = _centrifugal_coefficient(nu, mt, centrifugal) * eps / (xj * xjm1)
    pot = 0.5 * (V(xj) + V(xjm1)) * eps
    return kinetic, cent, pot


def short_time_kernel(
    V: Potential,
    cfg: SliceConfig,
    p,
    scheme: str = "exact_dunkl",
    centrifugal: str = "derived",
) -> TransferKernel:
    """Transfer kernel for one slice of length ``cfg.epsilon``.

    ``exact_dunkl``
        ``K_nu(x, y; eps) exp(-(i/hbar)(V(x) + V(y)) eps / 2)``.
    ``naive_asymptotic``
        The same splitting around the naive kernel of
        :func:`naive_kernel_values`; for diagnostics only.
    ``recombined``
        For the harmonic potential only: the oscillator propagator at time
        ``eps``, which the endpoint-mean kernel approaches up to ``O(eps^2)``
        factors and which composes exactly.
    """
    p = as_param(p)
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    grid = cfg.grid
    eps = cfg.epsilon
    mt = cfg.mt
    X, Y = _pair(grid)
    if scheme == "recombined":
        if V.omega is None:
            raise ValueError("the recombined scheme needs the harmonic potential")
        mat = ho_propagator(X, Y, eps, V.omega, p, mt)
    else:
        vx = np.asarray(V(grid.nodes), dtype=float)
        if not np.all(np.isfinite(vx)):
            raise DomainError("potential must be finite on the grid")
        half = np.exp(-0.5j * vx * eps / mt.hbar)
        if scheme == "exact_dunkl":
            core = free_propagator(X, Y, eps, p, mt)
        else:
            if np.any(grid.nodes == 0):
                raise DomainError("the naive scheme needs a grid without a node at 0")
            core = naive_kernel_values(X, Y, eps, p, mt, centrifugal)
        mat = half[:, None] * core * half[None, :]
    return TransferKernel(np.ascontiguousarray(mat), eps, V.name, grid, 1, scheme)


def chain(left: TransferKernel, right: TransferKernel) -> TransferKernel:
    """``left`` after ``right``: ``int dz |z|^{2 nu} L(x, z) R(z, y)``."""
    if not left.grid.same_as(right.grid):
        raise GridMismatchError("kernels live on different grids")
    if left.slice_time != right.slice_time or left.potential_id != right.potential_id:
        raise ValueError("kernels have different slice times or potentials")
    mat = left.matrix @ (left.grid.weights[:, None] * right.matrix)
    return TransferKernel(mat, left.slice_time, left.potential_id, left.grid, left.n_slices + right.n_slices, left.scheme)


def compose(kernel: TransferKernel, n: int) -> TransferKernel:
    """``n``-fold weighted product of ``kernel`` with itself, left to right."""
    if n < 1 or int(n) != n:
        raise ValueError("n must be a positive integer")
    out = kernel
    for _ in range(n - 1):
        out = chain(kernel, out)
    return out


def interior_mask(grid: WeightedGrid, inner: float) -> np.ndarray:
    return np.abs(grid.nodes) <= inner


def relative_error(composed: TransferKernel, reference: np.ndarray, inner: float) -> float:
    """``max |K - K_ref| / max |K_ref|`` over nodes with ``|x|, |y| <= inner``."""
    m = interior_mask(composed.grid, inner)
    block = np.ix_(m, m)
    ref = reference[block]
    return float(np.max(np.abs(composed.matrix[block] - ref)) / np.max(np.abs(ref)))


def ho_reference(grid: WeightedGrid, total_time: float, omega: float, p, mt: MassTime) -> np.ndarray:
    X, Y = _pair(grid)
    return ho_propagator(X, Y, total_time, omega, p, mt)


def free_reference(grid: WeightedGrid, total_time: float, p, mt: MassTime) -> np.ndarray:
    X, Y = _pair(grid)
    return free_propagator(X, Y, total_time, p, mt)


@dataclass(frozen=True)
class ConvergenceRow:
    n_slices: int
    grid_size: int
    rel_error: float


def ho_convergence_table(
    cfg: SliceConfig,
    p,
    omega: float,
    n_schedule=(8, 16, 32, 64),
    scheme: str = "exact_dunkl",
    inner: float = 2.0,
    centrifugal: str = "derived",
) -> list[ConvergenceRow]:
    """Error of the composed oscillator kernel against the closed form, per N."""
    V = harmonic_potential(omega, cfg.mt.mass)
    ref = ho_reference(cfg.grid, cfg.total_time, omega, p, cfg.mt)
    rows = []
    for n in n_schedule:
        c = cfg.with_slices(n)
        k = compose(short_time_kernel(V, c, p, scheme, centrifugal), n)
        rows.append(ConvergenceRow(n, len(cfg.grid), relative_error(k, ref, inner)))
    return rows


@dataclass(frozen=True)
class NaiveDiagnostic:
    nu: float
    n_schedule: tuple
    naive_errors: tuple
    exact_errors: tuple

    @property
    def exact_monotone(self) -> bool:
        e = self.exact_errors
        return all(b < a for a, b in zip(e, e[1:]))

    @property
    def naive_converges(self) -> bool:
        """Whether the naive error shrinks with N at the exact scheme's pace.

        The naive error is called non-convergent when, from the first to the
        last N, it falls by less than a quarter of the exact scheme's factor
        of improvement, or stays far above it.
        """
        n0, n1 = self.naive_errors[0], self.naive_errors[-1]
        e0, e1 = self.exact_errors[0], self.exact_errors[-1]
        exact_gain = e0 / e1
        naive_gain = n0 / n1
        return naive_gain >= 0.25 * exact_gain and n1 <= 10.0 * e1


def naive_kernel_diagnostic(
    cfg: SliceConfig,
    p,
    omega: float = 1.0,
    n_schedule=(8, 16, 32, 64),
    inner: float = 2.0,
    centrifugal: str = "derived",
) -> NaiveDiagnostic:
    """Compare naive and exact slicing of the oscillator as N grows."""
    p = as_param(p)
    naive = ho_convergence_table(cfg, p, omega, n_schedule, "naive_asymptotic", inner, centrifugal)
    exact = ho_convergence_table(cfg, p, omega, n_schedule, "exact_dunkl", inner)
    return NaiveDiagnostic(
        p.nu,
        tuple(n_schedule),
        tuple(r.rel_error for r in naive),
        tuple(r.rel_error for r in exact),
    )
