"""Euclidean dynamics: heat kernels, Bessel processes and Feynman-Kac Monte Carlo.

The Dunkl heat kernel splits into two Bessel transition densities,

    d_tau(x, y) = b^{(nu-1/2)}_tau(|x|, |y|) + x y b^{(nu+1/2)}_tau(|x|, |y|),

so pairings of ``exp(tau (L - V))`` with a terminal function are estimated by
simulating a reflecting Bessel process of index ``nu - 1/2`` for the even
part of the function and one of index ``nu + 1/2`` for the odd part. The
Dunkl process itself, which jumps, is never simulated.

Random numbers come from numpy's PCG64. Paths are cut into fixed-size
blocks and block ``i`` draws from ``SeedSequence(seed).spawn(n)[i]``, so a
run is bit-for-bit reproducible for any number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import full_line_grid, speed_measure_grid
from .specfun import DomainError, as_param, bessel_modified_first_kind, dunkl_kernel

REFLECTING = "reflecting_neumann"
ABSORBING = "absorbing_dirichlet"

STEPS_PER_UNIT_TAU = 64
BLOCK_SIZE = 4096
MIN_PATHS = 100
CLAMP_RADIUS = 1e-6


@dataclass(frozen=True)
class BesselIndex:
    alpha: float
    boundary: str = REFLECTING

    def __post_init__(self):
        if not self.alpha > -1:
            raise DomainError(f"Bessel index must exceed -1, got {self.alpha}")
        if self.boundary not in (REFLECTING, ABSORBING):
            raise ValueError(f"unknown boundary {self.boundary!r}")

    @property
    def dimension(self) -> float:
        return 2.0 * self.alpha + 2.0


def dunkl_sector_indices(p) -> tuple[BesselIndex, BesselIndex]:
    """(even, odd) sector processes of the Dunkl process."""
    nu = as_param(p).nu
    return BesselIndex(nu - 0.5, REFLECTING), BesselIndex(nu + 0.5, ABSORBING)


@dataclass(frozen=True, eq=False)
class BesselPath:
    index: BesselIndex
    times: np.ndarray
    positions: np.ndarray
    rng_seed: int

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0) or self.times[0] != 0:
            raise ValueError("times must start at 0 and increase")
        if np.any(self.positions < 0):
            raise ValueError("Bessel paths live on the half-line")


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo mean with ``std_error = sample std / sqrt(n_samples)``."""

    mean: float
    std_error: float
    n_samples: int
    seed: int
    n_steps: int | None = None
    workers: int = 1
    clamp_rate: float = 0.0

    def within(self, value: float, n_sigma: float = 3.0) -> bool:
        return abs(self.mean - value) <= n_sigma * self.std_error


# --- densities -----------------------------------------------------------------


def _check_tau(tau: float) -> None:
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau}")


def dunkl_heat_kernel(x, y, tau: float, p):
    """``exp(-(x^2+y^2)/2 tau) E_nu(xy/tau) / (c_nu tau^{nu+1/2})``."""
    p = as_param(p)
    _check_tau(tau)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    w = x * y / tau
    e_scaled = np.asarray(dunkl_kernel(w, p, scaled=True))
    # exp(-(x^2+y^2)/2 tau + |xy|/tau) = exp(-(|x|-|y|)^2 / 2 tau)
    out = np.exp(-((np.abs(x) - np.abs(y)) ** 2) / (2.0 * tau)) * e_scaled / (p.c_nu * tau ** (p.nu + 0.5))
    return float(out) if out.ndim == 0 else out


def wiener_density(x, y, tau: float):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.exp(-((x - y) ** 2) / (2.0 * tau)) / math.sqrt(2.0 * math.pi * tau)


def _i_over_power_scaled(alpha: float, w: np.ndarray) -> np.ndarray:
    """``exp(-w) I_alpha(w) / w^alpha`` for ``w >= 0``, finite at ``w = 0``."""
    out = np.empty(w.shape)
    small = w <= 1.0
    if np.any(small):
        ws = w[small]
        term = np.full(ws.shape, 1.0 / (2.0**alpha * math.gamma(alpha + 1.0)))
        total = term.copy()
        for k in range(1, 30):
            term = term * ws * ws / (4.0 * k * (k + alpha))
            total += term
        out[small] = total * np.exp(-ws)
    if np.any(~small):
        wb = w[~small]
        out[~small] = bessel_modified_first_kind(alpha, wb, scaled=True) / wb**alpha
    return out


def bessel_density(x, y, tau: float, idx: BesselIndex | float, form: str = "symmetric"):
    """Bessel transition density.

    ``symmetric``: ``b(x, y) = (xy)^{-alpha} exp(-(x^2+y^2)/2 tau) I_alpha(xy/tau) / 2 tau``,
    a density against the speed measure ``2 x^{2 alpha + 1} dx``.
    ``asymmetric``: ``2 x^{2 alpha + 1} b(x, y)``, a probability density in ``x``.
    """
    if not isinstance(idx, BesselIndex):
        idx = BesselIndex(float(idx))
    _check_tau(tau)
    a = idx.alpha
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.any(x < 0) or np.any(y < 0):
        raise DomainError("Bessel densities live on the half-line")
    xs, ys = np.atleast_1d(x), np.atleast_1d(y)
    w = xs * ys / tau
    # (xy)^{-a} I_a(w) = tau^{-a} I_a(w) / w^a
    b = np.exp(-((xs - ys) ** 2) / (2.0 * tau)) * _i_over_power_scaled(a, w) / (2.0 * tau ** (a + 1.0))
    if form == "asymmetric":
        b = 2.0 * xs ** (2.0 * a + 1.0) * b
    elif form != "symmetric":
        raise ValueError(f"unknown form {form!r}")
    return float(b[0]) if x.ndim == 0 else b.reshape(x.shape)


def density_decomposition_check(x, y, tau: float, p, scale: str = "terms"):
    """Residual of ``d = b^{(nu-1/2)}(|x|,|y|) + x y b^{(nu+1/2)}(|x|,|y|)``.

    ``scale="terms"`` divides by ``|b^{(nu-1/2)}| + |x y b^{(nu+1/2)}|``. For
    ``x y < 0`` and small ``nu`` the two terms cancel to a value smaller by
    about ``exp(-2|xy|/tau)``, so this is the error measure double precision
    can honour. ``scale="value"`` divides by ``d`` and ``scale="none"``
    returns the absolute residual.
    """
    p = as_param(p)
    even, odd = dunkl_sector_indices(p)
    d = dunkl_heat_kernel(x, y, tau, p)
    ax, ay = np.abs(x), np.abs(y)
    b_even = bessel_density(ax, ay, tau, even)
    b_odd = np.asarray(x) * np.asarray(y) * bessel_density(ax, ay, tau, odd)
    res = np.abs(d - b_even - b_odd)
    if scale == "terms":
        return res / (np.abs(b_even) + np.abs(b_odd))
    if scale == "value":
        return res / np.abs(d)
    if scale == "none":
        return res
    raise ValueError(f"unknown scale {scale!r}")


def ho_heat_kernel(x, y, tau: float, omega: float, p):
    """Euclidean oscillator kernel of ``exp(tau (L - omega^2 x^2 / 2))``.

    ``(1/c_nu) (w / sinh w tau)^{nu+1/2} exp(-(w/2)(x^2+y^2) coth w tau)
    E_nu(w x y / sinh w tau)``.
    """
    p = as_param(p)
    _check_tau(tau)
    if not omega > 0:
        raise DomainError("omega must be positive")
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    s = math.sinh(omega * tau)
    c = math.cosh(omega * tau)
    a = omega / s
    # exponent -(a c/2)(x^2+y^2) + a|xy| kept together to avoid overflow
    expo = -0.5 * a * c * (x * x + y * y) + a * np.abs(x * y)
    e_scaled = np.asarray(dunkl_kernel(a * x * y, p, scaled=True))
    out = a ** (p.nu + 0.5) * np.exp(expo) * e_scaled / p.c_nu
    return float(out) if out.ndim == 0 else out


def bessel_ho_kernel(x, y, tau: float, omega: float, idx: BesselIndex | float):
    """Radial oscillator kernel of ``exp(tau (L_B - omega^2 z^2 / 2))`` (symmetric form)."""
    if not isinstance(idx, BesselIndex):
        idx = BesselIndex(float(idx))
    _check_tau(tau)
    a = idx.alpha
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    s = math.sinh(omega * tau)
    c = math.cosh(omega * tau)
    q = omega / s
    xs, ys = np.atleast_1d(x), np.atleast_1d(y)
    w = q * xs * ys
    expo = -0.5 * q * c * (xs * xs + ys * ys) + w
    # (xy)^{-a} I_a(w) = q^a I_a(w) / w^a
    out = 0.5 * q ** (a + 1.0) * np.exp(expo) * _i_over_power_scaled(a, w)
    return float(out[0]) if x.ndim == 0 else out.reshape(x.shape)


def heat_pairing_quadrature(
    f: Callable, y: float, tau: float, p, omega: float | None = None, half_width: float = 14.0, n_panels: int = 28
) -> float:
    """``int dx |x|^{2 nu} f(x) K(x, y; tau)`` with the free or oscillator heat kernel."""
    p = as_param(p)
    grid = full_line_grid(p.nu, half_width, n_panels)
    x = grid.nodes
    k = dunkl_heat_kernel(x, y, tau, p) if omega is None else ho_heat_kernel(x, y, tau, omega, p)
    return float(grid.integrate(np.asarray(f(x)) * k))


def smeared_initial_value(y: float, tau: float, p, phi: Callable, weighted: bool = True) -> float:
    """Pair ``d_tau(., y)`` with a test function, with or without ``|x|^{2 nu}``.

    As ``tau -> 0`` the weighted pairing tends to ``phi(y)``; the plain one
    tends to ``phi(y) / |y|^{2 nu}``.
    """
    p = as_param(p)
    nu = p.nu if weighted else 0.0
    grid = full_line_grid(nu, abs(y) + 12.0 * math.sqrt(tau) + 1.0, 64, 16)
    x = grid.nodes
    vals = dunkl_heat_kernel(x, y, tau, p) * np.asarray(phi(x))
    return float(grid.integrate(vals))


# --- sampling ------------------------------------------------------------------


def sample_bessel_step(current, dt: float, idx: BesselIndex | float, rng: np.random.Generator):
    """Exact one-step transition of the Bessel process.

    ``Z^2 / dt`` is noncentral chi-square with ``2 alpha + 2`` degrees of
    freedom and noncentrality ``current^2 / dt``.
    """
    if not isinstance(idx, BesselIndex):
        idx = BesselIndex(float(idx))
    if not dt > 0:
        raise DomainError("dt must be positive")
    cur = np.asarray(current, dtype=float)
    if np.any(cur < 0):
        raise DomainError("Bessel positions are non-negative")
    draws = rng.noncentral_chisquare(idx.dimension, cur * cur / dt, size=cur.shape)
    out = np.sqrt(dt * draws)
    return float(out) if cur.ndim == 0 else out


def sample_bessel_path(start: float, tau: float, n_steps: int, idx: BesselIndex, seed: int) -> BesselPath:
    rng = np.random.Generator(np.random.PCG64(seed))
    times = np.linspace(0.0, tau, n_steps + 1)
    pos = np.empty(n_steps + 1)
    pos[0] = start
    for j in range(n_steps):
        pos[j + 1] = sample_bessel_step(pos[j], times[j + 1] - times[j], idx, rng)
    return BesselPath(idx, times, pos, seed)


def _simulate(start: float, tau: float, n_steps: int, idx: BesselIndex, rng: np.random.Generator, n: int) -> np.ndarray:
    """Skeletons of ``n`` paths, shape (n_steps + 1, n)."""
    dt = tau / n_steps
    z = np.empty((n_steps + 1, n))
    z[0] = start
    for j in range(n_steps):
        z[j + 1] = np.sqrt(dt * rng.noncentral_chisquare(idx.dimension, z[j] * z[j] / dt))
    return z


def trapezoid_path_integral(values: np.ndarray, dt: float) -> np.ndarray:
    """Trapezoid rule along axis 0 of a skeleton of values."""
    return dt * (values.sum(axis=0) - 0.5 * (values[0] + values[-1]))


@dataclass
class _Moments:
    n: int = 0
    mean: np.ndarray | float = 0.0
    m2: np.ndarray | float = 0.0

    @classmethod
    def of(cls, samples: np.ndarray) -> "_Moments":
        # samples has shape (rows, n)
        mean = samples.mean(axis=1)
        return cls(samples.shape[1], mean, ((samples - mean[:, None]) ** 2).sum(axis=1))

    def merge(self, other: "_Moments") -> "_Moments":
        # Chan et al. pairwise update; order of merges is fixed by the caller
        if self.n == 0:
            return other
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        return _Moments(n, mean, m2)

    def std_error(self):
        return np.sqrt(self.m2 / (self.n - 1) / self.n)


def _blocks(n_paths: int, block_size: int) -> list[int]:
    full, rest = divmod(n_paths, block_size)
    return [block_size] * full + ([rest] if rest else [])


def _run_blocks(task: Callable, seed: int, n_paths: int, workers: int | None, block_size: int, stream: int = 0):
    """Run ``task(rng, n)`` per block; returns (merged moments, extra sums)."""
    sizes = _blocks(n_paths, block_size)
    seeds = np.random.SeedSequence(seed, spawn_key=(stream,)).spawn(len(sizes))
    jobs = [(np.random.Generator(np.random.PCG64(s)), n) for s, n in zip(seeds, sizes)]
    workers = 1 if workers is None else max(1, int(workers))
    if workers == 1:
        results = [task(rng, n) for rng, n in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: task(*job), jobs))
    total = _Moments()
    extra = 0
    for samples, count in results:
        total = total.merge(_Moments.of(samples))
        extra += count
    return total, extra


def _check_symmetric(V: Callable) -> None:
    probe = np.linspace(0.05, 6.0, 40)
    vp = np.asarray(V(probe), dtype=float)
    vm = np.asarray(V(-probe), dtype=float)
    if not (np.all(np.isfinite(vp)) and np.all(np.isfinite(vm))):
        raise DomainError("potential must be finite")
    if np.max(np.abs(vp - vm)) > 1e-12 * max(1.0, float(np.max(np.abs(vp)))):
        raise DomainError("the Feynman-Kac reduction needs a symmetric potential V(x) = V(-x)")


def default_steps(tau: float) -> int:
    return max(1, math.ceil(STEPS_PER_UNIT_TAU * tau))


def _sector_task(V, f_sector, start, tau, n_steps, idx, refine):
    """Per-block sampler returning weights for 1 or 2 skeleton resolutions."""

    def task(rng, n):
        steps = 2 * n_steps if refine else n_steps
        z = _simulate(start, tau, steps, idx, rng, n)
        g = f_sector(z[-1])
        fine = g * np.exp(-trapezoid_path_integral(V(z), tau / steps))
        if not refine:
            return fine[None, :], 0
        coarse_z = z[::2]
        coarse = g * np.exp(-trapezoid_path_integral(V(coarse_z), tau / n_steps))
        return np.vstack([coarse, fine]), 0

    return task


def _sector_functions(f: Callable):
    def even(z):
        return 0.5 * (f(z) + f(-z))

    def odd_over_z(z):
        return 0.5 * (f(z) - f(-z)) / z

    return even, odd_over_z


def _fk_moments(V, y, tau, p, f, n_paths, n_steps, seed, workers, block_size, refine):
    p = as_param(p)
    _check_tau(tau)
    if n_paths < MIN_PATHS:
        raise ValueError(f"n_paths must be at least {MIN_PATHS}")
    if V is None:
        V = lambda x: np.zeros_like(x)  # noqa: E731
    _check_symmetric(V)
    n_steps = default_steps(tau) if n_steps is None else int(n_steps)
    even_idx, odd_idx = dunkl_sector_indices(p)
    f_even, f_odd = _sector_functions(f)
    ay = abs(y)
    m_even, _ = _run_blocks(_sector_task(V, f_even, ay, tau, n_steps, even_idx, refine), seed, n_paths, workers, block_size, 0)
    if y == 0:
        m_odd = None
    else:
        m_odd, _ = _run_blocks(_sector_task(V, f_odd, ay, tau, n_steps, odd_idx, refine), seed, n_paths, workers, block_size, 1)
    return m_even, m_odd, n_steps


def _combine(m_even: _Moments, m_odd: _Moments | None, y: float, row: int):
    mean = float(np.atleast_1d(m_even.mean)[row])
    var = float(np.atleast_1d(m_even.std_error())[row]) ** 2
    if m_odd is not None:
        mean += y * float(np.atleast_1d(m_odd.mean)[row])
        var += (y * float(np.atleast_1d(m_odd.std_error())[row])) ** 2
    return mean, math.sqrt(var)


def feynman_kac_mc(
    V: Callable | None,
    y: float,
    tau: float,
    p,
    f: Callable,
    n_paths: int,
    n_steps: int | None = None,
    seed: int = 0,
    workers: int | None = None,
    block_size: int = BLOCK_SIZE,
) -> MCEstimate:
    """Estimate ``int dx |x|^{2 nu} f(x) <x| exp(tau (L - V)) |y>``.

    The even part of ``f`` is averaged over the index ``nu - 1/2`` process
    and ``f_odd(z)/z`` over the index ``nu + 1/2`` process, both started at
    ``|y|``; the odd sector enters with the factor ``y``. ``n_paths`` paths
    are used per sector, and the time integral of ``V`` is a trapezoid rule
    on ``n_steps`` steps (default 64 per unit ``tau``).
    """
    m_even, m_odd, n_steps = _fk_moments(V, y, tau, p, f, n_paths, n_steps, seed, workers, block_size, False)
    mean, se = _combine(m_even, m_odd, y, 0)
    return MCEstimate(mean, se, n_paths, seed, n_steps, workers or 1)


def feynman_kac_refinement(
    V: Callable | None,
    y: float,
    tau: float,
    p,
    f: Callable,
    n_paths: int,
    n_steps: int | None = None,
    seed: int = 0,
    workers: int | None = None,
    block_size: int = BLOCK_SIZE,
) -> tuple[MCEstimate, MCEstimate]:
    """Estimates with ``n_steps`` and ``2 n_steps`` from the same paths.

    Paths are simulated on the fine skeleton; the coarse estimate reads
    every other point, which is itself an exact ``n_steps`` skeleton. The
    difference then isolates the bias of the trapezoid rule.
    """
    m_even, m_odd, n_steps = _fk_moments(V, y, tau, p, f, n_paths, n_steps, seed, workers, block_size, True)
    coarse = MCEstimate(*_combine(m_even, m_odd, y, 0), n_paths, seed, n_steps, workers or 1)
    fine = MCEstimate(*_combine(m_even, m_odd, y, 1), n_paths, seed, 2 * n_steps, workers or 1)
    return coarse, fine


# --- index change --------------------------------------------------------------


@dataclass(frozen=True)
class RadonNikodymReport:
    alpha: float
    beta: float
    direct: MCEstimate
    reweighted: MCEstimate
    clamp_rate: float
    closed_form: float | None = None

    @property
    def difference(self) -> float:
        return self.reweighted.mean - self.direct.mean

    @property
    def combined_error(self) -> float:
        return math.hypot(self.direct.std_error, self.reweighted.std_error)

    @property
    def agree(self) -> bool:
        return abs(self.difference) <= 3.0 * self.combined_error


def radon_nikodym_check(
    alpha: float,
    beta: float,
    y: float,
    tau: float,
    n_paths: int,
    seed: int = 0,
    g: Callable | None = None,
    omega: float | None = None,
    n_steps: int | None = None,
    workers: int | None = None,
    clamp: float = CLAMP_RADIUS,
    block_size: int = BLOCK_SIZE,
    common_random_numbers: bool = False,
) -> RadonNikodymReport:
    """Check the index change between Bessel path integrals by simulation.

    Direct side: ``E^beta_y[g(Z_tau) exp(-int V)]``. Reweighted side:
    ``E^alpha_y[(Z_tau/y)^{beta-alpha} g(Z_tau) exp(-int V + (beta^2-alpha^2)/2z^2)]``,
    the same quantity written through the alpha process. ``V`` is
    ``omega^2 z^2 / 2`` when ``omega`` is given, otherwise zero, in which
    case the closed form is the free density pairing. Skeleton points below
    ``clamp`` are raised to ``clamp`` inside ``1/z^2``; the fraction of
    paths affected is reported.
    """
    a_idx, b_idx = BesselIndex(alpha), BesselIndex(beta)
    _check_tau(tau)
    if not y > 0:
        raise DomainError("start point must be positive")
    if n_paths < MIN_PATHS:
        raise ValueError(f"n_paths must be at least {MIN_PATHS}")
    if g is None:
        g = lambda z: np.exp(-0.5 * (z - 1.0) ** 2)  # noqa: E731
    n_steps = default_steps(tau) if n_steps is None else int(n_steps)
    dt = tau / n_steps
    if omega is None:
        V = lambda z: np.zeros_like(z)  # noqa: E731
    else:
        V = lambda z: 0.5 * omega**2 * z * z  # noqa: E731
    extra = 0.5 * (beta * beta - alpha * alpha)

    def direct_task(rng, n):
        z = _simulate(y, tau, n_steps, b_idx, rng, n)
        return (g(z[-1]) * np.exp(-trapezoid_path_integral(V(z), dt)))[None, :], 0

    def reweighted_task(rng, n):
        z = _simulate(y, tau, n_steps, a_idx, rng, n)
        zc = np.maximum(z, clamp)
        clamped = int(np.count_nonzero(np.any(z < clamp, axis=0))) if extra != 0 else 0
        pot = V(z) + (extra / (zc * zc) if extra != 0 else 0.0)
        w = (z[-1] / y) ** (beta - alpha) * g(z[-1]) * np.exp(-trapezoid_path_integral(pot, dt))
        return w[None, :], clamped

    m_b, _ = _run_blocks(direct_task, seed, n_paths, workers, block_size, 0)
    m_a, n_clamped = _run_blocks(reweighted_task, seed, n_paths, workers, block_size, 0 if common_random_numbers else 1)
    direct = MCEstimate(float(m_b.mean[0]), float(m_b.std_error()[0]), n_paths, seed, n_steps, workers or 1)
    rate = n_clamped / n_paths
    rew = MCEstimate(float(m_a.mean[0]), float(m_a.std_error()[0]), n_paths, seed, n_steps, workers or 1, rate)

    grid = speed_measure_grid(beta, max(12.0, y + 12.0 * math.sqrt(tau)), 32)
    if omega is None:
        kern = bessel_density(grid.nodes, y, tau, b_idx)
    else:
        kern = bessel_ho_kernel(grid.nodes, y, tau, omega, b_idx)
    closed = float(grid.integrate(g(grid.nodes) * kern))
    return RadonNikodymReport(alpha, beta, direct, rew, rate, closed)
