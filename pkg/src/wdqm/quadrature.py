"""Weighted quadrature grids on the line and the half-line.

Nodes come from Gauss-Legendre panels. The two panels touching the origin
use Gauss-Jacobi rules whose weight is the measure's power of ``|x|`` itself,
so ``|x|^{2 nu}`` (or ``x^{2 alpha + 1}``) is integrated exactly near zero even
when the exponent is negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

FULL_LINE = "full_line"
HALF_LINE = "half_line"


@dataclass(frozen=True, eq=False)
class WeightedGrid:
    """Quadrature nodes with weights that already contain the measure.

    ``exponent`` is the power ``p`` of the measure ``scale * |x|^p dx``:
    ``2 nu`` for the Dunkl measure, ``2 alpha + 1`` (with ``scale = 2``)
    for a Bessel speed measure.
    """

    nodes: np.ndarray
    weights: np.ndarray
    domain: str
    exponent: float
    scale: float = 1.0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise ValueError("weights must be positive and finite")
        if self.domain not in (FULL_LINE, HALF_LINE):
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.domain == HALF_LINE and nodes[0] < 0:
            raise ValueError("half-line grid has negative nodes")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return len(self.nodes)

    def integrate(self, values) -> complex | float:
        """Sum of ``weights * values`` along the last axis."""
        return np.asarray(values) @ self.weights

    def same_as(self, other: "WeightedGrid") -> bool:
        return (
            self.domain == other.domain
            and len(self) == len(other)
            and self.exponent == other.exponent
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )

    @property
    def is_symmetric(self) -> bool:
        return self.domain == FULL_LINE and np.allclose(self.nodes, -self.nodes[::-1], rtol=0, atol=1e-13)


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


@lru_cache(maxsize=64)
def gauss_jacobi(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi rule on [-1, 1] for weight ``(1-u)^a (1+u)^b`` (Golub-Welsch)."""
    if a <= -1 or b <= -1:
        raise ValueError("Jacobi exponents must exceed -1")
    k = np.arange(n, dtype=float)
    s = 2.0 * k + a + b
    diag = np.empty(n)
    diag[0] = (b - a) / (a + b + 2.0)
    if n > 1:
        diag[1:] = (b * b - a * a) / (s[1:] * (s[1:] + 2.0))
    kk = k[1:]
    ss = s[1:]
    off = np.sqrt(
        4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) / (ss * ss * (ss + 1.0) * (ss - 1.0))
    )
    nodes, vecs = np.linalg.eigh(np.diag(diag) + np.diag(off, 1) + np.diag(off, -1))
    mu0 = math.exp(
        (a + b + 1.0) * math.log(2.0)
        + math.lgamma(a + 1.0)
        + math.lgamma(b + 1.0)
        - math.lgamma(a + b + 2.0)
    )
    return nodes, mu0 * vecs[0, :] ** 2


def _half_line_rule(length: float, n_panels: int, order: int, power: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for int_0^length x^power g(x) dx with uniform panels."""
    h = length / n_panels
    u, wj = gauss_jacobi(order, 0.0, power)
    first_nodes = h * (1.0 + u) / 2.0
    first_weights = wj * (h / 2.0) ** (power + 1.0)
    ul, wl = gauss_legendre(order)
    nodes = [first_nodes]
    weights = [first_weights]
    for j in range(1, n_panels):
        x = h * (j + (1.0 + ul) / 2.0)
        nodes.append(x)
        weights.append(wl * h / 2.0 * x**power)
    return np.concatenate(nodes), np.concatenate(weights)


def full_line_grid(nu: float, half_width: float, n_panels: int, order: int = 16) -> WeightedGrid:
    """Symmetric grid on ``[-L, L]`` with weights for ``|x|^{2 nu} dx``.

    ``n_panels`` panels per half-line; no node sits at the origin.
    """
    x, w = _half_line_rule(half_width, n_panels, order, 2.0 * nu)
    return WeightedGrid(
        nodes=np.concatenate([-x[::-1], x]),
        weights=np.concatenate([w[::-1], w]),
        domain=FULL_LINE,
        exponent=2.0 * nu,
    )


def half_line_grid(
    power: float, length: float, n_panels: int, order: int = 16, scale: float = 1.0
) -> WeightedGrid:
    """Grid on ``[0, L]`` with weights for ``scale * x^power dx``."""
    x, w = _half_line_rule(length, n_panels, order, power)
    return WeightedGrid(nodes=x, weights=scale * w, domain=HALF_LINE, exponent=power, scale=scale)


def speed_measure_grid(alpha: float, length: float, n_panels: int, order: int = 16) -> WeightedGrid:
    """Half-line grid for the Bessel speed measure ``2 x^{2 alpha + 1} dx``."""
    return half_line_grid(2.0 * alpha + 1.0, length, n_panels, order, scale=2.0)
