"""Bessel functions of real order, evaluated in-repo.

``I_mu(w)`` is computed for complex ``w`` in the closed right half-plane,
which covers the modified function on the positive axis and, through
``J_mu(x) = exp(-i mu pi/2) I_mu(ix)``, the ordinary function as well.

Three regimes, selected on ``|w|``:

* ascending power series for ``|w| <= series_max``;
* Miller backward recurrence for ``series_max < |w| <= bessel_max``,
  normalised with Gegenbauer's sum
  ``exp(w) = Gamma(b) (w/2)^-b  sum_k (b+k) (2b)_k / k!  I_{b+k}(w)``;
* Hankel's large-argument expansion beyond that.

All internal routines return values scaled by ``exp(-Re w)`` so that large
real arguments never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Raised when an argument lies outside a function's domain."""


@dataclass(frozen=True)
class RegimeThresholds:
    """Hand-over points between evaluation regimes (absolute argument)."""

    series_max: float = 12.0
    bessel_max: float = 60.0


THRESHOLDS = RegimeThresholds()

_TINY = 1e-30
_RESCALE = 1e200


def _check_order(order: float) -> None:
    if not order > -1.0:
        raise DomainError(f"Bessel order must exceed -1, got {order}")


def hankel_coefficients(mu: float, n_terms: int) -> np.ndarray:
    """Coefficients ``a_k(mu)`` of Hankel's expansion, k = 0..n_terms-1."""
    a = np.empty(n_terms)
    a[0] = 1.0
    four_mu2 = 4.0 * mu * mu
    for k in range(1, n_terms):
        a[k] = a[k - 1] * (four_mu2 - (2 * k - 1) ** 2) / (8.0 * k)
    return a


def _series_scaled(mu: float, w: np.ndarray) -> np.ndarray:
    # (w/2)^mu sum_k (w^2/4)^k / (k! Gamma(k+mu+1)), times exp(-Re w)
    q = w * w / 4.0
    term = np.full(w.shape, 1.0 / math.gamma(mu + 1.0), dtype=complex)
    total = term.copy()
    k = 0
    while True:
        k += 1
        term = term * q / (k * (k + mu))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)) or k > 400:
            break
    with np.errstate(divide="ignore", invalid="ignore"):
        pref = np.where(w == 0, 1.0 if mu == 0 else 0.0, (w / 2.0) ** mu)
    return pref * total * np.exp(-w.real)


def _miller_pair_scaled(mu: float, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Backward recurrence for (I_mu, I_mu+1) scaled by exp(-Re w).

    Requires w != 0 everywhere.
    """
    # Normalise at the fractional order in (0, 1]; larger base orders lose
    # digits to cancellation in the Gegenbauer sum near the imaginary axis.
    base = mu - math.ceil(mu) + 1.0
    m = int(round(mu - base))  # mu = base + m, m >= -1
    wmax = float(np.max(np.abs(w)))
    n_top = int(wmax + 30.0 + 4.0 * math.sqrt(wmax)) + max(m, 0) + 2
    two_over_w = 2.0 / w

    # Gegenbauer weights divided by Gamma(b+1):
    #   k = 0 -> 1,  k >= 1 -> 2 (b+k) (2b+1)_{k-1} / k!
    k = np.arange(1, n_top + 1)
    lg = np.array([math.lgamma(2.0 * base + kk) - math.lgamma(kk + 1.0) for kk in k])
    weights = np.empty(n_top + 1)
    weights[0] = 1.0
    weights[1:] = 2.0 * (base + k) * np.exp(lg - math.lgamma(2.0 * base + 1.0))

    r_next = np.zeros(w.shape, dtype=complex)  # order base + k + 1
    r_cur = np.full(w.shape, _TINY, dtype=complex)  # order base + k
    norm = weights[n_top] * r_cur
    keep_lo = keep_hi = None
    for k in range(n_top, 0, -1):
        r_prev = (base + k) * two_over_w * r_cur + r_next
        r_next, r_cur = r_cur, r_prev
        norm = norm + weights[k - 1] * r_cur
        big = np.abs(r_cur) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            r_cur = r_cur * scale
            r_next = r_next * scale
            norm = norm * scale
            if keep_hi is not None:
                keep_hi = keep_hi * scale
                keep_lo = keep_lo * scale
        if k - 1 == m:
            keep_lo, keep_hi = r_cur, r_next
    lam = np.exp(1j * w.imag) * (w / 2.0) ** base / (math.gamma(base + 1.0) * norm)
    if m == -1:
        # one more downward step: order base - 1 = mu
        return lam * (base * two_over_w * r_cur + r_next), lam * r_cur
    return lam * keep_lo, lam * keep_hi


def _hankel_scaled(mu: float, w: np.ndarray, n_terms: int = 40) -> np.ndarray:
    # DLMF 10.40.5, sign chosen from the half-plane of Im w
    a = hankel_coefficients(mu, n_terms)
    inv = 1.0 / w
    s_alt = np.zeros(w.shape, dtype=complex)
    s_pos = np.zeros(w.shape, dtype=complex)
    powk = np.ones(w.shape, dtype=complex)
    prev = np.full(w.shape, np.inf)
    active = np.ones(w.shape, dtype=bool)
    for k in range(n_terms):
        term = a[k] * powk
        mag = np.abs(term)
        # stop each element at its smallest term (divergent expansion)
        active &= mag <= prev
        s_alt += np.where(active, (-1) ** k * term, 0.0)
        s_pos += np.where(active, term, 0.0)
        prev = mag
        powk = powk * inv
    sign = np.where(w.imag >= 0.0, 1.0, -1.0)
    root = np.sqrt(2.0 * np.pi * w)
    lead = np.exp(1j * w.imag) * s_alt / root
    sub_phase = sign * 1j * np.exp(sign * 1j * mu * np.pi)
    sub = sub_phase * np.exp(-w - w.real) * s_pos / root
    return lead + sub


def bessel_i_pair_scaled(
    mu: float, w, thresholds: RegimeThresholds = THRESHOLDS
) -> tuple[np.ndarray, np.ndarray]:
    """Return ``exp(-Re w) * (I_mu(w), I_{mu+1}(w))`` for ``Re w >= 0``.

    Parameters
    ----------
    mu : float
        Lower order, ``mu > -1``.
    w : array_like of complex
        Arguments in the closed right half-plane.
    """
    _check_order(mu)
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if np.any(w.real < -1e-300 * np.abs(w)):
        raise DomainError("bessel_i_pair_scaled needs Re w >= 0")
    out0 = np.empty(w.shape, dtype=complex)
    out1 = np.empty(w.shape, dtype=complex)
    absw = np.abs(w)
    # Hankel needs |w| large against the order as well.
    asym_min = max(thresholds.bessel_max, 2.0 * (mu + 1.0) ** 2)
    small = absw <= thresholds.series_max
    mid = (~small) & (absw <= asym_min)
    large = absw > asym_min
    if np.any(small):
        ws = w[small]
        out0[small] = _series_scaled(mu, ws)
        out1[small] = _series_scaled(mu + 1.0, ws)
    if np.any(mid):
        a, b = _miller_pair_scaled(mu, w[mid])
        out0[mid] = a
        out1[mid] = b
    if np.any(large):
        wl = w[large]
        out0[large] = _hankel_scaled(mu, wl)
        out1[large] = _hankel_scaled(mu + 1.0, wl)
    return out0, out1


def _as_real_array(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return np.atleast_1d(arr), arr.ndim == 0


def bessel_modified_first_kind(order: float, x, scaled: bool = False):
    """Modified Bessel function ``I_order(x)`` for real ``x >= 0``.

    With ``scaled=True`` returns ``exp(-x) I_order(x)``, which stays finite
    for any ``x``. The unscaled value raises ``OverflowError`` once it is
    no longer representable.
    """
    _check_order(order)
    xs, scalar = _as_real_array(x)
    if np.any(xs < 0) or not np.all(np.isfinite(xs)):
        raise DomainError("x must be finite and non-negative")
    if order < 0 and np.any(xs == 0):
        raise DomainError("I_order(0) is infinite for negative order")
    val, _ = bessel_i_pair_scaled(order, xs)
    val = val.real
    if not scaled:
        with np.errstate(over="ignore"):
            val = val * np.exp(xs)
        if not np.all(np.isfinite(val)):
            raise OverflowError("I_order(x) overflows; use scaled=True")
    return float(val[0]) if scalar else val


def bessel_first_kind(order: float, x):
    """Bessel function of the first kind ``J_order(x)`` for real ``x >= 0``."""
    _check_order(order)
    xs, scalar = _as_real_array(x)
    if np.any(xs < 0) or not np.all(np.isfinite(xs)):
        raise DomainError("x must be finite and non-negative")
    if order < 0 and np.any(xs == 0):
        raise DomainError("J_order(0) is infinite for negative order")
    val, _ = bessel_i_pair_scaled(order, 1j * xs)
    val = (np.exp(-0.5j * np.pi * order) * val).real
    return float(val[0]) if scalar else val
