"""Dunkl combinatorics, the Dunkl kernel E_nu and the Dunkl derivative."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bessel import (
    THRESHOLDS,
    DomainError,
    RegimeThresholds,
    bessel_i_pair_scaled,
    hankel_coefficients,
)

# exp() overflows just above this
_EXP_LIMIT = 709.0


@dataclass(frozen=True)
class DunklParam:
    """Deformation parameter ``nu > -1/2`` with its constant ``c_nu``."""

    nu: float
    c_nu: float = field(init=False, repr=False)

    def __post_init__(self):
        nu = float(self.nu)
        if not nu > -0.5 or not math.isfinite(nu):
            raise DomainError(f"nu must exceed -1/2, got {self.nu}")
        c1 = 2.0 ** (nu + 0.5) * math.gamma(nu + 0.5)
        c2 = math.sqrt(2.0 * math.pi) * math.exp(
            math.lgamma(2.0 * nu + 1.0) - nu * math.log(2.0) - math.lgamma(nu + 1.0)
        )
        if abs(c1 - c2) > 1e-12 * c1:
            raise ArithmeticError(f"c_nu representations disagree: {c1} vs {c2}")
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "c_nu", c1)


def as_param(p) -> DunklParam:
    return p if isinstance(p, DunklParam) else DunklParam(float(p))


class EvaluationRegime(enum.Enum):
    SERIES = "series"
    BESSEL_REAL = "bessel_real"
    BESSEL_IMAG = "bessel_imag"
    ASYMPTOTIC = "asymptotic"


def asymptotic_threshold(nu: float, thresholds: RegimeThresholds = THRESHOLDS) -> float:
    # the large-argument expansion also needs |x| >> nu^2
    return max(thresholds.bessel_max, 2.0 * (nu + 1.5) ** 2)


def select_regime(
    abs_arg: float,
    nu: float,
    imaginary: bool = False,
    thresholds: RegimeThresholds = THRESHOLDS,
) -> EvaluationRegime:
    """Regime used for ``E_nu(x)`` (or ``E_nu(ix)`` when ``imaginary``)."""
    if abs_arg <= thresholds.series_max:
        return EvaluationRegime.SERIES
    if abs_arg <= asymptotic_threshold(nu, thresholds):
        return EvaluationRegime.BESSEL_IMAG if imaginary else EvaluationRegime.BESSEL_REAL
    return EvaluationRegime.ASYMPTOTIC


def dunkl_number(n: int, p) -> float:
    """``[n]_nu = n + nu (1 - (-1)^n)``."""
    if n < 0:
        raise DomainError("n must be non-negative")
    nu = as_param(p).nu
    return float(n) if n % 2 == 0 else n + 2.0 * nu


def dunkl_factorial(n: int, p) -> float:
    """``[n]_nu! = [1]_nu [2]_nu ... [n]_nu`` with ``[0]_nu! = 1``."""
    if n < 0:
        raise DomainError("n must be non-negative")
    p = as_param(p)
    out = 1.0
    for k in range(1, n + 1):
        out *= dunkl_number(k, p)
    if not math.isfinite(out):
        raise OverflowError(f"[{n}]_nu! is not representable in double precision")
    return out


# --- kernel evaluation paths -------------------------------------------------


def _series(z: np.ndarray, nu: float) -> np.ndarray:
    """Partial sums of sum_n z^n / [n]_nu! until terms drop below 1e-17."""
    term = np.ones(z.shape, dtype=complex)
    total = term.copy()
    n = 0
    while True:
        n += 1
        term = term * z / (n if n % 2 == 0 else n + 2.0 * nu)
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)) or n > 600:
            return total


def _kummer_negative_scaled(x: np.ndarray, nu: float) -> np.ndarray:
    """exp(-x) E_nu(-x) for x >= 0 via E_nu(-x) = exp(-x) 1F1(nu; 2nu+1; 2x).

    Every term of the Kummer series has the same sign, so nothing cancels
    (unlike the even-minus-odd split of the Bessel form).
    """
    b = 2.0 * nu + 1.0
    y = 2.0 * x
    term = np.ones(x.shape)
    total = term.copy()
    n = 0
    while True:
        term = term * (nu + n) / (b + n) * y / (n + 1)
        n += 1
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)) or n > 2000:
            break
    return total * np.exp(-2.0 * x)


def _asymptotic_scaled(x: np.ndarray, nu: float, sign: int) -> np.ndarray:
    """exp(-x) E_nu(sign * x) for large x > 0.

    Uses E_nu(+-x) = Gamma(nu+1/2) (x/2)^(1/2-nu) [I_{nu-1/2}(x) +- I_{nu+1/2}(x)]
    and Hankel's expansion of both terms; the two leading orders reproduce
    the familiar c_nu e^x / (sqrt(2 pi) x^nu) (1 - nu^2/2x) forms.
    """
    if sign < 0 and nu == 0.0:
        return np.exp(-2.0 * x)
    n_terms = 60
    a = hankel_coefficients(nu - 0.5, n_terms) + sign * hankel_coefficients(nu + 0.5, n_terms)
    total = np.zeros(x.shape)
    prev = np.full(x.shape, np.inf)
    active = np.ones(x.shape, dtype=bool)
    powk = np.ones(x.shape)
    for k in range(n_terms):
        term = (-1) ** k * a[k] * powk
        mag = np.abs(term)
        if k > 1:
            active &= mag <= prev
        total += np.where(active, term, 0.0)
        if k > 0:
            prev = np.where(mag > 0, mag, prev)
        powk = powk / x
    pref = math.gamma(nu + 0.5) * (x / 2.0) ** (0.5 - nu) / np.sqrt(2.0 * np.pi * x)
    return pref * total


def _even_odd_scaled(w: np.ndarray, nu: float) -> tuple[np.ndarray, np.ndarray]:
    """exp(-Re w) times the even and odd parts of E_nu(w), for Re w >= 0."""
    i_lo, i_hi = bessel_i_pair_scaled(nu - 0.5, w)
    pref = math.gamma(nu + 0.5) * (w / 2.0) ** (0.5 - nu)
    return pref * i_lo, pref * i_hi


def dunkl_kernel_complex(z, p, scaled: bool = True, thresholds: RegimeThresholds = THRESHOLDS):
    """``E_nu(z)`` for arbitrary complex ``z`` (scaled by ``exp(-|Re z|)``).

    Intended for the mass-regularised propagators, whose kernel arguments
    leave the imaginary axis. Off the axes the error is absolute with
    respect to ``exp(|Re z|)``: when ``Re z < 0`` and ``nu`` is near zero the
    even and odd parts cancel. Use :func:`dunkl_kernel` on the axes.
    """
    nu = as_param(p).nu
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(z) <= thresholds.series_max
    if np.any(small):
        zs = z[small]
        out[small] = _series(zs, nu) * np.exp(-np.abs(zs.real))
    big = ~small
    if np.any(big):
        zb = z[big]
        flip = zb.real < 0
        w = np.where(flip, -zb, zb)
        even, odd = _even_odd_scaled(w, nu)
        out[big] = np.where(flip, even - odd, even + odd)
    if not scaled:
        with np.errstate(over="ignore"):
            out = out * np.exp(np.abs(z.real))
        if not np.all(np.isfinite(out)):
            raise OverflowError("E_nu(z) overflows; use scaled=True")
    return complex(out[0]) if scalar else out


def _real_axis_scaled(x: np.ndarray, nu: float, thresholds: RegimeThresholds) -> np.ndarray:
    out = np.empty(x.shape)
    ax = np.abs(x)
    x_asym = asymptotic_threshold(nu, thresholds)
    pos = x >= 0
    series = pos & (ax <= thresholds.series_max)
    bessel = pos & (ax > thresholds.series_max) & (ax <= x_asym)
    if np.any(series):
        out[series] = _series(x[series].astype(complex), nu).real * np.exp(-ax[series])
    if np.any(bessel):
        even, odd = _even_odd_scaled(ax[bessel].astype(complex), nu)
        out[bessel] = (even + odd).real
    neg = (~pos) & (ax <= x_asym)
    if np.any(neg):
        out[neg] = _kummer_negative_scaled(ax[neg], nu)
    far_pos = pos & (ax > x_asym)
    if np.any(far_pos):
        out[far_pos] = _asymptotic_scaled(ax[far_pos], nu, +1)
    far_neg = (~pos) & (ax > x_asym)
    if np.any(far_neg):
        out[far_neg] = _asymptotic_scaled(ax[far_neg], nu, -1)
    return out


def _imag_axis(x: np.ndarray, nu: float, thresholds: RegimeThresholds) -> np.ndarray:
    """E_nu(i x) for real x."""
    out = np.empty(x.shape, dtype=complex)
    ax = np.abs(x)
    series = ax <= thresholds.series_max
    if np.any(series):
        out[series] = _series(1j * x[series], nu)
    rest = ~series
    if np.any(rest):
        xr = ax[rest]
        # J_mu(x) = exp(-i mu pi/2) I_mu(ix)
        i_lo, i_hi = bessel_i_pair_scaled(nu - 0.5, 1j * xr)
        j_lo = (np.exp(-0.5j * np.pi * (nu - 0.5)) * i_lo).real
        j_hi = (np.exp(-0.5j * np.pi * (nu + 0.5)) * i_hi).real
        pref = math.gamma(nu + 0.5) * (xr / 2.0) ** (0.5 - nu)
        out[rest] = pref * (j_lo + 1j * np.sign(x[rest]) * j_hi)
    return out


def dunkl_kernel(z, p, scaled: bool = False, thresholds: RegimeThresholds = THRESHOLDS):
    """Dunkl kernel ``E_nu(z)`` for ``z`` on the real or imaginary axis.

    Real arguments give real values; purely imaginary ``z = ix`` gives the
    complex value with real part even and imaginary part odd in ``x``.
    ``scaled=True`` multiplies by ``exp(-|Re z|)``.

    Raises
    ------
    DomainError
        If ``z`` has both a non-zero real and imaginary part.
    OverflowError
        If the unscaled value is not representable.
    """
    nu = as_param(p).nu
    arr = np.asarray(z)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite")
    if np.iscomplexobj(arr) and np.any(arr.imag != 0):
        if np.any((arr.real != 0) & (arr.imag != 0)):
            raise DomainError("dunkl_kernel takes purely real or purely imaginary z")
        vals = _imag_axis(arr.imag.astype(float), nu, thresholds)
        return complex(vals[0]) if scalar else vals
    x = arr.real.astype(float)
    vals = _real_axis_scaled(x, nu, thresholds)
    if not scaled:
        if np.any(np.abs(x) > _EXP_LIMIT):
            raise OverflowError("E_nu(x) overflows for |x| > 709; use scaled=True")
        vals = vals * np.exp(np.abs(x))
    return float(vals[0]) if scalar else vals


def dunkl_derivative(
    f: Callable,
    x: float,
    p,
    h: float | None = None,
    smooth: bool = False,
):
    """Dunkl derivative ``f'(x) + (nu/x)(f(x) - f(-x))``.

    ``f'`` is a central difference with step ``h`` (default
    ``max(1e-6, 1e-8 |x|)``). At ``x = 0`` the difference quotient is
    singular; pass ``smooth=True`` to certify ``f`` is differentiable there,
    in which case the limit ``(1 + 2 nu) f'(0)`` is returned.
    """
    nu = as_param(p).nu
    if h is None:
        h = max(1e-6, 1e-8 * abs(x))
    deriv = (f(x + h) - f(x - h)) / (2.0 * h)
    if x == 0:
        if not smooth:
            raise ZeroDivisionError("Dunkl derivative at x = 0 needs smooth=True")
        return (1.0 + 2.0 * nu) * deriv
    return deriv + nu / x * (f(x) - f(-x))
