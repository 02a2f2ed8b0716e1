"""Real-time dynamics: plane waves, Gaussian packets and closed-form propagators.

Propagators are written in the common form

    K = (1/c_nu) a^{nu+1/2} exp(-g (x^2 + y^2) / 2) E_nu(a x y)

with ``a = m/(i hbar t)``, ``g = a`` for the free particle and
``a = m w/(i hbar sin wt)``, ``g = a cos wt`` for the oscillator. The same
code then covers real time, complex mass and imaginary time ``t = -i tau``
(where it becomes the heat kernel). Values are assembled in the log domain
with the exponentially scaled kernel so large arguments never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .quadrature import full_line_grid, half_line_grid
from .specfun import DomainError, DunklParam, as_param, dunkl_kernel, dunkl_kernel_complex
from .transform import dunkl_transform

# integrating an oscillatory kernel uses this fraction of m as imaginary mass
DEFAULT_REGULARIZER = 0.05
CAUSTIC_TOL = 1e-8


class CausticError(DomainError):
    """Oscillator propagator requested at a caustic, sin(w t) = 0."""


@dataclass(frozen=True)
class MassTime:
    """Mass, Planck constant and the imaginary mass regulariser ``eps_m``.

    The kinetic term uses ``m + i eps_m``; potentials keep the real mass.
    """

    mass: float = 1.0
    hbar: float = 1.0
    eps_m: float = 0.0

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError("mass must be positive")
        if not self.hbar > 0:
            raise DomainError("hbar must be positive")
        if not self.eps_m >= 0:
            raise DomainError("eps_m must be non-negative")

    @property
    def complex_mass(self) -> complex:
        return complex(self.mass, self.eps_m)

    def regularized(self, fraction: float = DEFAULT_REGULARIZER) -> "MassTime":
        return replace(self, eps_m=fraction * self.mass)


def _check_time(t) -> complex:
    t = complex(t)
    if t.imag == 0.0 and not t.real > 0:
        raise DomainError(f"time must be positive, got {t.real}")
    if t.imag > 0:
        raise DomainError("complex times must lie in the lower half-plane")
    return t


def _log_kernel(a: complex, g: complex, x, y, nu: float, log_pref: complex) -> np.ndarray:
    """log of exp(log_pref) exp(-g (x^2+y^2)/2) E_nu(a x y), elementwise."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    # a * (x * y) keeps the kernel exactly symmetric in x and y
    z = np.asarray(a * (x * y))
    if a.imag == 0.0:
        e_scaled = np.asarray(dunkl_kernel(z.real, nu, scaled=True), dtype=complex)
        log_scale = np.abs(z.real)
    elif a.real == 0.0:
        e_scaled = dunkl_kernel(1j * z.imag, nu)
        log_scale = np.zeros(z.shape)
    else:
        e_scaled = dunkl_kernel_complex(z, nu, scaled=True)
        log_scale = np.abs(z.real)
    with np.errstate(divide="ignore"):
        log_e = np.log(np.asarray(e_scaled, dtype=complex))
    return log_pref - g * (x * x + y * y) / 2.0 + log_scale + log_e


def _finish(logk: np.ndarray, scalar: bool):
    out = np.exp(logk)
    return complex(out) if scalar else out


# --- states --------------------------------------------------------------------


def plane_wave(k, x, p) -> np.ndarray | complex:
    """``psi_k(x) = |k|^nu E_nu(ikx) / c_nu``, broadcast over ``k`` and ``x``."""
    p = as_param(p)
    k, x = np.broadcast_arrays(np.asarray(k, dtype=float), np.asarray(x, dtype=float))
    scalar = k.ndim == 0
    if p.nu < 0 and np.any(k == 0):
        raise DomainError("|k|^nu is singular at k = 0 for nu < 0")
    with np.errstate(divide="ignore"):
        amp = np.where(k == 0, 1.0 if p.nu == 0 else 0.0, np.abs(k) ** p.nu)
    vals = amp * np.asarray(dunkl_kernel(1j * (k * x).ravel(), p)).reshape(k.shape) / p.c_nu
    return complex(vals) if scalar else vals


@dataclass(frozen=True)
class PacketState:
    """Gaussian packet ``Psi(x,t) = norm_factor * exp(-beta_t x^2 / 2)``."""

    beta0: float
    t: float
    beta_t: complex
    norm_factor: complex
    nu: float
    mt: MassTime = field(default_factory=MassTime)

    def wavefunction(self, x):
        x = np.asarray(x, dtype=float)
        return self.norm_factor * np.exp(-self.beta_t * x * x / 2.0)

    def density(self, x):
        return np.abs(self.wavefunction(x)) ** 2

    @property
    def density_width(self) -> float:
        """``beta / (1 + hbar^2 beta^2 t^2 / m^2)``, the exponent of ``|Psi|^2``."""
        return float((self.beta_t + np.conj(self.beta_t)).real / 2.0)

    def momentum_amplitude(self, k):
        """Closed-form ``a(k,t) = a(k) exp(-i hbar t k^2 / 2m)``."""
        k = np.asarray(k, dtype=float)
        b = self.beta0
        a0 = math.sqrt(b ** (self.nu + 0.5) / math.gamma(self.nu + 0.5)) * np.exp(-k * k / (2 * b)) / b ** (self.nu + 0.5)
        return a0 * np.exp(-1j * self.mt.hbar * self.t * k * k / (2.0 * self.mt.complex_mass))


def evolve_gaussian(beta0: float, t: float, p, mt: MassTime | None = None) -> PacketState:
    """Free evolution of the normalised Gaussian ``exp(-beta0 x^2/2)``.

    ``beta(t) = beta0 / (1 + i hbar beta0 t / m)`` and the normalisation is
    ``sqrt(beta0^{nu+1/2} / Gamma(nu+1/2)) (1 + i hbar beta0 t/m)^{-(nu+1/2)}``,
    where the power uses the principal branch of a base with positive real
    part, which is continuous in ``t``.
    """
    p = as_param(p)
    mt = mt or MassTime()
    if not beta0 > 0:
        raise DomainError("beta0 must be positive")
    s = 1.0 + 1j * mt.hbar * beta0 * t / mt.complex_mass
    norm = math.sqrt(beta0 ** (p.nu + 0.5) / math.gamma(p.nu + 0.5)) * s ** (-(p.nu + 0.5))
    return PacketState(beta0, t, beta0 / s, complex(norm), p.nu, mt)


def packet_observables(ps: PacketState, p=None) -> tuple[float, float, float]:
    """Closed-form width variances ``(dx2, dk2, dx2 * dP2)``.

    ``dx2 = (1 + hbar^2 beta^2 t^2/m^2) / 2 beta`` and ``dk2 = beta / 2`` are the
    variances of ``|Psi|^2`` and ``|a|^2`` read as Gaussians in plain ``dx``
    and ``dk``. The Hilbert-space expectations under ``|x|^{2 nu} dx`` are
    ``2 nu + 1`` times larger; see :func:`hilbert_space_variances`.
    """
    mt = ps.mt
    b = ps.beta0
    dx2 = (1.0 + (mt.hbar * b * ps.t / mt.mass) ** 2) / (2.0 * b)
    dk2 = b / 2.0
    return dx2, dk2, dx2 * mt.hbar**2 * dk2


def hilbert_space_variances(ps: PacketState) -> tuple[float, float, float]:
    """``<x^2>``, ``<k^2>`` and ``<x^2><P^2>`` under the weighted measure."""
    dx2, dk2, prod = packet_observables(ps)
    f = 2.0 * ps.nu + 1.0
    return f * dx2, f * dk2, f * f * prod


def packet_moments(ps: PacketState, weighted: bool = True, n_panels: int = 8, order: int = 16) -> tuple[float, float, float]:
    """Second moments of ``|Psi(x,t)|^2`` and ``|a(k,t)|^2`` by quadrature.

    ``a(k,t)`` is obtained by a numerical Dunkl transform of ``Psi(x,t)``,
    not from its closed form. With ``weighted=True`` the moments are taken
    under ``|x|^{2 nu} dx`` (Hilbert-space expectations); otherwise in plain
    ``dx``, normalised by the plain integral, which gives the Gaussian width
    variances.
    """
    nu = ps.nu
    sigma_x = math.sqrt(1.0 / ps.density_width)
    sigma_k = math.sqrt(ps.beta0)
    p = DunklParam(nu)

    def second_moment(dens_fn, sigma):
        grid = full_line_grid(nu if weighted else 0.0, 10.0 * sigma, n_panels, order)
        d = dens_fn(grid.nodes)
        m2 = grid.integrate(grid.nodes**2 * d)
        # weighted densities are already normalised; plain ones are not
        return m2 if weighted else m2 / grid.integrate(d)

    def k_density(k):
        # the packet is even, so |a(k)|^2 is even and only k >= 0 is transformed
        half = k[k > 0]
        amp = dunkl_transform(ps.wavefunction, p, half, x_max=12.0 * sigma_x)
        d = np.abs(amp.values) ** 2
        return np.concatenate([d[::-1], d])

    dx2 = float(second_moment(ps.density, sigma_x))
    dk2 = float(second_moment(k_density, sigma_k))
    return dx2, dk2, dx2 * ps.mt.hbar**2 * dk2


# --- propagators ---------------------------------------------------------------


def free_propagator(x, y, t, p, mt: MassTime | None = None):
    """Free propagator ``K_nu(x, y; t)``.

    ``(2 pi)^{nu+1/2}/c_nu (m/2 pi i hbar t)^{nu+1/2} exp(i m (x^2+y^2)/2 hbar t)
    E_nu(m x y / i hbar t)``, vectorised over ``x`` and ``y``. ``t`` may also be
    complex in the closed lower half-plane; ``t = -i tau`` with
    ``m = hbar = 1`` gives the Dunkl heat kernel.
    """
    p = as_param(p)
    mt = mt or MassTime()
    t = _check_time(t)
    a = mt.complex_mass / (1j * mt.hbar * t)
    log_pref = (p.nu + 0.5) * np.log(a) - math.log(p.c_nu)
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    return _finish(_log_kernel(a, a, x, y, p.nu, log_pref), scalar)


def _ho_coefficients(t: complex, omega: float, nu: float, mt: MassTime) -> tuple[complex, complex, complex]:
    """(a, g, log a^{nu+1/2}) for the oscillator at time t."""
    m_c = mt.complex_mass
    w_c = omega * np.sqrt(mt.mass / m_c)
    phase = w_c * t
    s = np.sin(phase)
    if abs(s) < CAUSTIC_TOL:
        raise CausticError(f"sin(omega t) = {abs(s):.2e} is at a caustic")
    a = m_c * w_c / (1j * mt.hbar * s)
    log_abs = math.log(abs(a))
    arg = float(np.angle(a))
    if t.imag == 0.0:
        # continue the phase through the caustics passed since t = 0
        arg -= 2.0 * math.pi * math.floor((phase.real / math.pi + 1.0) / 2.0)
    log_pow = (nu + 0.5) * complex(log_abs, arg)
    return a, a * np.cos(phase), log_pow


def ho_propagator(x, y, t, omega: float, p, mt: MassTime | None = None):
    """Harmonic-oscillator propagator.

    ``(1/c_nu) (m w / i hbar sin wt)^{nu+1/2}
    exp((i m w / 2 hbar)(x^2+y^2) cot wt) E_nu(m w x y / i hbar sin wt)``.
    With ``eps_m > 0`` the kinetic mass is complex and the frequency becomes
    ``w sqrt(m / m_c)`` so that the potential stays ``m w^2 x^2 / 2``.
    Past a caustic the power's phase is continued from ``t -> 0+``.
    """
    p = as_param(p)
    mt = mt or MassTime()
    if not omega > 0:
        raise DomainError("omega must be positive")
    t = _check_time(t)
    a, g, log_pow = _ho_coefficients(t, omega, p.nu, mt)
    log_pref = log_pow - math.log(p.c_nu)
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    return _finish(_log_kernel(a, g, x, y, p.nu, log_pref), scalar)


def mehler_kernel(x, y, t, omega: float, mt: MassTime | None = None):
    """Undeformed oscillator kernel, for ``0 < omega t < pi``."""
    mt = mt or MassTime()
    m, hb = mt.mass, mt.hbar
    s, c = math.sin(omega * t), math.cos(omega * t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.sqrt(m * omega / (2j * math.pi * hb * s)) * np.exp(
        1j * m * omega / (2 * hb) * ((x * x + y * y) * c - 2 * x * y) / s
    )


def spectral_propagator(x: float, y: float, t: float, p, mt: MassTime, order: int = 16) -> complex:
    """Free propagator from its spectral integral over plane waves.

    ``(1/c_nu^2) int dk |k|^{2 nu} exp(-i hbar t k^2 / 2 m_c) E(iky) E*(ikx)``;
    requires ``eps_m > 0`` so the integrand decays.
    """
    p = as_param(p)
    if not mt.eps_m > 0:
        raise DomainError("the spectral integral needs eps_m > 0")
    inv_m = 1.0 / mt.complex_mass
    decay = mt.hbar * t * (-inv_m.imag) / 2.0  # coefficient of -k^2
    k_max = math.sqrt(45.0 / decay)
    # oscillation rate of the integrand at the far end of the interval
    rate = abs(x) + abs(y) + mt.hbar * t * abs(inv_m) * k_max
    n_panels = max(4, math.ceil(k_max * rate / math.pi))
    grid = half_line_grid(2.0 * p.nu, k_max, n_panels, order)
    k = grid.nodes
    ex = dunkl_kernel(1j * k * x, p)
    ey = dunkl_kernel(1j * k * y, p)
    sym = ex.real * ey.real + ex.imag * ey.imag  # k-even part of E(iky) E*(ikx)
    phase = np.exp(-1j * mt.hbar * t * k * k * inv_m / 2.0)
    return complex(2.0 * grid.integrate(phase * sym) / p.c_nu**2)
