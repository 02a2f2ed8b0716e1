"""Wigner-Dunkl quantum mechanics: kernels, propagators, path integrals."""

from .dynamics import (
    CausticError,
    MassTime,
    PacketState,
    evolve_gaussian,
    free_propagator,
    ho_propagator,
    packet_moments,
    packet_observables,
    spectral_propagator,
)
from .quadrature import WeightedGrid, full_line_grid, half_line_grid, speed_measure_grid
from .specfun import DomainError, DunklParam, bessel_first_kind, bessel_modified_first_kind, dunkl_kernel
from .stochastic import (
    BesselIndex,
    MCEstimate,
    bessel_density,
    density_decomposition_check,
    dunkl_heat_kernel,
    feynman_kac_mc,
    ho_heat_kernel,
    radon_nikodym_check,
    sample_bessel_step,
)
from .transform import SampledFunction, dunkl_transform, inverse_dunkl_transform, smeared_orthogonality_check
from .trotter import SliceConfig, TransferKernel, compose, ho_convergence_table, naive_kernel_diagnostic, short_time_kernel

__all__ = [
    "BesselIndex",
    "CausticError",
    "DomainError",
    "DunklParam",
    "MCEstimate",
    "MassTime",
    "PacketState",
    "SampledFunction",
    "SliceConfig",
    "TransferKernel",
    "WeightedGrid",
    "bessel_density",
    "bessel_first_kind",
    "bessel_modified_first_kind",
    "compose",
    "density_decomposition_check",
    "dunkl_heat_kernel",
    "dunkl_kernel",
    "dunkl_transform",
    "evolve_gaussian",
    "feynman_kac_mc",
    "free_propagator",
    "full_line_grid",
    "half_line_grid",
    "ho_convergence_table",
    "ho_heat_kernel",
    "ho_propagator",
    "inverse_dunkl_transform",
    "naive_kernel_diagnostic",
    "packet_moments",
    "packet_observables",
    "radon_nikodym_check",
    "sample_bessel_step",
    "short_time_kernel",
    "smeared_orthogonality_check",
    "speed_measure_grid",
    "spectral_propagator",
]
