"""Special functions for Wigner-Dunkl quantum mechanics."""

from .bessel import (
    THRESHOLDS,
    DomainError,
    RegimeThresholds,
    bessel_first_kind,
    bessel_i_pair_scaled,
    bessel_modified_first_kind,
)
from .dunkl import (
    DunklParam,
    EvaluationRegime,
    as_param,
    dunkl_derivative,
    dunkl_factorial,
    dunkl_kernel,
    dunkl_kernel_complex,
    dunkl_number,
    select_regime,
)

__all__ = [
    "THRESHOLDS",
    "DomainError",
    "DunklParam",
    "EvaluationRegime",
    "RegimeThresholds",
    "as_param",
    "bessel_first_kind",
    "bessel_i_pair_scaled",
    "bessel_modified_first_kind",
    "dunkl_derivative",
    "dunkl_factorial",
    "dunkl_kernel",
    "dunkl_kernel_complex",
    "dunkl_number",
    "select_regime",
]
