"""Data streams: i.i.d. and causal linear processes with spectral tooling."""

from .rng import make_generator, rng_algorithm
from .spec import DecayCertificate, InnovationLaw, LinearProcessSpec, truncation_order
from .spectral import (
    CoupledVarianceResult,
    SpectralBounds,
    autocovariance,
    coupled_variance_closed_form,
    parseval_check,
    spectral_bounds,
    spectral_coupled_variance,
    spectral_coupled_variance_detail,
    spectral_density_modulus,
)
from .state import StreamState, stationary_draws, stream_init, stream_next, stream_take

__all__ = [
    "LinearProcessSpec",
    "DecayCertificate",
    "InnovationLaw",
    "truncation_order",
    "StreamState",
    "stream_init",
    "stream_next",
    "stream_take",
    "stationary_draws",
    "spectral_density_modulus",
    "spectral_bounds",
    "SpectralBounds",
    "spectral_coupled_variance",
    "spectral_coupled_variance_detail",
    "CoupledVarianceResult",
    "coupled_variance_closed_form",
    "autocovariance",
    "parseval_check",
    "make_generator",
    "rng_algorithm",
]
