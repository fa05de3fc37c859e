"""Special functions and the oscillatory quadrature primitive."""

from .bessel import DomainError, bessel_j0, bessel_j01, bessel_j1
from .quadrature import (
    DEFAULT_QUADRATURE,
    ConvergenceError,
    QuadratureSettings,
    adaptive_quadrature,
    spectral_integral,
    spectral_integrals,
    spectrum_moment,
)

__all__ = [
    "DEFAULT_QUADRATURE",
    "ConvergenceError",
    "DomainError",
    "QuadratureSettings",
    "adaptive_quadrature",
    "bessel_j0",
    "bessel_j01",
    "bessel_j1",
    "spectral_integral",
    "spectral_integrals",
    "spectrum_moment",
]
