"""Finite-energy X-pulse solutions: closed-form fields, energy checks,
co-moving frames and a finite-aperture FDTD experiment."""

__version__ = "0.1.0"
