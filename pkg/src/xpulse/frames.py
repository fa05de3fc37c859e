"""Lorentz boosts along z and the pulse seen from the co-moving frame.

For the canonical boost V = cos(eta) the laboratory phase becomes
``t - z cos(eta) = sin(eta) t'``, so the boosted field no longer depends on
z': a standing oscillation filling all of space for ``|t'| < T / sin(eta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import DEFAULT_QUADRATURE, spectral_integral, spectral_integrals
from .pulse import AxiconGeometry, CylPoint, scalar_field
from .spectrum import Spectrum

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class BoostFrame:
    V: float
    gamma: float

    def __post_init__(self):
        if not (0.0 < self.V < 1.0):
            raise ValueError(f"frame velocity must lie in (0, 1), got {self.V}")
        if abs(self.gamma * math.sqrt(1.0 - self.V**2) - 1.0) > 1e-12:
            raise ValueError("gamma inconsistent with V")

    @classmethod
    def from_velocity(cls, V: float) -> "BoostFrame":
        return cls(V, 1.0 / math.sqrt(1.0 - V * V))

    @classmethod
    def comoving(cls, g: AxiconGeometry) -> "BoostFrame":
        """V = cos(eta), gamma = 1/sin(eta)."""
        return cls(g.cos_eta, 1.0 / g.sin_eta)


def boost(f: BoostFrame, t, z):
    return f.gamma * (t - f.V * z), f.gamma * (z - f.V * t)


def unboost(f: BoostFrame, t_p, z_p):
    return f.gamma * (t_p + f.V * z_p), f.gamma * (z_p + f.V * t_p)


def in_boosted_window(g: AxiconGeometry, t_p: float) -> bool:
    return abs(t_p) < g.T / g.sin_eta


def boosted_scalar_field(
    g: AxiconGeometry, S: Spectrum, t_p: float, rho: float, z_p: float = 0.0, q=DEFAULT_QUADRATURE
) -> complex:
    """Field in the co-moving frame.  ``z_p`` is accepted and ignored: the
    boosted field does not depend on it."""
    if not in_boosted_window(g, t_p):
        return 0j
    return spectral_integral(S, 0, 0, rho * g.sin_eta, g.sin_eta * t_p, q)


def field_in_frame(
    g: AxiconGeometry, S: Spectrum, f: BoostFrame, t_p: float, rho: float, z_p: float, q=DEFAULT_QUADRATURE
) -> complex:
    """Any frame along z: map back to the laboratory and evaluate there."""
    t, z = unboost(f, t_p, z_p)
    return scalar_field(g, S, CylPoint(t, rho, z), q)


def boost_consistency_check(g: AxiconGeometry, S: Spectrum, points, q=DEFAULT_QUADRATURE) -> float:
    """Max |Phi'(t', rho, z') - Phi(unboost(t', z'), rho)| over ``(t', rho, z')``."""
    f = BoostFrame.comoving(g)
    worst = 0.0
    for t_p, rho, z_p in points:
        lhs = boosted_scalar_field(g, S, t_p, rho, z_p, q)
        rhs = field_in_frame(g, S, f, t_p, rho, z_p, q)
        worst = max(worst, abs(lhs - rhs))
    return worst


def z_independence_check(g: AxiconGeometry, S: Spectrum, points, offsets=(-5.0, 2.0, 10.0), q=DEFAULT_QUADRATURE) -> float:
    """Max change of the boosted field (computed via the laboratory) when z'
    moves by each offset, over ``(t', rho, z')`` points."""
    f = BoostFrame.comoving(g)
    worst = 0.0
    for t_p, rho, z_p in points:
        ref = field_in_frame(g, S, f, t_p, rho, z_p, q)
        for dz in offsets:
            worst = max(worst, abs(field_in_frame(g, S, f, t_p, rho, z_p + dz, q) - ref))
    return worst


def boosted_boundary_check(g: AxiconGeometry, S: Spectrum, t_samples, rho_samples, h=1e-3, q=DEFAULT_QUADRATURE) -> float:
    """Max deviation in the mixed conditions on the moving line z' = -cos(eta) t'.

    Left sides are evaluated two ways: from the boosted closed form (with
    dz' Phi' by central difference and dt' Phi' in closed form) and from the
    laboratory field at the unboosted event.  Right sides are the printed
    window times Bessel integrals.
    """
    s, c = g.sin_eta, g.cos_eta
    f = BoostFrame.comoving(g)
    worst = 0.0
    for t_p in t_samples:
        z_p = -c * t_p
        window = 1.0 if abs(s * t_p) < g.T else 0.0
        for rho in rho_samples:
            a = rho * s
            # right-hand sides
            rhs_value = window * spectral_integral(S, 0, 0, a, s * t_p, q) if window else 0j
            rhs_deriv = 1j * c * window * spectral_integral(S, 0, 1, a, s * t_p, q) if window else 0j

            # boosted route
            value = boosted_scalar_field(g, S, t_p, rho, z_p, q)
            d_zp = (
                boosted_scalar_field(g, S, t_p, rho, z_p + h, q)
                - boosted_scalar_field(g, S, t_p, rho, z_p - h, q)
            ) / (2 * h)
            d_tp = -1j * s * spectral_integral(S, 0, 1, a, s * t_p, q) if in_boosted_window(g, t_p) else 0j
            deriv = f.gamma * d_zp - f.gamma * f.V * d_tp

            # laboratory route: the line maps to z = 0, the operator to d/dz
            t_lab, z_lab = unboost(f, t_p, z_p)
            lab_value = scalar_field(g, S, CylPoint(t_lab, rho, z_lab), q)
            zeta = t_lab - z_lab * c
            lab_deriv = 1j * c * spectral_integral(S, 0, 1, a, zeta, q) if abs(zeta) < g.T else 0j

            worst = max(
                worst,
                abs(value - rhs_value),
                abs(deriv - rhs_deriv),
                abs(lab_value - rhs_value),
                abs(lab_deriv - rhs_deriv),
            )
    return worst


def boosted_energy_in_cylinder(
    g: AxiconGeometry,
    S: Spectrum,
    rho_max: float,
    half_length: float,
    t_p: float,
    q=DEFAULT_QUADRATURE,
) -> float:
    """Energy of the boosted field inside rho <= rho_max, |z'| <= half_length.

    The density is sampled on a genuine (rho, z') quadrature grid; its
    z'-independence is what makes the total grow linearly without bound.
    """
    if not in_boosted_window(g, t_p):
        raise ValueError("t' outside the window |t'| < T / sin(eta)")
    if rho_max <= 0 or half_length <= 0:
        raise ValueError("cylinder dimensions must be positive")
    s = g.sin_eta
    quarter = 0.5 * math.pi / (S.k_max * s)
    n_r = max(2, int(math.ceil(rho_max / quarter)))
    edges = np.linspace(0.0, rho_max, n_r + 1)
    half, mid = 0.5 * np.diff(edges), 0.5 * (edges[1:] + edges[:-1])
    rhos = (mid[:, None] + half[:, None] * _GL_X).ravel()
    wr = (half[:, None] * _GL_W).ravel()
    wz = half_length * _GL_W
    zps = half_length * _GL_X

    # Phi' carries no z' argument; the phase is the same at every z' node
    zeta = np.full(zps.size, s * t_p)
    i01, i11 = spectral_integrals(S, [(0, 1), (1, 1)], rhos * s, zeta, q, grid=True)
    dens = (s * np.abs(i01)) ** 2 + (s * np.abs(i11)) ** 2  # |d_t'|^2 + |d_rho|^2
    return float(2 * math.pi * np.sum((dens @ wz) * rhos * wr))
