"""Electromagnetic X-pulse from the magnetic Hertz potential Pi_m = Phi z_hat.

With E = -d/dt (curl Pi_m) and B = curl curl Pi_m, axisymmetry gives

    curl Pi_m = (0, -dPhi/drho, 0)
    E_theta   = d2Phi/dt drho
    B_rho     = d2Phi/dz drho
    B_z       = -(1/rho) d/drho (rho dPhi/drho)      (-> -2 d2Phi/drho2 on axis)

and in closed form, with I(n, p) the spectral integral at a = rho sin(eta):

    E_theta =  i sin(eta)            I(1, 2)
    B_rho   = -i sin(eta) cos(eta)   I(1, 2)
    B_z     =    sin(eta)**2         I(0, 2)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import DEFAULT_QUADRATURE, QuadratureSettings, spectral_integrals
from .pulse import (
    AxiconGeometry,
    CylPoint,
    FieldSlice,
    SlicePlan,
    evaluate_plan,
    phase,
    scalar_field_many,
)
from .spectrum import Spectrum


@dataclass(frozen=True)
class EMSample:
    E_theta: complex
    B_rho: complex
    B_z: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.E_theta, self.B_rho, self.B_z])


class CollarError(ValueError):
    """Finite-difference stencil would straddle the pulse front."""


def em_field_many(
    g: AxiconGeometry, S: Spectrum, t, rho, z, q: QuadratureSettings = DEFAULT_QUADRATURE
) -> np.ndarray:
    """Closed-form (E_theta, B_rho, B_z) at broadcast points; shape (3, ...)."""
    t, rho, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, rho, z)))
    zeta = t - z * g.cos_eta
    out = np.zeros((3,) + t.shape, dtype=complex)
    inside = np.abs(zeta) < g.T
    if np.any(inside):
        s, c = g.sin_eta, g.cos_eta
        i12, i02 = spectral_integrals(
            S, [(1, 2), (0, 2)], rho[inside] * s, zeta[inside], q
        )
        out[:, inside] = np.stack([1j * s * i12, -1j * s * c * i12, s * s * i02])
    return out


def em_field(
    g: AxiconGeometry, S: Spectrum, p: CylPoint, q: QuadratureSettings = DEFAULT_QUADRATURE
) -> EMSample:
    if not abs(phase(g, p)) < g.T:
        return EMSample(0j, 0j, 0j)
    e, br, bz = em_field_many(g, S, p.t, p.rho, p.z, q)
    return EMSample(complex(e), complex(br), complex(bz))


def em_from_hertz(
    g: AxiconGeometry,
    S: Spectrum,
    p: CylPoint,
    h: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> EMSample:
    """Fields by second-order central differences of Phi (independent of the
    closed forms).  Phi is even in rho, so stencil points at rho < 0 are
    reflected."""
    if h <= 0:
        raise ValueError("step must be positive")
    zeta = phase(g, p)
    if abs(abs(zeta) - g.T) <= 4 * h:
        raise CollarError(f"|zeta|={abs(zeta)} within 4h of the front at T={g.T}")
    if abs(zeta) > g.T:
        return EMSample(0j, 0j, 0j)

    t, r, z = p.t, p.rho, p.z
    offsets = [(dt, dr, dz) for dt in (-1, 0, 1) for dr in (-1, 0, 1) for dz in (-1, 0, 1)]
    pts = np.array([(t + a * h, abs(r + b * h), z + c * h) for a, b, c in offsets])
    vals = scalar_field_many(g, S, pts[:, 0], pts[:, 1], pts[:, 2], q)
    phi = {o: v for o, v in zip(offsets, vals)}

    e_theta = (phi[1, 1, 0] - phi[1, -1, 0] - phi[-1, 1, 0] + phi[-1, -1, 0]) / (4 * h * h)
    b_rho = (phi[0, 1, 1] - phi[0, -1, 1] - phi[0, 1, -1] + phi[0, -1, -1]) / (4 * h * h)
    d_rr = (phi[0, 1, 0] - 2 * phi[0, 0, 0] + phi[0, -1, 0]) / (h * h)
    if r == 0:
        b_z = -2 * d_rr
    else:
        d_r = (phi[0, 1, 0] - phi[0, -1, 0]) / (2 * h)
        b_z = -(d_rr + d_r / r)
    return EMSample(complex(e_theta), complex(b_rho), complex(b_z))


def sample_em_slice(
    g: AxiconGeometry,
    S: Spectrum,
    plan: SlicePlan,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
    threads: int = 1,
) -> FieldSlice:
    vals = evaluate_plan(
        plan, lambda p: em_field(g, S, p, q).as_array(), n_components=3, threads=threads
    )
    return FieldSlice(plan, vals, {"eta": g.eta, "T": g.T, "spectrum": S.label})
