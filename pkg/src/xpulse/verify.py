"""Finite-difference checks that the closed-form fields solve their equations.

Residual grids are built from closed-form evaluations only; nothing here
touches the FDTD simulator.  Stencils that would straddle the front
``|zeta| = T`` are refused (collar half-width 4h).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .fields import em_field_many
from .numerics import DEFAULT_QUADRATURE, spectral_integral
from .pulse import AxiconGeometry, CylPoint, boundary_dz, boundary_value, scalar_field_many
from .spectrum import Spectrum

COLLAR = 4.0
ORDER_BAND = (1.7, 2.3)


class CollarViolation(ValueError):
    pass


@dataclass(frozen=True)
class Region:
    """Probe box at fixed t: ``n_rho x n_zeta`` points with rho in
    ``[rho_lo, rho_hi]`` and pulse phase in ``[zeta_lo, zeta_hi]``."""

    t: float
    rho_lo: float
    rho_hi: float
    zeta_lo: float
    zeta_hi: float
    n_rho: int = 5
    n_zeta: int = 5

    def probes(self, g: AxiconGeometry) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        rho = np.linspace(self.rho_lo, self.rho_hi, self.n_rho)
        zeta = np.linspace(self.zeta_lo, self.zeta_hi, self.n_zeta)
        R, Z = np.meshgrid(rho, zeta, indexing="ij")
        t = np.full(R.shape, float(self.t))
        z = (t - Z) / g.cos_eta
        return t.ravel(), R.ravel(), z.ravel()

    def shifted(self, dt: float) -> "Region":
        """Same phases, later time: the rigid translation t -> t + dt,
        z -> z + dt / cos(eta)."""
        return replace(self, t=self.t + dt)


def interior_region(g: AxiconGeometry, S: Spectrum) -> Region:
    k0 = S.k_max
    return Region(
        t=2 * g.T,
        rho_lo=0.5 / k0,
        rho_hi=3.0 / (k0 * g.sin_eta),
        zeta_lo=-0.5 * g.T,
        zeta_hi=0.5 * g.T,
    )


def exterior_region(g: AxiconGeometry, S: Spectrum) -> Region:
    return Region(
        t=2 * g.T,
        rho_lo=0.0,
        rho_hi=3.0 / (S.k_max * g.sin_eta),
        zeta_lo=1.25 * g.T,
        zeta_hi=2.0 * g.T,
    )


@dataclass(frozen=True)
class ResidualReport:
    operator: str
    h: float
    max_abs: float
    rms: float
    collar: float
    order: float | None = None


def _report(name, res, h):
    res = np.abs(np.asarray(res))
    return ResidualReport(name, h, float(res.max()), float(np.sqrt(np.mean(res**2))), COLLAR * h)


def _check_collar(g, region, h):
    t, rho, z = region.probes(g)
    zeta = t - z * g.cos_eta
    if np.any(np.abs(np.abs(zeta) - g.T) <= COLLAR * h):
        raise CollarViolation(f"region comes within {COLLAR}h of the front |zeta| = T")
    if np.any((rho > 0) & (rho < h)):
        raise CollarViolation("probes with 0 < rho < h are not supported; use rho = 0 or rho >= h")
    return t, rho, z


def _stencil(t, rho, z, h):
    """Seven-point (t, rho, z) stencil around each probe; index order
    centre, t+-, rho+-, z+-."""
    offs = np.array(
        [(0, 0, 0), (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)], float
    )
    T = t[:, None] + h * offs[:, 0]
    R = rho[:, None] + h * offs[:, 1]
    Z = z[:, None] + h * offs[:, 2]
    return T, R, Z


def wave_residual(g: AxiconGeometry, S: Spectrum, region: Region, h: float, q=DEFAULT_QUADRATURE) -> ResidualReport:
    """Max/rms of the second-order cylindrical d'Alembertian applied to Phi.

    On the axis the radial part uses the regularised form 2 d2/drho2.
    """
    t, rho, z = _check_collar(g, region, h)
    T, R, Z = _stencil(t, rho, z, h)
    # Phi is even in rho
    phi = scalar_field_many(g, S, T, np.abs(R), Z, q)
    c0, tp, tm, rp, rm, zp, zm = (phi[:, i] for i in range(7))
    d_tt = (tp - 2 * c0 + tm) / h**2
    d_zz = (zp - 2 * c0 + zm) / h**2
    d_rr = (rp - 2 * c0 + rm) / h**2
    on_axis = rho == 0
    radial = np.where(on_axis, 2 * d_rr, d_rr + (rp - rm) / (2 * h * np.where(on_axis, 1, rho)))
    return _report("wave", d_tt - radial - d_zz, h)


def maxwell_residuals(g: AxiconGeometry, S: Spectrum, region: Region, h: float, q=DEFAULT_QUADRATURE) -> list[ResidualReport]:
    """div B, Faraday (rho and z components), Ampere (theta), div E."""
    t, rho, z = _check_collar(g, region, h)
    T, R, Z = _stencil(t, rho, z, h)
    em = em_field_many(g, S, T, np.abs(R), Z, q)
    # E_theta and B_rho are odd in rho, B_z even
    sign = np.where(R < 0, -1.0, 1.0)
    E, Br, Bz = em[0] * sign, em[1] * sign, em[2]

    def d(f, plus, minus):
        return (f[:, plus] - f[:, minus]) / (2 * h)

    on_axis = rho == 0
    safe_rho = np.where(on_axis, 1.0, rho)

    def radial_div(f):
        # (1/rho) d(rho f)/drho, -> 2 df/drho on the axis
        flux = (R[:, 3] * f[:, 3] - R[:, 4] * f[:, 4]) / (2 * h * safe_rho)
        return np.where(on_axis, 2 * d(f, 3, 4), flux)

    div_b = radial_div(Br) + d(Bz, 5, 6)
    faraday_rho = d(Br, 1, 2) - d(E, 5, 6)
    faraday_z = d(Bz, 1, 2) + radial_div(E)
    ampere = d(E, 1, 2) - (d(Br, 5, 6) - d(Bz, 3, 4))

    faraday = _report("faraday", np.concatenate([faraday_rho, faraday_z]), h)
    # E has only a theta component with no theta dependence: div E = 0 identically
    div_e = ResidualReport("div_E", h, 0.0, 0.0, COLLAR * h)
    return [_report("div_B", div_b, h), faraday, _report("ampere", ampere, h), div_e]


def convergence_order(coarse: float, fine: float) -> float | None:
    """log2(coarse / fine); None when either residual is exactly zero."""
    if coarse == 0 or fine == 0:
        return None
    return math.log2(coarse / fine)


def with_order(coarse: ResidualReport, fine: ResidualReport) -> ResidualReport:
    if coarse.operator != fine.operator:
        raise ValueError("reports must come from the same operator")
    return replace(fine, order=convergence_order(coarse.max_abs, fine.max_abs))


class ProbeInSupport(ValueError):
    pass


def support_check(g: AxiconGeometry, S: Spectrum, probes, q=DEFAULT_QUADRATURE) -> float:
    """Max |Phi| and EM magnitude over probes that must all lie outside the
    support; the contract is an exact zero."""
    pts = np.array([(p.t, p.rho, p.z) if isinstance(p, CylPoint) else p for p in probes], float)
    t, rho, z = pts.T
    if np.any(np.abs(t - z * g.cos_eta) < g.T):
        raise ProbeInSupport("support_check probes must satisfy |zeta| >= T")
    phi = scalar_field_many(g, S, t, rho, z, q)
    em = em_field_many(g, S, t, rho, z, q)
    return float(max(np.abs(phi).max(initial=0.0), np.abs(em).max(initial=0.0)))


def front_jump(g: AxiconGeometry, S: Spectrum, rho: float = 0.0, q=DEFAULT_QUADRATURE) -> float:
    """|Phi| just inside the front zeta -> T-, i.e. the size of the jump to zero."""
    return abs(spectral_integral(S, 0, 0, rho * g.sin_eta, g.T, q))


def boundary_check(g: AxiconGeometry, S: Spectrum, h: float, q=DEFAULT_QUADRATURE) -> tuple[float, float]:
    """Compare the z = 0 boundary data with the field it launches.

    Returns ``(value_dev, deriv_dev)``: the max deviation of the boundary
    value from Phi(t, rho, 0) (exact identity), and of the normal derivative
    from a central difference in z with step h (second-order small).
    """
    t = np.linspace(-0.75, 0.75, 7) * g.T
    rho = np.linspace(0.0, 3.0 / (S.k_max * g.sin_eta), 5)
    if np.any(g.T - np.abs(t) <= COLLAR * h * g.cos_eta):
        raise CollarViolation("boundary samples too close to the window edge")
    T, R = (a.ravel() for a in np.meshgrid(t, rho, indexing="ij"))
    lab = scalar_field_many(g, S, T, R, np.zeros_like(T), q)
    d_z = (scalar_field_many(g, S, T, R, np.full(T.shape, h), q) - scalar_field_many(g, S, T, R, np.full(T.shape, -h), q)) / (2 * h)
    value_dev = max(abs(boundary_value(g, S, a, b, q) - v) for a, b, v in zip(T, R, lab))
    deriv_dev = max(abs(boundary_dz(g, S, a, b, q) - d) for a, b, d in zip(T, R, d_z))
    return float(value_dev), float(deriv_dev)


@dataclass(frozen=True)
class SuiteLine:
    name: str
    passed: bool
    detail: str


def run_suite(g: AxiconGeometry, S: Spectrum, h: float = 0.02, q=DEFAULT_QUADRATURE):
    """All residual and support checks at steps h and h/2.

    Returns ``(lines, reports)``; a line passes when the measured order lies
    in ORDER_BAND (interior) or the residual is exactly zero (exterior).
    """
    inner, outer = interior_region(g, S), exterior_region(g, S)
    lines, reports = [], []

    pairs = [("wave", wave_residual(g, S, inner, h, q), wave_residual(g, S, inner, h / 2, q))]
    for a, b in zip(maxwell_residuals(g, S, inner, h, q), maxwell_residuals(g, S, inner, h / 2, q)):
        pairs.append((a.operator, a, b))
    for name, a, b in pairs:
        fine = with_order(a, b)
        reports += [a, fine]
        if name == "div_E":
            ok = fine.max_abs == 0.0
            detail = "identically zero"
        else:
            ok = fine.order is not None and ORDER_BAND[0] <= fine.order <= ORDER_BAND[1]
            detail = f"order={fine.order if fine.order is None else round(fine.order, 4)}"
        lines.append(SuiteLine(f"{name} interior", ok, detail))

    ext = [wave_residual(g, S, outer, h, q)] + maxwell_residuals(g, S, outer, h, q)
    for r in ext:
        r = replace(r, operator=r.operator + "_exterior")
        reports.append(r)
        lines.append(SuiteLine(f"{r.operator}", r.max_abs == 0.0, f"max={r.max_abs!r}"))

    v_dev, d_coarse = boundary_check(g, S, h, q)
    _, d_fine = boundary_check(g, S, h / 2, q)
    lines.append(SuiteLine("boundary value", v_dev <= 1e-13, f"max={v_dev!r}"))
    order = convergence_order(d_coarse, d_fine)
    ok = order is not None and ORDER_BAND[0] <= order <= ORDER_BAND[1]
    lines.append(SuiteLine("boundary normal derivative", ok, f"order={order if order is None else round(order, 4)}"))

    rng = np.random.default_rng(20240601)
    n = 1000
    zeta = rng.choice([-1.0, 1.0], n) * g.T * (1.0001 + 3 * rng.random(n))
    t = 2 * g.T + rng.uniform(-1, 1, n)
    rho = rng.uniform(0, 10 / (S.k_max * g.sin_eta), n)
    z = (t - zeta) / g.cos_eta
    sup = support_check(g, S, np.column_stack([t, rho, z]), q)
    lines.append(SuiteLine("support exterior", sup == 0.0, f"max={sup!r}"))
    lines.append(SuiteLine("front jump (recorded)", True, f"|Phi(T-)|={front_jump(g, S, 0.0, q)!r}"))
    return lines, reports
