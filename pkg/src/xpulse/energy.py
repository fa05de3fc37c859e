"""Energy densities and total energies of the scalar and EM X-pulses.

Closed forms:

    scalar:  8 pi T / (sin^2 eta cos eta) * int |B|^2 k dk
    EM:      4 pi T / cos eta             * int |B|^2 k^3 dk

The numeric oracle integrates the densities over the t = const hyperplane
in cylindrical coordinates.  The radial integral converges only like
1/rho_max with an oscillating remainder, so cumulative integrals at eight
cutoffs a quarter Bessel period apart are averaged; the reported error is
half their spread plus the A/rho_max remainder fitted across the same
window.  Derivatives inside the densities come from the spectral integrals
directly (no finite differences):

    dPhi/dt   = -i       I(0, 1)
    dPhi/dz   =  i cos   I(0, 1)
    dPhi/drho = -sin     I(1, 1)
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .fields import em_field_many
from .numerics import DEFAULT_QUADRATURE, QuadratureSettings, spectral_integrals, spectrum_moment
from .pulse import AxiconGeometry, CylPoint, phase
from .spectrum import Spectrum

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)

TAIL_CUTOFFS = 8
TAIL_LIMIT = 0.05


@dataclass(frozen=True)
class EnergyReport:
    kind: str
    analytic: float
    numeric: float
    error_estimate: float
    rho_max: float
    kinetic: float = float("nan")
    gradient: float = float("nan")

    @property
    def relative_gap(self) -> float:
        if self.analytic == 0:
            return 0.0 if self.numeric == 0 else math.inf
        return abs(self.numeric - self.analytic) / abs(self.analytic)

    def as_row(self) -> dict:
        row = asdict(self)
        row["relative_gap"] = self.relative_gap
        return row


class TailDivergenceError(RuntimeError):
    def __init__(self, report: EnergyReport):
        super().__init__(
            f"radial tail estimate {report.error_estimate:.3g} exceeds "
            f"{TAIL_LIMIT:.0%} of {report.numeric:.6g}"
        )
        self.report = report


class CoverageError(ValueError):
    pass


# -- densities -----------------------------------------------------------------


def _scalar_parts(g, S, a, zeta, q, grid=False):
    """(|dPhi/dt|^2, |dPhi/drho|^2 + |dPhi/dz|^2) from the spectral integrals."""
    i01, i11 = spectral_integrals(S, [(0, 1), (1, 1)], a, zeta, q, grid=grid)
    kin = np.abs(i01) ** 2
    grad = (g.sin_eta**2) * np.abs(i11) ** 2 + (g.cos_eta**2) * kin
    return kin, grad


def scalar_energy_density(
    g: AxiconGeometry, S: Spectrum, p: CylPoint, q: QuadratureSettings = DEFAULT_QUADRATURE
) -> float:
    """|d_t Phi|^2 + |grad Phi|^2 (complex-field density, no factor 1/2)."""
    zeta = phase(g, p)
    if not abs(zeta) < g.T:
        return 0.0
    kin, grad = _scalar_parts(g, S, p.rho * g.sin_eta, zeta, q)
    return float(kin[0] + grad[0])


def em_energy_density(
    g: AxiconGeometry, S: Spectrum, p: CylPoint, q: QuadratureSettings = DEFAULT_QUADRATURE
) -> float:
    """(|E_theta|^2 + |B_rho|^2 + |B_z|^2) / 2."""
    vals = em_field_many(g, S, p.t, p.rho, p.z, q)
    return float(0.5 * np.sum(np.abs(vals) ** 2))


# -- closed forms ----------------------------------------------------------------


def scalar_energy_analytic(g: AxiconGeometry, S: Spectrum, q=DEFAULT_QUADRATURE) -> float:
    return 8 * math.pi * g.T / (g.sin_eta**2 * g.cos_eta) * spectrum_moment(S, 1, q)


def em_energy_analytic(g: AxiconGeometry, S: Spectrum, q=DEFAULT_QUADRATURE) -> float:
    return 4 * math.pi * g.T / g.cos_eta * spectrum_moment(S, 3, q)


# -- volume oracle ---------------------------------------------------------------


def _panel_nodes(edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = edges[:-1], edges[1:]
    half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
    x = (mid[:, None] + half[:, None] * _GL_X).ravel()
    w = (half[:, None] * _GL_W).ravel()
    return x, w


def _radial_edges(rho_max: float, quarter: float) -> tuple[np.ndarray, np.ndarray]:
    """Panel edges on [0, rho_max] no wider than ``quarter``; the last
    TAIL_CUTOFFS edges are the averaging cutoffs."""
    first_cut = rho_max - (TAIL_CUTOFFS - 1) * quarter
    if first_cut <= quarter:
        raise CoverageError("rho_max too small for the tail-averaging cutoffs")
    n = int(math.ceil(first_cut / quarter))
    head = np.linspace(0.0, first_cut, n + 1)
    tail = first_cut + quarter * np.arange(1, TAIL_CUTOFFS)
    edges = np.concatenate([head, tail])
    return edges, edges[-TAIL_CUTOFFS:]


def _split(edges: np.ndarray, refine: int) -> np.ndarray:
    """Subdivide every panel of ``edges`` into ``refine`` equal panels."""
    if refine == 1:
        return edges
    frac = np.arange(refine) / refine
    inner = edges[:-1, None] + np.diff(edges)[:, None] * frac
    return np.append(inner.ravel(), edges[-1])


def _volume_integral(g, S, t_plane, rho_max, z_range, densities, q, rho_block, refine=1):
    """Integrate ``densities(a, zeta) -> list of (n_rho, n_zeta) arrays`` with
    weight 2 pi rho over rho <= rho_max and z in ``z_range``.

    Returns the tail-averaged totals, their error estimates and the cutoffs.
    """
    s, c = g.sin_eta, g.cos_eta
    k0 = S.k_max
    z_lo, z_hi = z_range
    support = ((t_plane - g.T) / c, (t_plane + g.T) / c)
    if z_lo > support[0] + 1e-12 or z_hi < support[1] - 1e-12:
        raise CoverageError(f"z-range {z_range} does not cover the support {support}")
    # field vanishes outside the support, so integrate over the support only
    z_period = 2 * math.pi / (k0 * c)
    nz = max(2, int(math.ceil((support[1] - support[0]) / (0.5 * z_period))))
    zs, wz = _panel_nodes(_split(np.linspace(support[0], support[1], nz + 1), refine))
    zeta = t_plane - zs * c

    quarter = 0.5 * math.pi / (k0 * s)
    edges, cutoffs = _radial_edges(rho_max, quarter)
    rhos, wr = _panel_nodes(_split(edges, refine))
    panel_of = np.repeat(np.arange(edges.size - 1), 16 * refine)

    n_parts = None
    per_panel = None
    for start in range(0, rhos.size, rho_block):
        sl = slice(start, start + rho_block)
        parts = densities(rhos[sl] * s, zeta)
        if per_panel is None:
            n_parts = len(parts)
            per_panel = np.zeros((n_parts, edges.size - 1))
        for j, dens in enumerate(parts):
            radial = (dens @ wz) * 2 * math.pi * rhos[sl] * wr[sl]
            np.add.at(per_panel[j], panel_of[sl], radial)

    cumulative = np.cumsum(per_panel, axis=1)
    at_cut = cumulative[:, -TAIL_CUTOFFS:]
    totals = at_cut.mean(axis=1)
    spread = 0.5 * (at_cut.max(axis=1) - at_cut.min(axis=1))
    # monotone part of the tail: radial density ~ A / rho^2 beyond the window
    r1, r2 = cutoffs[0], cutoffs[-1]
    amp = (at_cut[:, -1] - at_cut[:, 0]) * r1 * r2 / (r2 - r1)
    remainder = np.abs(amp) / cutoffs.mean()
    return totals, spread + remainder, cutoffs


def default_rho_max(g: AxiconGeometry, S: Spectrum) -> float:
    return 200.0 / (S.k_max * g.sin_eta)


def scalar_energy_numeric(
    g: AxiconGeometry,
    S: Spectrum,
    rho_max: float | None = None,
    t_plane: float | None = None,
    z_range: tuple[float, float] | None = None,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
    rho_block: int = 128,
    check_tail: bool = True,
    refine: int = 1,
) -> EnergyReport:
    """Volume integral of the scalar density on the hyperplane ``t = t_plane``
    (default 2T).  ``refine`` splits every quadrature panel that many times."""
    rho_max = default_rho_max(g, S) if rho_max is None else rho_max
    t_plane = 2 * g.T if t_plane is None else t_plane
    if z_range is None:
        z_range = ((t_plane - g.T) / g.cos_eta, (t_plane + g.T) / g.cos_eta)

    def densities(a, zeta):
        return _scalar_parts(g, S, a, zeta, q, grid=True)

    (kin, grad), (ek, eg), _ = _volume_integral(
        g, S, t_plane, rho_max, z_range, densities, q, rho_block, refine
    )
    report = EnergyReport(
        kind="scalar",
        analytic=scalar_energy_analytic(g, S, q),
        numeric=float(kin + grad),
        error_estimate=float(ek + eg),
        rho_max=rho_max,
        kinetic=float(kin),
        gradient=float(grad),
    )
    if check_tail and report.numeric > 0 and report.error_estimate > TAIL_LIMIT * report.numeric:
        raise TailDivergenceError(report)
    return report


def em_energy_numeric(
    g: AxiconGeometry,
    S: Spectrum,
    rho_max: float | None = None,
    t_plane: float | None = None,
    z_range: tuple[float, float] | None = None,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
    rho_block: int = 128,
    check_tail: bool = True,
    refine: int = 1,
) -> EnergyReport:
    """Volume integral of (|E|^2 + |B|^2)/2 on ``t = t_plane``."""
    rho_max = default_rho_max(g, S) if rho_max is None else rho_max
    t_plane = 2 * g.T if t_plane is None else t_plane
    if z_range is None:
        z_range = ((t_plane - g.T) / g.cos_eta, (t_plane + g.T) / g.cos_eta)
    s, c = g.sin_eta, g.cos_eta

    def densities(a, zeta):
        i12, i02 = spectral_integrals(S, [(1, 2), (0, 2)], a, zeta, q, grid=True)
        j12 = np.abs(i12) ** 2
        return [0.5 * (s * s * j12 + (s * c) ** 2 * j12 + s**4 * np.abs(i02) ** 2)]

    (total,), (err,), _ = _volume_integral(
        g, S, t_plane, rho_max, z_range, densities, q, rho_block, refine
    )
    report = EnergyReport(
        kind="em",
        analytic=em_energy_analytic(g, S, q),
        numeric=float(total),
        error_estimate=float(err),
        rho_max=rho_max,
    )
    if check_tail and report.numeric > 0 and report.error_estimate > TAIL_LIMIT * report.numeric:
        raise TailDivergenceError(report)
    return report
