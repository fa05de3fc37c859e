"""The scalar X-pulse: geometry, boundary data on z = 0, closed-form field,
slices, and peak kinematics.

Units have c = 1.  The pulse phase is ``zeta = t - z cos(eta)``; the field
is nonzero only for ``|zeta| < T`` and there equals

    Phi(t, rho, z) = int B(k) J0(k rho sin(eta)) exp(-i k zeta) dk.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import optimize

from .numerics import (
    DEFAULT_QUADRATURE,
    ConvergenceError,
    QuadratureSettings,
    spectral_integral,
    spectral_integrals,
)
from .spectrum import Spectrum

AXES = ("t", "rho", "z")


@dataclass(frozen=True)
class AxiconGeometry:
    """Axicon angle ``eta`` (radians, strictly between 0 and pi/2) and the
    half-width ``T`` of the launch window."""

    eta: float
    T: float

    def __post_init__(self):
        if not (0.0 < self.eta < 0.5 * math.pi):
            raise ValueError(f"axicon angle must lie in (0, pi/2), got {self.eta}")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValueError(f"window half-width must be positive, got {self.T}")

    @cached_property
    def cos_eta(self) -> float:
        return math.cos(self.eta)

    @cached_property
    def sin_eta(self) -> float:
        return math.sin(self.eta)

    @property
    def V(self) -> float:
        """Velocity of the co-moving frame."""
        return self.cos_eta

    @property
    def gamma(self) -> float:
        return 1.0 / self.sin_eta

    @property
    def peak_speed(self) -> float:
        return 1.0 / self.cos_eta

    @property
    def support_length(self) -> float:
        """Axial extent of the support at fixed t."""
        return 2.0 * self.T / self.cos_eta


@dataclass(frozen=True)
class CylPoint:
    """Laboratory-frame event in cylindrical coordinates."""

    t: float
    rho: float
    z: float

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be non-negative")


def phase(g: AxiconGeometry, p: CylPoint) -> float:
    return p.t - p.z * g.cos_eta


def in_support(g: AxiconGeometry, p: CylPoint) -> bool:
    """Open window: ``|zeta| == T`` counts as outside."""
    return abs(phase(g, p)) < g.T


def scalar_field(
    g: AxiconGeometry,
    S: Spectrum,
    p: CylPoint,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> complex:
    zeta = phase(g, p)
    if not abs(zeta) < g.T:
        return 0j
    return spectral_integral(S, 0, 0, p.rho * g.sin_eta, zeta, q)


def scalar_field_many(
    g: AxiconGeometry,
    S: Spectrum,
    t,
    rho,
    z,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> np.ndarray:
    """Vectorised field at broadcast ``(t, rho, z)``; in-support points
    share one quadrature layout."""
    t, rho, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, rho, z)))
    zeta = t - z * g.cos_eta
    out = np.zeros(t.shape, dtype=complex)
    inside = np.abs(zeta) < g.T
    if np.any(inside):
        vals = spectral_integrals(
            S, [(0, 0)], np.abs(rho[inside]) * g.sin_eta, zeta[inside], q
        )
        out[inside] = vals[0]
    return out


def _window(g: AxiconGeometry, t: float) -> bool:
    return abs(t) < g.T


def boundary_value(g, S, t: float, rho: float, q=DEFAULT_QUADRATURE) -> complex:
    """Prescribed field on the launch plane z = 0."""
    if not _window(g, t):
        return 0j
    return spectral_integral(S, 0, 0, rho * g.sin_eta, t, q)


def boundary_dz(g, S, t: float, rho: float, q=DEFAULT_QUADRATURE) -> complex:
    """Prescribed normal derivative on z = 0 (k and omega coincide in vacuum)."""
    if not _window(g, t):
        return 0j
    return 1j * g.cos_eta * spectral_integral(S, 0, 1, rho * g.sin_eta, t, q)


def boundary_value_grid(g, S, t, rho, q=DEFAULT_QUADRATURE) -> np.ndarray:
    """Boundary data on the outer product ``rho x t``, shape (len(rho), len(t))."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    out = np.zeros((rho.size, t.size), dtype=complex)
    on = np.abs(t) < g.T
    if np.any(on):
        out[:, on] = spectral_integrals(S, [(0, 0)], rho * g.sin_eta, t[on], q, grid=True)[0]
    return out


# -- slices -----------------------------------------------------------------


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    step: float
    count: int

    def __post_init__(self):
        if self.name not in AXES:
            raise ValueError(f"axis name must be one of {AXES}")
        if not self.step > 0 or self.count < 1:
            raise ValueError("axis needs step > 0 and count >= 1")

    def values(self) -> np.ndarray:
        return self.min + self.step * np.arange(self.count)


@dataclass(frozen=True)
class SlicePlan:
    axis1: Axis
    axis2: Axis
    fixed_value: float

    def __post_init__(self):
        if self.axis1.name == self.axis2.name:
            raise ValueError("slice axes must differ")

    @property
    def fixed_name(self) -> str:
        return next(a for a in AXES if a not in (self.axis1.name, self.axis2.name))

    def points(self):
        """Yield ``(i, j, CylPoint)`` in row-major order."""
        v1, v2 = self.axis1.values(), self.axis2.values()
        for i, x1 in enumerate(v1):
            for j, x2 in enumerate(v2):
                coords = {self.axis1.name: x1, self.axis2.name: x2, self.fixed_name: self.fixed_value}
                yield i, j, CylPoint(coords["t"], abs(coords["rho"]), coords["z"])


@dataclass
class FieldSlice:
    """Samples on a uniform 2-D grid; ``values[..., i, j]`` sits at
    ``(axis1[i], axis2[j])``.  A leading component axis holds EM triples."""

    plan: SlicePlan
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = (self.plan.axis1.count, self.plan.axis2.count)
        if self.values.shape[-2:] != shape:
            raise ValueError(f"sample matrix {self.values.shape} does not match grid {shape}")


class SliceEvaluationError(RuntimeError):
    def __init__(self, index, cause):
        super().__init__(f"evaluation failed at grid index {index}: {cause}")
        self.index = index
        self.cause = cause


def evaluate_plan(plan: SlicePlan, fn, n_components: int = 1, threads: int = 1) -> np.ndarray:
    """Evaluate ``fn(point) -> complex or sequence`` on every node of ``plan``.

    Each node is computed independently (own quadrature layout) and written
    by index, so results do not depend on ``threads`` or on the grid they
    belong to.
    """
    out = np.zeros((n_components, plan.axis1.count, plan.axis2.count), dtype=complex)
    pts = list(plan.points())

    def work(item):
        i, j, p = item
        try:
            return i, j, fn(p)
        except Exception as exc:
            raise SliceEvaluationError((i, j), exc) from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, pts))
    else:
        results = [work(item) for item in pts]
    for i, j, val in results:
        out[:, i, j] = val
    return out


def sample_slice(
    g: AxiconGeometry,
    S: Spectrum,
    plan: SlicePlan,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
    threads: int = 1,
) -> FieldSlice:
    vals = evaluate_plan(plan, lambda p: scalar_field(g, S, p, q), threads=threads)[0]
    return FieldSlice(plan, vals, {"eta": g.eta, "T": g.T, "spectrum": S.label})


# -- kinematics --------------------------------------------------------------


class NoPeakError(RuntimeError):
    pass


def axial_peak(g: AxiconGeometry, S: Spectrum, t: float, q=DEFAULT_QUADRATURE) -> float:
    """z of max |Phi(t, 0, z)| inside the support: coarse scan, then
    bounded golden-section/parabolic refinement between the neighbours."""
    c = g.cos_eta
    k0 = S.k_max
    step = (0.01 / k0) / c
    z_lo, z_hi = (t - g.T) / c, (t + g.T) / c
    n = int(math.floor((z_hi - z_lo) / step))
    zs = z_lo + step * (np.arange(n + 1) + 0.5)
    zs = zs[zs < z_hi]
    mag = np.abs(scalar_field_many(g, S, t, 0.0, zs, q))
    if not np.any(mag > 0):
        raise NoPeakError(f"field vanishes along the axis at t={t}")
    i = int(np.argmax(mag))
    if i == 0 or i == zs.size - 1:
        return float(zs[i])

    def neg(z):
        return -abs(scalar_field(g, S, CylPoint(t, 0.0, float(z)), q))

    res = optimize.minimize_scalar(
        neg, bounds=(zs[i - 1], zs[i + 1]), method="bounded", options={"xatol": 1e-10}
    )
    return float(res.x)


def peak_velocity(g: AxiconGeometry, S: Spectrum, times, q=DEFAULT_QUADRATURE) -> float:
    """Least-squares slope of the on-axis peak position against time."""
    times = np.asarray(sorted(set(float(t) for t in times)))
    if times.size < 2:
        raise ValueError("need at least two distinct times")
    if np.any(times <= g.T):
        raise ValueError("peak tracking times must exceed T")
    zs = np.array([axial_peak(g, S, t, q) for t in times])
    slope, _ = np.polyfit(times, zs, 1)
    return float(slope)


def measured_support_length(
    g: AxiconGeometry, S: Spectrum, t: float, dz: float, rho: float = 0.0, q=DEFAULT_QUADRATURE
) -> float:
    """Count of nonzero samples on a z-grid of step ``dz`` times ``dz``."""
    c = g.cos_eta
    z0 = (t - g.T) / c - 5 * dz
    n = int(math.ceil((g.support_length + 10 * dz) / dz)) + 1
    zs = z0 + dz * np.arange(n)
    vals = scalar_field_many(g, S, t, rho, zs, q)
    return float(np.count_nonzero(vals) * dz)
