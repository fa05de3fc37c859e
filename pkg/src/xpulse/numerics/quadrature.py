"""Period-aware adaptive Gauss-Legendre quadrature for Bessel-Fourier integrals.

Every field and energy formula in the package reduces to

    I(n, p; a, zeta) = int B(k) k**p J_n(k a) exp(-i k zeta) dk

over the support of B.  Both J_n(k a) and the exponential oscillate in k,
so the initial panels are at most a quarter of the shortest oscillation
period, ``(pi/2) / (a + |zeta|)``; spectrum breakpoints are always panel
edges.  Each panel is then checked against its two halves (16-point rule on
each) and bisected where they disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..spectrum import Spectrum
from .bessel import bessel_j01

GAUSS_ORDER = 16
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GAUSS_ORDER)


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 40

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSettings()


class ConvergenceError(RuntimeError):
    """Tolerance not reached within the subdivision budget."""

    def __init__(self, message, estimate, error_bound):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


def _nodes(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    k = mid[:, None] + half[:, None] * _GL_X[None, :]
    w = half[:, None] * _GL_W[None, :]
    return k, w


def initial_panels(spectrum: Spectrum, rate: float) -> tuple[np.ndarray, np.ndarray]:
    """Panel edges covering the support, split at breakpoints and capped at a
    quarter period of a phase that advances at ``rate`` radians per unit k."""
    lo, hi = spectrum.support()
    bps = np.asarray(spectrum.breakpoints(), dtype=float)
    bps = np.unique(np.clip(bps, lo, hi))
    width = spectrum.smooth_scale()
    if rate > 0:
        width = min(width, 0.5 * math.pi / rate)
    los, his = [], []
    for a, b in zip(bps[:-1], bps[1:]):
        n = max(1, int(math.ceil((b - a) / width - 1e-12)))
        edges = np.linspace(a, b, n + 1)
        los.append(edges[:-1])
        his.append(edges[1:])
    return np.concatenate(los), np.concatenate(his)


def adaptive_quadrature(
    lo: np.ndarray,
    hi: np.ndarray,
    panel_sums: Callable[[np.ndarray, np.ndarray], np.ndarray],
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate over the panels ``[lo_i, hi_i]``.

    ``panel_sums(k, w)`` receives nodes and weights of shape (P, 16) and
    returns per-panel sums of shape (P, ...).  Returns ``(value, err)`` where
    ``err`` is the accumulated coarse-vs-fine discrepancy.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    total_width = float(np.sum(hi - lo))
    if total_width <= 0:
        raise ValueError("empty integration range")
    value = None
    err = None
    tol = None
    for level in range(q.max_subdivisions + 1):
        mid = 0.5 * (lo + hi)
        n = lo.size
        k, w = _nodes(np.concatenate([lo, lo, mid]), np.concatenate([hi, mid, hi]))
        sums = panel_sums(k, w)
        coarse = sums[:n]
        fine = sums[n : 2 * n] + sums[2 * n :]
        diff = np.abs(coarse - fine)
        if value is None:
            value = np.zeros(fine.shape[1:], dtype=fine.dtype)
            err = np.zeros(fine.shape[1:])
            tol = np.maximum(q.abs_tol, q.rel_tol * np.abs(fine.sum(axis=0)))
        frac = ((hi - lo) / total_width).reshape((-1,) + (1,) * (diff.ndim - 1))
        ok = np.all((diff <= tol * frac).reshape(n, -1), axis=1)
        value = value + fine[ok].sum(axis=0)
        err = err + diff[ok].sum(axis=0)
        if np.all(ok):
            return value, err
        bad = ~ok
        lo, hi = (
            np.concatenate([lo[bad], mid[bad]]),
            np.concatenate([mid[bad], hi[bad]]),
        )
        pending_value = fine[bad].sum(axis=0)
        pending_err = diff[bad].sum(axis=0)
    raise ConvergenceError(
        f"quadrature did not converge in {q.max_subdivisions} subdivisions",
        value + pending_value,
        err + pending_err,
    )


def _bessel(n: int, x: np.ndarray) -> np.ndarray:
    j0, j1 = bessel_j01(x)
    return j0 if n == 0 else j1


def spectral_integrals(
    spectrum: Spectrum,
    kernels: Sequence[tuple[int, int]],
    a,
    zeta,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
    grid: bool = False,
) -> np.ndarray:
    """Vectorised ``I(n, p; a, zeta)`` for several ``(n, p)`` kernels at once.

    With ``grid=False`` the arrays ``a`` and ``zeta`` are paired pointwise
    (broadcast to a common 1-D shape) and the result has shape
    ``(len(kernels), m)``.  With ``grid=True`` the result is evaluated on the
    outer product and has shape ``(len(kernels), len(a), len(zeta))``.
    All points share one adaptive panel layout.
    """
    for n, p in kernels:
        if n not in (0, 1) or p not in (0, 1, 2, 3):
            raise ValueError(f"unsupported kernel (n={n}, p={p})")
    a = np.atleast_1d(np.asarray(a, dtype=float))
    zeta = np.atleast_1d(np.asarray(zeta, dtype=float))
    if not grid:
        a, zeta = np.broadcast_arrays(a, zeta)
        a, zeta = a.ravel(), zeta.ravel()
    if np.any(a < 0) or not (np.all(np.isfinite(a)) and np.all(np.isfinite(zeta))):
        raise ValueError("need finite a >= 0 and finite zeta")
    rate = float(a.max(initial=0.0) + np.abs(zeta).max(initial=0.0))
    lo, hi = initial_panels(spectrum, rate)
    orders = sorted({n for n, _ in kernels})
    powers = [p for _, p in kernels]

    def panel_sums(k, w):
        b = spectrum(k) * w  # (P, G)
        phase = np.exp(-1j * k[..., None] * zeta)  # (P, G, Z)
        arg = k[..., None] * a  # (P, G, A)
        bess = {}
        if 0 in orders and 1 in orders:
            bess[0], bess[1] = bessel_j01(arg)
        else:
            bess[orders[0]] = _bessel(orders[0], arg)
        out = []
        for (n, _), p in zip(kernels, powers):
            weight = b * k**p
            if grid:
                out.append(np.matmul((weight[..., None] * bess[n]).transpose(0, 2, 1), phase))
            else:
                out.append(np.einsum("pg,pgm,pgm->pm", weight, bess[n], phase))
        return np.stack(out, axis=1)

    value, _ = adaptive_quadrature(lo, hi, panel_sums, q)
    return value


def spectral_integral(
    spectrum: Spectrum,
    n: int,
    p: int,
    a: float,
    zeta: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> complex:
    """int B(k) k**p J_n(k a) exp(-i k zeta) dk over the support of B."""
    if a < 0:
        raise ValueError("a must be non-negative")
    return complex(spectral_integrals(spectrum, [(n, p)], a, zeta, q)[0, 0])


def spectrum_moment(
    spectrum: Spectrum, p: int, q: QuadratureSettings = DEFAULT_QUADRATURE
) -> float:
    """int |B(k)|**2 k**p dk."""
    if p not in (1, 3):
        raise ValueError("moment order must be 1 or 3")
    lo, hi = initial_panels(spectrum, 0.0)

    def panel_sums(k, w):
        return np.sum(np.abs(spectrum(k)) ** 2 * k**p * w, axis=1)

    value, _ = adaptive_quadrature(lo, hi, panel_sums, q)
    return float(value)
