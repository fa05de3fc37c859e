"""Frequency distributions B(k) supported on k >= 0."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class Spectrum:
    """Base class.  Subclasses provide ``__call__``, ``support`` and
    ``breakpoints``; everything returns 0 outside the support."""

    label: str = "spectrum"

    def __call__(self, k) -> np.ndarray:
        raise NotImplementedError

    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def breakpoints(self) -> np.ndarray:
        """Points where B or its derivative jumps; quadrature panels split here."""
        lo, hi = self.support()
        return np.array([lo, hi])

    def smooth_scale(self) -> float:
        """Largest panel width that keeps B itself well resolved."""
        lo, hi = self.support()
        return hi - lo

    @property
    def k_max(self) -> float:
        return self.support()[1]

    def is_real(self) -> bool:
        return True


@dataclass(frozen=True)
class RectangularSpectrum(Spectrum):
    """B(k) = 1 on [0, k0], 0 elsewhere."""

    k0: float

    def __post_init__(self):
        if not (np.isfinite(self.k0) and self.k0 > 0):
            raise ValueError(f"k0 must be positive, got {self.k0}")

    @property
    def label(self) -> str:
        return f"rect:{self.k0!r}"

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        return np.where((k >= 0) & (k <= self.k0), 1.0 + 0j, 0j)

    def support(self):
        return 0.0, float(self.k0)


@dataclass(frozen=True)
class GaussianSpectrum(Spectrum):
    """exp(-(k - center)^2 / (2 width^2)) restricted to [lo, hi], lo >= 0."""

    center: float
    width: float
    lo: float
    hi: float

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("width must be positive")
        if not (0 <= self.lo < self.hi):
            raise ValueError("need 0 <= lo < hi")

    @property
    def label(self) -> str:
        return f"gauss:{self.center!r},{self.width!r},{self.lo!r},{self.hi!r}"

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        inside = (k >= self.lo) & (k <= self.hi)
        g = np.exp(-0.5 * ((k - self.center) / self.width) ** 2)
        return np.where(inside, g + 0j, 0j)

    def support(self):
        return float(self.lo), float(self.hi)

    def smooth_scale(self):
        return min(self.width, self.hi - self.lo)


@dataclass(frozen=True, eq=False)
class TabulatedSpectrum(Spectrum):
    """Piecewise-linear interpolation of complex samples at ascending k >= 0.

    Outside ``[k[0], k[-1]]`` the spectrum is zero, so a table that does not
    start or end at zero amplitude has jumps at its ends.
    """

    k: np.ndarray
    values: np.ndarray
    source: str = field(default="inline", compare=False)

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if k.ndim != 1 or k.shape != v.shape or k.size < 2:
            raise ValueError("table needs at least two (k, B) nodes")
        if k[0] < 0 or np.any(np.diff(k) <= 0):
            raise ValueError("table nodes must be ascending and non-negative")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "values", v)

    @property
    def label(self) -> str:
        return f"table:{self.source}"

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        re = np.interp(k, self.k, self.values.real, left=0.0, right=0.0)
        im = np.interp(k, self.k, self.values.imag, left=0.0, right=0.0)
        return re + 1j * im

    def support(self):
        return float(self.k[0]), float(self.k[-1])

    def breakpoints(self):
        return self.k.copy()

    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0))

    @classmethod
    def from_csv(cls, path) -> "TabulatedSpectrum":
        """Read a ``k,re,im`` CSV (header optional)."""
        rows = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    rows.append([float(c) for c in row[:3]])
                except ValueError:
                    if rows:
                        raise
                    continue  # header
        data = np.array(rows)
        return cls(data[:, 0], data[:, 1] + 1j * data[:, 2], source=str(path))


def parse_spectrum(text: str) -> Spectrum:
    """Parse ``rect:<k0>``, ``gauss:<center>,<width>,<lo>,<hi>`` or ``table:<path>``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if not arg:
        raise ValueError(f"bad spectrum {text!r}")
    if kind == "rect":
        return RectangularSpectrum(float(arg))
    if kind == "gauss":
        parts = [float(p) for p in arg.split(",")]
        if len(parts) != 4:
            raise ValueError("gauss spectrum needs center,width,lo,hi")
        return GaussianSpectrum(*parts)
    if kind == "table":
        if not Path(arg).exists():
            raise ValueError(f"spectrum table {arg!r} not found")
        return TabulatedSpectrum.from_csv(arg)
    raise ValueError(f"unknown spectrum kind {kind!r}")
