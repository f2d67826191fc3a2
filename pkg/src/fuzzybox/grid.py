"""Uniform spatial grids and sampled wave functions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CoverageError, DomainError, ResolutionError


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise DomainError(f"grid needs n >= 3 points, got {self.n}")
        if not self.x_max > self.x_min:
            raise DomainError("grid needs x_max > x_min")

    @classmethod
    def from_spacing(cls, x_min: float, x_max: float, h: float) -> "Grid":
        """Grid with spacing exactly ``h``; x_max is rounded up to a whole step."""
        if not h > 0:
            raise DomainError("grid spacing must be > 0")
        n = int(math.ceil((x_max - x_min) / h - 1e-9)) + 1
        return cls(float(x_min), float(x_min + (n - 1) * h), n)

    @classmethod
    def symmetric(cls, center: float, half_width: float, h: float) -> "Grid":
        """Grid symmetric about ``center`` with a node on the center."""
        k = int(math.ceil(half_width / h - 1e-9))
        return cls(center - k * h, center + k * h, 2 * k + 1)

    @classmethod
    def covering(cls, geom, ell: float, h: float, width: float = 1.0, pad_widths: float = 6.0,
                 span=None) -> "Grid":
        """Default grid ``[a - 8 ell - 6w, b + 8 ell + 6w]`` (bounded geometry).

        ``span`` overrides the core interval, which is required for the half-line.
        """
        lo, hi = span if span is not None else (geom.a, geom.b)
        if not math.isfinite(hi):
            raise DomainError("half-line grids need an explicit span")
        pad = 8.0 * ell + pad_widths * width
        if geom.is_bounded and span is None:
            return cls.symmetric(0.5 * (lo + hi), 0.5 * (hi - lo) + pad, h)
        return cls.from_spacing(lo - pad, hi + pad, h)

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(self.n)

    @property
    def weights(self) -> np.ndarray:
        w = np.full(self.n, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w

    def midpoints(self) -> np.ndarray:
        return self.x[:-1] + 0.5 * self.h

    def require_resolution(self, ell: float, factor: float = 10.0):
        if self.h > ell / factor * (1 + 1e-9):
            raise ResolutionError(f"grid spacing {self.h:.3g} exceeds ell/{factor:g} = {ell / factor:.3g}")

    def require_cover(self, lo: float, hi: float):
        if lo < self.x_min - 1e-12 or hi > self.x_max + 1e-12:
            raise CoverageError(f"grid [{self.x_min:g}, {self.x_max:g}] does not cover [{lo:g}, {hi:g}]")

    def integrate(self, values) -> complex | float:
        """Trapezoid rule."""
        return np.dot(self.weights, values)[()]


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n,):
            raise DomainError(f"expected {self.grid.n} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("wave function has non-finite samples")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def norm(self) -> float:
        return math.sqrt(self.grid.integrate(np.abs(self.values) ** 2))

    @property
    def normalized(self) -> bool:
        return abs(self.norm - 1.0) <= 1e-10

    def normalize(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.values / self.norm)

    def inner(self, other: "WaveFunction") -> complex:
        """<self|other> by the trapezoid rule."""
        if other.grid != self.grid:
            raise DomainError("wave functions live on different grids")
        return complex(self.grid.integrate(np.conj(self.values) * other.values))

    def derivative(self) -> np.ndarray:
        return spectral_derivative(self.values, self.grid.h)


def spectral_derivative(values, h: float, order: int = 1) -> np.ndarray:
    """FFT derivative; exact up to rounding for smooth samples that vanish at both grid ends."""
    values = np.asarray(values)
    k = 2.0 * np.pi * np.fft.fftfreq(values.shape[-1], d=h)
    out = np.fft.ifft((1j * k) ** order * np.fft.fft(values))
    return out if np.iscomplexobj(values) else out.real
