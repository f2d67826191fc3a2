"""Smooth window profile of a constrained interval and its derivatives.

The window is the multiplication operator obtained by quantizing the
indicator of the interval with Gaussian coherent states of width ``ell``::

    B(x) = 1/2 [erfc((a - x)/ell) - erfc((b - x)/ell)]

All lengths are in units of ``q0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class Geometry:
    """Constraint set: the bounded interval (a, b) or the half-line (a, inf)."""

    kind: str = "bounded"
    a: float = 0.0
    b: float = 10.0

    def __post_init__(self):
        if self.kind not in ("bounded", "half_line"):
            raise DomainError(f"unknown geometry kind {self.kind!r}")
        if not math.isfinite(self.a):
            raise DomainError("left endpoint must be finite")
        if self.kind == "bounded":
            if not math.isfinite(self.b) or not self.a < self.b:
                raise DomainError(f"bounded geometry needs a < b, got a={self.a}, b={self.b}")
        else:
            object.__setattr__(self, "b", math.inf)

    @classmethod
    def bounded(cls, a: float, b: float) -> "Geometry":
        return cls("bounded", float(a), float(b))

    @classmethod
    def half_line(cls, a: float = 0.0) -> "Geometry":
        return cls("half_line", float(a), math.inf)

    @property
    def is_bounded(self) -> bool:
        return self.kind == "bounded"

    @property
    def midpoint(self) -> float:
        if not self.is_bounded:
            raise DomainError("half-line has no midpoint")
        return 0.5 * (self.a + self.b)

    def indicator(self, x):
        x = np.asarray(x, dtype=float)
        return ((x > self.a) & (x < self.b)).astype(float)[()]


@dataclass(frozen=True)
class QuantizationParams:
    """ell, hbar and mass in units built on q0 (dimensionless mode: all 1)."""

    ell: float = 0.1
    hbar: float = 1.0
    mass: float = 1.0
    q0: float = 1.0

    def __post_init__(self):
        for name in ("ell", "hbar", "mass", "q0"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v}")

    @property
    def alpha(self) -> float:
        """Energy unit hbar^2 / (m q0^2)."""
        return self.hbar**2 / (self.mass * self.q0**2)

    @property
    def force_unit(self) -> float:
        """F0 = hbar^2 / (2 m q0^2)."""
        return self.hbar**2 / (2.0 * self.mass * self.q0**2)

    @property
    def critical_momentum(self) -> float:
        return self.hbar / self.ell


def _finite(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("non-finite argument")
    return x


def _check_ell(ell):
    if not (math.isfinite(ell) and ell > 0):
        raise DomainError(f"ell must be finite and > 0, got {ell}")


def erfc(x):
    """Complementary error function, ``2/sqrt(pi) * int_x^inf exp(-t^2) dt``."""
    return special.erfc(_finite(x))[()]


def window_B(x, geom: Geometry, ell: float):
    """Window profile B_ell(x; a, b), vectorised over ``x``."""
    x = _finite(x)
    _check_ell(ell)
    a = geom.a
    if not geom.is_bounded:
        return (0.5 * special.erfc((a - x) / ell))[()]
    b = geom.b
    # right of the midpoint use erfc(-z) = 2 - erfc(z) so the right tail keeps
    # relative accuracy instead of cancelling 2 - 2
    left = 0.5 * (special.erfc((a - x) / ell) - special.erfc((b - x) / ell))
    right = 0.5 * (special.erfc((x - b) / ell) - special.erfc((x - a) / ell))
    return np.where(x <= 0.5 * (a + b), left, right)[()]


def _gaussians(x, geom, ell):
    ua = (x - geom.a) / ell
    ga = np.exp(-ua * ua)
    if geom.is_bounded:
        ub = (x - geom.b) / ell
        gb = np.exp(-ub * ub)
    else:
        ub = np.zeros_like(x)
        gb = np.zeros_like(x)
    return ua, ga, ub, gb


def window_dB(order: int, x, geom: Geometry, ell: float):
    """Analytic x-derivative of :func:`window_B` of order 1 or 2 (units q0^-order)."""
    if order not in (1, 2):
        raise DomainError(f"derivative order must be 1 or 2, got {order}")
    x = _finite(x)
    _check_ell(ell)
    ua, ga, ub, gb = _gaussians(x, geom, ell)
    c = 1.0 / (SQRT_PI * ell)
    if order == 1:
        return (c * (ga - gb))[()]
    return (-2.0 * c / ell * (ua * ga - ub * gb))[()]


def gaussian_moment_term(x, geom: Geometry, ell: float):
    """(1/sqrt(pi)) [u_a exp(-u_a^2) - u_b exp(-u_b^2)], u = (x - endpoint)/ell.

    Equals ``-ell^2 B''/2``; finite everywhere, used where dividing by B is unsafe.
    """
    x = _finite(x)
    ua, ga, ub, gb = _gaussians(x, geom, ell)
    return ((ua * ga - ub * gb) / SQRT_PI)[()]


def window_B_scalar(x: float, a: float, b: float, ell: float) -> float:
    """Scalar :func:`window_B` on plain floats (b may be inf), for ODE right-hand sides."""
    if b == math.inf:
        return 0.5 * math.erfc((a - x) / ell)
    if x <= 0.5 * (a + b):
        return 0.5 * (math.erfc((a - x) / ell) - math.erfc((b - x) / ell))
    return 0.5 * (math.erfc((x - b) / ell) - math.erfc((x - a) / ell))


def window_dB_scalar(x: float, a: float, b: float, ell: float) -> float:
    """Scalar first derivative of the window."""
    ua = (x - a) / ell
    out = math.exp(-ua * ua)
    if b != math.inf:
        ub = (x - b) / ell
        out -= math.exp(-ub * ub)
    return out / (SQRT_PI * ell)
