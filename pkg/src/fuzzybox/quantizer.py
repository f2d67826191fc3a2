"""Coherent states, integral-quantization matrix elements and phase-space portraits.

The coherent state labelled by (q, p) reads, in position representation::

    <x|q,p> = (pi ell^2)^(-1/4) exp(-i p q / 2 hbar) exp(i p x / hbar) exp(-(x - q)^2 / 2 ell^2)

Matrix elements of the quantized observable ``chi_E(q) f(q, p)`` are computed
here directly from the phase-space integral, independently of the matrices
assembled in :mod:`fuzzybox.operators`, so each side can check the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericalError, ResolutionError
from .grid import Grid, WaveFunction
from .windowfn import Geometry, QuantizationParams, window_B, window_dB

__all__ = [
    "PhaseState",
    "ObservableSpec",
    "Grid",
    "WaveFunction",
    "cs_sample",
    "cs_overlap",
    "overlap_density",
    "quantize_element",
    "portrait",
]

KINDS = ("unit", "position", "momentum", "kinetic")

# a Gaussian exp(-u^2 / 2 ell^2) is below 1e-31 beyond this many ell
_CUTOFF = 12.0


@dataclass(frozen=True)
class PhaseState:
    q: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.q) and math.isfinite(self.p)):
            raise DomainError("phase-space point must be finite")


@dataclass(frozen=True)
class ObservableSpec:
    """One of the classical observables 1, q, p, p^2/2m, optionally times chi_E(q)."""

    kind: str
    restricted: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unsupported observable {self.kind!r}; expected one of {KINDS}")


def cs_sample(state: PhaseState, grid: Grid, params: QuantizationParams) -> WaveFunction:
    ell, hbar = params.ell, params.hbar
    grid.require_cover(state.q - 6 * ell, state.q + 6 * ell)
    if grid.h > ell / 10 * (1 + 1e-9):
        raise ResolutionError(f"grid spacing {grid.h:.3g} does not resolve ell = {ell:g}")
    if state.p != 0 and grid.h > 2 * math.pi * hbar / (20 * abs(state.p)) * (1 + 1e-9):
        raise ResolutionError(f"grid spacing {grid.h:.3g} does not resolve momentum {state.p:g}")
    x = grid.x
    values = (
        (math.pi * ell**2) ** -0.25
        * np.exp(1j * state.p * (x - 0.5 * state.q) / hbar)
        * np.exp(-((x - state.q) ** 2) / (2 * ell**2))
    )
    return WaveFunction(grid, values)


def cs_overlap(s1: PhaseState, s2: PhaseState, params: QuantizationParams) -> complex:
    """<s1|s2> in closed form."""
    ell, hbar = params.ell, params.hbar
    phase = (s2.p * s1.q - s2.q * s1.p) / (2 * hbar)
    mod = math.exp(-((s2.q - s1.q) ** 2) / (4 * ell**2) - ell**2 * (s2.p - s1.p) ** 2 / (4 * hbar**2))
    return complex(math.cos(phase) * mod, math.sin(phase) * mod)


def overlap_density(s1: PhaseState, s2: PhaseState, params: QuantizationParams) -> float:
    """|<s1|s2>|^2 as the Gaussian product with widths 2 ell^2 and 2 hbar^2/ell^2."""
    ell, hbar = params.ell, params.hbar
    return math.exp(-((s1.q - s2.q) ** 2) / (2 * ell**2) - (s1.p - s2.p) ** 2 / (2 * hbar**2 / ell**2))


def _q_range(f: ObservableSpec, geom: Geometry, lo: float, hi: float):
    if f.restricted:
        lo, hi = max(lo, geom.a), min(hi, geom.b)
    return lo, hi


def _center(wf: WaveFunction) -> float:
    rho = np.abs(wf.values) ** 2
    return float(wf.grid.integrate(wf.grid.x * rho) / wf.grid.integrate(rho))


def quantize_element(f: ObservableSpec, bra: WaveFunction, ket: WaveFunction, geom: Geometry,
                     params: QuantizationParams, tol: float = 1e-9) -> complex:
    """<bra| A_f |ket> from the phase-space integral over chi_E(q) f(q, p) |q,p><q,p|.

    For fixed q the p-integral is done in closed form: by Parseval, the moments
    int dp/(2 pi hbar) p^k <bra|q,p><q,p|ket> become x-integrals of the
    Gaussian-windowed states and their derivatives (spectral on the grid).
    The remaining q-integral is adaptive with absolute tolerance ``tol``.
    """
    if bra.grid != ket.grid:
        raise DomainError("bra and ket live on different grids")
    for wf in (bra, ket):
        if abs(wf.norm - 1.0) > 1e-8:
            raise DomainError(f"state not normalized (norm = {wf.norm:.12g})")
    grid = bra.grid
    if grid.h > params.ell / 10 * (1 + 1e-9):
        raise ResolutionError(f"grid spacing {grid.h:.3g} does not resolve ell = {params.ell:g}")
    ell, hbar, m = params.ell, params.hbar, params.mass
    x, h = grid.x, grid.h
    phi, psi = bra.values, ket.values
    dphi, dpsi = bra.derivative(), ket.derivative()
    c2 = 1.0 / (math.sqrt(math.pi) * ell)  # (pi ell^2)^(-1/2), both windows together
    half = int(math.ceil(_CUTOFF * ell / h))

    def moment(q):
        i = int(round((q - grid.x_min) / h))
        sl = slice(max(i - half, 0), min(i + half + 1, grid.n))
        u = x[sl] - q
        g = np.exp(-u * u / (2 * ell**2))
        if f.kind in ("unit", "position"):
            val = c2 * h * np.dot(g * g, np.conj(phi[sl]) * psi[sl])
            if f.kind == "position":
                val *= q
        else:
            dg = -u / ell**2 * g
            du = dg * psi[sl] + g * dpsi[sl]
            if f.kind == "momentum":
                val = -1j * hbar * c2 * h * np.dot(g * np.conj(phi[sl]), du)
            else:
                dv = dg * phi[sl] + g * dphi[sl]
                val = hbar**2 / (2 * m) * c2 * h * np.dot(np.conj(dv), du)
        return np.array([val.real, val.imag])

    lo, hi = _q_range(f, geom, grid.x_min, grid.x_max)
    if not lo < hi:
        return 0j
    points = sorted({c for c in (_center(bra), _center(ket)) if lo < c < hi})
    val, err = integrate.quad_vec(moment, lo, hi, epsabs=0.1 * tol, epsrel=1e-13,
                                  points=points or None, limit=20000)
    if not err <= tol:
        raise NumericalError(f"q-quadrature reached only {err:.3g} (wanted {tol:.3g})", achieved=err)
    return complex(val[0], val[1])


def _portrait_closed(f, q, p, geom, params):
    ell2 = math.sqrt(2) * params.ell
    spread = params.hbar**2 / (2 * params.mass * params.ell**2)
    if not f.restricted:
        base = {"unit": 1.0, "position": q, "momentum": p}
        return base[f.kind] if f.kind in base else p * p / (2 * params.mass) + spread
    B = window_B(q, geom, ell2)
    if f.kind == "unit":
        return B
    if f.kind == "position":
        return q * B + params.ell**2 * window_dB(1, q, geom, ell2)
    if f.kind == "momentum":
        return p * B
    return B * (p * p / (2 * params.mass) + spread)


def _portrait_quadrature(f, q, p, geom, params, tol):
    ell, hbar, m = params.ell, params.hbar, params.mass
    # closed-form p'-moments of the Gaussian weight, per unit q'-density
    norm = 1.0 / (math.sqrt(2 * math.pi) * ell)
    p_moment = {"unit": 1.0, "position": 1.0, "momentum": p,
                "kinetic": (p * p + hbar**2 / ell**2) / (2 * m)}[f.kind]
    lo, hi = _q_range(f, geom, q - _CUTOFF * ell, q + _CUTOFF * ell)
    if not lo < hi:
        return 0.0
    if f.kind == "position":
        integrand = lambda s: s * math.exp(-((s - q) ** 2) / (2 * ell**2))  # noqa: E731
    else:
        integrand = lambda s: math.exp(-((s - q) ** 2) / (2 * ell**2))  # noqa: E731
    pts = [q] if lo < q < hi else None
    val, err = integrate.quad(integrand, lo, hi, points=pts, epsabs=1e-3 * tol, epsrel=1e-13, limit=200)
    err *= norm * abs(p_moment)
    if not err <= tol:
        raise NumericalError(f"portrait quadrature reached only {err:.3g}", achieved=err)
    return norm * p_moment * val


def portrait(f: ObservableSpec, at: PhaseState, geom: Geometry, params: QuantizationParams,
             method: str = "closed_form", tol: float = 1e-7) -> float:
    """Lower symbol <q,p| A_f |q,p>, in closed form or by phase-space quadrature."""
    if method == "closed_form":
        return float(_portrait_closed(f, at.q, at.p, geom, params))
    if method == "quadrature":
        return float(_portrait_quadrature(f, at.q, at.p, geom, params, tol))
    raise DomainError(f"unknown portrait method {method!r}")
