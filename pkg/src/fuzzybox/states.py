"""Gaussian probe states, expectation values and the modified uncertainty relation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .grid import Grid, WaveFunction, spectral_derivative
from .operators import BandedOperator, commutator_C, position_symbol
from .windowfn import Geometry, QuantizationParams, window_B, window_dB


@dataclass(frozen=True)
class GaussianProbe:
    """psi(x) = (w sqrt(pi))^(-1/2) exp(-(x - c)^2 / 2 w^2) exp(i k x)."""

    center: float
    width: float = 1.0
    boost: float = 0.0

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError("probe width must be > 0")

    def sample(self, grid: Grid) -> WaveFunction:
        grid.require_cover(self.center - 6 * self.width, self.center + 6 * self.width)
        x = grid.x
        vals = (self.width * math.sqrt(math.pi)) ** -0.5 * np.exp(
            -((x - self.center) ** 2) / (2 * self.width**2) + 1j * self.boost * x
        )
        return WaveFunction(grid, vals)


def expectation(op: BandedOperator, state: WaveFunction) -> complex:
    if op.grid != state.grid:
        raise DomainError("operator and state live on different grids")
    psi = state.values
    return complex(state.grid.integrate(np.conj(psi) * op.apply(psi)))


@dataclass(frozen=True)
class Uncertainty:
    delta_q: float
    delta_p: float
    bound: float

    @property
    def product(self) -> float:
        return self.delta_q * self.delta_p

    @property
    def slack(self) -> float:
        return self.product - self.bound


def _apply_momentum(psi, x, h, geom, params):
    # -i hbar (B d/dx + B'/2), derivative taken spectrally
    B = window_B(x, geom, params.ell)
    dB = window_dB(1, x, geom, params.ell)
    return -1j * params.hbar * (B * spectral_derivative(psi, h) + 0.5 * dB * psi)


def uncertainty_product(state: WaveFunction, geom: Geometry, params: QuantizationParams,
                        slack: float = 1e-8) -> Uncertainty:
    """Standard deviations of A_q, A_p and the bound (hbar/2)|<C_om>|.

    The momentum operator is applied with a spectral derivative, so the
    result carries no finite-difference error and can be held to ``slack``.
    """
    grid = state.grid
    grid.require_resolution(params.ell)
    x, h = grid.x, grid.h
    psi = state.values
    norm2 = grid.integrate(np.abs(psi) ** 2).real
    Q = position_symbol(x, geom, params)
    q1 = grid.integrate(Q * np.abs(psi) ** 2).real / norm2
    q2 = grid.integrate(Q**2 * np.abs(psi) ** 2).real / norm2
    ppsi = _apply_momentum(psi, x, h, geom, params)
    p1 = grid.integrate(np.conj(psi) * ppsi).real / norm2
    p2 = grid.integrate(np.abs(ppsi) ** 2).real / norm2
    c = grid.integrate(commutator_C(x, geom, params) * np.abs(psi) ** 2).real / norm2
    dq = math.sqrt(max(q2 - q1 * q1, 0.0))
    dp = math.sqrt(max(p2 - p1 * p1, 0.0))
    out = Uncertainty(dq, dp, 0.5 * params.hbar * abs(c))
    if out.slack < -slack:
        raise NumericalError(f"uncertainty relation violated: product {out.product!r} < bound {out.bound!r}")
    return out


def mean_commutator(state: WaveFunction, geom: Geometry, params: QuantizationParams) -> float:
    """<C_om> from the closed-form multiplication operator."""
    grid = state.grid
    return float(grid.integrate(commutator_C(grid.x, geom, params) * np.abs(state.values) ** 2).real)


def scan_grid(centers, geom: Geometry, params: QuantizationParams, width: float, h: float | None = None) -> Grid:
    """Grid symmetric about the interval midpoint covering every probe +- 6 widths."""
    h = h or params.ell / 10
    lo = min(min(centers) - 6 * width, geom.a - 8 * params.ell)
    hi = max(max(centers) + 6 * width, geom.b + 8 * params.ell)
    mid = geom.midpoint
    return Grid.symmetric(mid, max(mid - lo, hi - mid), h)


def com_scan(c_cen_values, geom: Geometry | None = None, params: QuantizationParams | None = None,
             width: float = 1.0, grid: Grid | None = None) -> np.ndarray:
    """<C_om> for Gaussian probes centred at each of ``c_cen_values``.

    Defaults: ell = 0.1, a = 0, b = 10, probe width 1 (all in q0).
    """
    geom = geom or Geometry.bounded(0.0, 10.0)
    params = params or QuantizationParams(ell=0.1)
    centers = [float(c) for c in c_cen_values]
    grid = grid or scan_grid(centers, geom, params, width)
    C = commutator_C(grid.x, geom, params)
    out = np.empty(len(centers))
    for i, c in enumerate(centers):
        psi = GaussianProbe(c, width).sample(grid).values
        out[i] = grid.integrate(C * np.abs(psi) ** 2).real
    return out
