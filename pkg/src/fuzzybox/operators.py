"""Discretized E-modified operators and their closed-form symbols.

Operators act on samples over a uniform :class:`~fuzzybox.grid.Grid`.  Rows at
the two grid ends are truncated (zero outside the grid), which keeps every
matrix exactly Hermitian; states are expected to vanish there.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, sparse

from .errors import DomainError, NumericalError
from .grid import Grid
from .windowfn import Geometry, QuantizationParams, gaussian_moment_term, window_B, window_dB

ORDERINGS = ("anticommutator_half", "p_sandwich")


@dataclass(frozen=True, eq=False)
class BandedOperator:
    grid: Grid
    matrix: sparse.csr_matrix = field(repr=False)
    hermitian: bool = True
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "matrix", sparse.csr_matrix(self.matrix))

    @property
    def bandwidth(self) -> int:
        coo = self.matrix.tocoo()
        nz = coo.data != 0
        return int(np.max(np.abs(coo.row[nz] - coo.col[nz]), initial=0))

    def apply(self, values) -> np.ndarray:
        return self.matrix @ np.asarray(values)

    def __matmul__(self, values):
        return self.apply(values)

    def hermiticity_defect(self) -> float:
        """max |A - A^H| / max |A|."""
        diff = self.matrix - self.matrix.conj().T
        scale = abs(self.matrix).max() or 1.0
        return float(abs(diff).max() / scale) if diff.nnz else 0.0

    def bands(self) -> dict[int, np.ndarray]:
        """Diagonals keyed by offset (0 main, +k super, -k sub)."""
        k = self.bandwidth
        return {off: self.matrix.diagonal(off) for off in range(-k, k + 1)}

    def to_csv(self, path) -> None:
        """Band dump: x, then real/imag part of each diagonal (padded with 0 at the ends)."""
        bands = self.bands()
        n = self.grid.n
        cols = []
        for off, d in sorted(bands.items()):
            full = np.zeros(n, dtype=complex)
            # entry (i, i + off) is listed on row i
            if off >= 0:
                full[: n - off] = d
            else:
                full[-off:] = d
            cols.append((off, full))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x [q0]"] + [f"{p}(d{off:+d})" for off, _ in cols for p in ("re", "im")])
            for i, x in enumerate(self.grid.x):
                row = [format(x, ".17g")]
                for _, full in cols:
                    row += [format(full[i].real, ".17g"), format(full[i].imag, ".17g")]
                w.writerow(row)


# ---------------------------------------------------------------------------
# closed-form symbols


def position_symbol(x, geom: Geometry, params: QuantizationParams):
    """Q(x) = x B + (ell^2/2) B', the multiplier of the modified position operator."""
    ell = params.ell
    return (np.asarray(x) * window_B(x, geom, ell) + 0.5 * ell**2 * window_dB(1, x, geom, ell))[()]


def spectral_density(x, geom: Geometry, params: QuantizationParams):
    """dQ/dx = B + x B' + (ell^2/2) B''."""
    ell = params.ell
    x = np.asarray(x, dtype=float)
    return (window_B(x, geom, ell) + x * window_dB(1, x, geom, ell)
            + 0.5 * ell**2 * window_dB(2, x, geom, ell))[()]


def _breakpoints(geom, ell, lo, hi, k=10.0):
    pts = {lo, hi}
    for e in (geom.a, geom.b):
        if math.isfinite(e):
            pts.update(p for p in (e - k * ell, e, e + k * ell) if lo < p < hi)
    return sorted(pts)


def _piecewise_quad(fun, pts, tol):
    total, err = 0.0, 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        v, e = integrate.quad(fun, lo, hi, epsabs=tol / (4 * len(pts)), epsrel=1e-12, limit=400)
        total += v
        err += e
    if not err <= tol:
        raise NumericalError(f"quadrature error {err:.3g} above {tol:.3g}", achieved=err)
    return total


def spectral_weight(c: float, d: float, geom: Geometry, params: QuantizationParams, tol: float = 1e-9) -> float:
    """Spectral measure of [c, d]: integral of :func:`spectral_density`."""
    if c > d:
        raise DomainError(f"need c <= d, got c={c}, d={d}")
    if c == d:
        return 0.0
    return _piecewise_quad(lambda s: spectral_density(s, geom, params), _breakpoints(geom, params.ell, c, d), tol)


def mass_inverse(x, geom: Geometry, params: QuantizationParams):
    """1/M(x) = B(x)/m."""
    return (window_B(x, geom, params.ell) / params.mass)[()]


def mass(x, geom: Geometry, params: QuantizationParams):
    """M(x) = m / B(x); +inf where B underflows."""
    inv = np.asarray(mass_inverse(x, geom, params))
    with np.errstate(divide="ignore"):
        return np.where(inv > 0, 1.0 / np.where(inv > 0, inv, 1.0), np.inf)[()]


def potential(sign: str, x, geom: Geometry, params: QuantizationParams):
    """Induced potential V+ (sign '+') or V- (sign '-').

    V+- = hbar^2/(4 ell^2 m) (B +- ell^2 B''/2), written with explicit Gaussians
    so it stays finite where B vanishes.
    """
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    ell = params.ell
    s = 1.0 if sign == "+" else -1.0
    pref = params.hbar**2 / (4 * ell**2 * params.mass)
    return (pref * (window_B(x, geom, ell) - s * gaussian_moment_term(x, geom, ell)))[()]


def commutator_C(x, geom: Geometry, params: QuantizationParams):
    """C_om(x) = B(x) dQ/dx, with [A_q, A_p] = i hbar C_om."""
    return (window_B(x, geom, params.ell) * spectral_density(x, geom, params))[()]


def poisson_bracket_symbols(q, geom: Geometry, params: QuantizationParams):
    """{q_check, p_check} = B (B + q B' + ell^2 B'') with B of width sqrt(2) ell."""
    ell2 = math.sqrt(2) * params.ell
    q = np.asarray(q, dtype=float)
    B = window_B(q, geom, ell2)
    return (B * (B + q * window_dB(1, q, geom, ell2) + params.ell**2 * window_dB(2, q, geom, ell2)))[()]


def weak_limit_C(test_fn, ell_sequence, geom: Geometry, params: QuantizationParams | None = None,
                 span=None, tol: float = 1e-10) -> list[float]:
    """Errors |<C_om, phi> - (int_a^b phi + (a phi(a) - b phi(b))/2)| along ``ell_sequence``.

    ``span`` bounds the integration domain; it defaults to the interval padded by 10.
    """
    if not geom.is_bounded:
        raise DomainError("weak limit is defined for the bounded interval")
    params = params or QuantizationParams()
    a, b = geom.a, geom.b
    lo, hi = span if span is not None else (a - 10.0, b + 10.0)
    target = _piecewise_quad(test_fn, [a, b], tol) + 0.5 * (a * test_fn(a) - b * test_fn(b))
    errors = []
    for ell in ell_sequence:
        p = QuantizationParams(ell, params.hbar, params.mass, params.q0)
        val = _piecewise_quad(lambda s: commutator_C(s, geom, p) * test_fn(s), _breakpoints(geom, ell, lo, hi), tol)
        errors.append(abs(val - target))
    return errors


# ---------------------------------------------------------------------------
# matrices


def _diag(grid, values, label, hermitian=True):
    return BandedOperator(grid, sparse.diags(np.asarray(values), 0, format="csr"), hermitian, label)


def _centered_difference(n, h):
    off = np.full(n - 1, 0.5 / h)
    return sparse.diags([-off, off], [-1, 1], format="csr")


def _laplacian(n, h):
    return sparse.diags([np.full(n - 1, 1.0), np.full(n, -2.0), np.full(n - 1, 1.0)], [-1, 0, 1],
                        format="csr") / h**2


def window_matrix(grid: Grid, geom: Geometry, params: QuantizationParams) -> BandedOperator:
    grid.require_resolution(params.ell)
    return _diag(grid, window_B(grid.x, geom, params.ell), "window")


def position_matrix(grid: Grid, geom: Geometry, params: QuantizationParams) -> BandedOperator:
    grid.require_resolution(params.ell)
    return _diag(grid, position_symbol(grid.x, geom, params), "position")


def momentum_matrix(grid: Grid, geom: Geometry, params: QuantizationParams) -> BandedOperator:
    """-i hbar (B D + D B)/2 with D the centered difference: exactly Hermitian."""
    grid.require_resolution(params.ell)
    B = sparse.diags(window_B(grid.x, geom, params.ell))
    D = _centered_difference(grid.n, grid.h)
    return BandedOperator(grid, -0.5j * params.hbar * (B @ D + D @ B), True, "momentum")


def hamiltonian_matrix(ordering: str, grid: Grid, geom: Geometry, params: QuantizationParams) -> BandedOperator:
    """Quantized chi_E p^2/2m in one of its two equivalent symmetric orderings.

    anticommutator_half: -(hbar^2/4) {1/M, d^2/dx^2} + V+
    p_sandwich:          -(hbar^2/2) d/dx (1/M) d/dx + V-
    """
    if ordering not in ORDERINGS:
        raise DomainError(f"unknown ordering {ordering!r}; expected one of {ORDERINGS}")
    grid.require_resolution(params.ell)
    hbar, h, n = params.hbar, grid.h, grid.n
    x = grid.x
    if ordering == "anticommutator_half":
        inv = sparse.diags(mass_inverse(x, geom, params))
        L = _laplacian(n, h)
        kin = -0.25 * hbar**2 * (inv @ L + L @ inv)
        pot = potential("+", x, geom, params)
    else:
        inv_mid = mass_inverse(grid.midpoints(), geom, params)
        c = 0.5 * hbar**2 / h**2
        main = np.zeros(n)
        main[:-1] += inv_mid
        main[1:] += inv_mid
        kin = sparse.diags([-c * inv_mid, c * main, -c * inv_mid], [-1, 0, 1])
        pot = potential("-", x, geom, params)
    mat = sparse.csr_matrix(kin + sparse.diags(pot))
    return BandedOperator(grid, mat, True, f"hamiltonian[{ordering}]")


def commutator_matrix(grid: Grid, geom: Geometry, params: QuantizationParams) -> BandedOperator:
    """[A_q, A_p] / (i hbar) built from the assembled matrices."""
    Q = position_matrix(grid, geom, params).matrix
    P = momentum_matrix(grid, geom, params).matrix
    comm = (Q @ P - P @ Q) / (1j * params.hbar)
    return BandedOperator(grid, comm, True, "commutator")
