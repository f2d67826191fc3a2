"""Classical and semi-classical mechanics with a position-dependent mass.

A :class:`MechanicalSystem` stores the inverse mass rather than the mass so
that regions where the mass diverges (1/m -> 0) stay representable.  With
H = p^2/(2 m(q)) + V(q) the canonical equations are

    dq/dt = p / m(q)
    dp/dt = -V'(q) - (p^2/2) (1/m)'(q)

and the force m(q) q'' = -V'(q) + (p^2/2) (1/m)'(q).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DivergenceError, DomainError
from .quantizer import PhaseState
from .windowfn import Geometry, QuantizationParams, window_B_scalar, window_dB, window_dB_scalar

# below this inverse mass the particle is considered stuck in the exterior
INVERSE_MASS_FLOOR = 1e-280


@dataclass(frozen=True)
class MechanicalSystem:
    inverse_mass: Callable[[float], float]
    potential: Callable[[float], float]
    inverse_mass_derivative: Callable[[float], float]
    potential_derivative: Callable[[float], float]
    label: str = ""

    def energy(self, q, p):
        return 0.5 * p * p * self.inverse_mass(q) + self.potential(q)

    def mass(self, q) -> float:
        inv = self.inverse_mass(q)
        return 1.0 / inv if inv > 0 else math.inf

    def mass_derivative(self, q) -> float:
        """m'(q) = -(1/m)'(q) / (1/m)(q)^2."""
        inv = self.inverse_mass(q)
        return -self.inverse_mass_derivative(q) / inv**2 if inv > 0 else math.nan


def constant_mass(mass: float = 1.0, potential=None, potential_derivative=None) -> MechanicalSystem:
    V = potential or (lambda q: 0.0)
    dV = potential_derivative or (lambda q: 0.0)
    return MechanicalSystem(lambda q: 1.0 / mass, V, lambda q: 0.0, dV, "constant-mass")


def harmonic(mass: float = 1.0, k: float = 1.0) -> MechanicalSystem:
    return constant_mass(mass, lambda q: 0.5 * k * q * q, lambda q: k * q)


def semiclassical_system(geom: Geometry, params: QuantizationParams) -> MechanicalSystem:
    """Portrait Hamiltonian B(q) (p^2/2m + hbar^2/(2 m ell^2)), B of width sqrt(2) ell.

    As a PDM system: 1/M = B/m and V = hbar^2 B / (2 m ell^2).
    """
    ell2 = math.sqrt(2) * params.ell
    m = params.mass
    a, b = geom.a, geom.b
    c = params.hbar**2 / (2 * m * params.ell**2)
    return MechanicalSystem(
        inverse_mass=lambda q: window_B_scalar(q, a, b, ell2) / m,
        potential=lambda q: c * window_B_scalar(q, a, b, ell2),
        inverse_mass_derivative=lambda q: window_dB_scalar(q, a, b, ell2) / m,
        potential_derivative=lambda q: c * window_dB_scalar(q, a, b, ell2),
        label=f"semiclassical(ell={params.ell:g}, hbar={params.hbar:g})",
    )


def semiclassical_force(q, p, geom: Geometry, params: QuantizationParams):
    """Closed form F = B'(q) (p^2/2m - hbar^2/(2 m ell^2)), B of width sqrt(2) ell."""
    ell2 = math.sqrt(2) * params.ell
    m = params.mass
    return (window_dB(1, q, geom, ell2) * (np.asarray(p) ** 2 / (2 * m)
                                            - params.hbar**2 / (2 * m * params.ell**2)))[()]


def canonical_rhs(sys: MechanicalSystem, s: PhaseState) -> tuple[float, float]:
    q, p = s.q, s.p
    return p * sys.inverse_mass(q), -sys.potential_derivative(q) - 0.5 * p * p * sys.inverse_mass_derivative(q)


def force(sys: MechanicalSystem, s: PhaseState) -> float:
    """F = m(q) q'' = -V'(q) - p^2 m'(q) / (2 m(q)^2)."""
    return -sys.potential_derivative(s.q) + 0.5 * s.p * s.p * sys.inverse_mass_derivative(s.q)


def lagrangian_accel(sys: MechanicalSystem, q: float, qdot: float) -> float:
    """q'' from the Euler-Lagrange equation m q'' + V' + m' q'^2 / 2 = 0."""
    inv = sys.inverse_mass(q)
    if not inv > INVERSE_MASS_FLOOR:
        raise DivergenceError(f"mass diverges at q = {q!r}", last_state=(q, qdot))
    # m'/m = -(1/m)' / (1/m)
    return -sys.potential_derivative(q) * inv + 0.5 * qdot * qdot * sys.inverse_mass_derivative(q) / inv


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    energies: np.ndarray
    dt: float
    forces: np.ndarray | None = field(default=None, repr=False)
    truncated: bool = False

    @property
    def states(self) -> list[PhaseState]:
        return [PhaseState(float(q), float(p)) for q, p in zip(self.q, self.p)]

    @property
    def drift(self) -> float:
        """max_t |E(t) - E(0)| / max(|E(0)|, 1e-300)."""
        e0 = self.energies[0]
        return float(np.max(np.abs(self.energies - e0)) / max(abs(e0), 1e-300))

    def to_csv(self, path, metadata: dict | None = None, energy_unit: float = 1.0, force_unit: float = 1.0) -> None:
        """Columns t, q, p, E, F; E and F are divided by the given units."""
        F = self.forces if self.forces is not None else np.full_like(self.q, np.nan)
        with open(path, "w", newline="") as fh:
            for k, v in (metadata or {}).items():
                fh.write(f"# {k} = {v}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t [m q0^2/hbar]", "q [q0]", "p [hbar/q0]", "E [alpha]", "F [F0]"])
            for row in zip(self.times, self.q, self.p, self.energies / energy_unit, F / force_unit):
                w.writerow([format(float(v), ".17g") for v in row])


def _rk4_step(f, q, v, dt):
    # plain-float RK4 for a 2-component state; avoids array overhead per stage
    a1, b1 = f(q, v)
    a2, b2 = f(q + 0.5 * dt * a1, v + 0.5 * dt * b1)
    a3, b3 = f(q + 0.5 * dt * a2, v + 0.5 * dt * b2)
    a4, b4 = f(q + dt * a3, v + dt * b3)
    return q + dt / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4), v + dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)


def _steps(T, dt):
    if not (T > 0 and dt > 0):
        raise DomainError("need T > 0 and dt > 0")
    n = int(math.ceil(T / dt - 1e-9))
    return n, T / n


def integrate(sys: MechanicalSystem, s0: PhaseState, T: float, dt: float) -> Trajectory:
    """Classic fixed-step RK4 on the canonical equations, energy recorded every step.

    The step is shrunk slightly so that an integer number of steps lands on T.
    If the state reaches a region where 1/m underflows the trajectory is
    returned truncated there.
    """
    n, dt = _steps(T, dt)

    inv, dV, dinv = sys.inverse_mass, sys.potential_derivative, sys.inverse_mass_derivative

    def rhs(q, p):
        return p * inv(q), -dV(q) - 0.5 * p * p * dinv(q)

    ys = np.empty((n + 1, 2))
    ys[0] = (s0.q, s0.p)
    q, p = s0.q, s0.p
    last = n
    truncated = False
    for i in range(n):
        try:
            q, p = _rk4_step(rhs, q, p, dt)
        except (ArithmeticError, ValueError):
            q = p = math.nan
        if not (math.isfinite(q) and math.isfinite(p)):
            partial = _finish(sys, ys[: i + 1], dt, truncated=True)
            raise DivergenceError(f"non-finite state after t = {i * dt:g}",
                                  last_state=PhaseState(*ys[i]), trajectory=partial)
        ys[i + 1] = q, p
        if inv(q) <= INVERSE_MASS_FLOOR:
            last, truncated = i + 1, True
            break
    return _finish(sys, ys[: last + 1], dt, truncated)


def _finish(sys, ys, dt, truncated):
    t = dt * np.arange(len(ys))
    E = np.array([sys.energy(q, p) for q, p in ys])
    F = np.array([force(sys, PhaseState(q, p)) for q, p in ys])
    return Trajectory(t, ys[:, 0].copy(), ys[:, 1].copy(), E, dt, F, truncated)


def integrate_lagrangian(sys: MechanicalSystem, q0: float, qdot0: float, T: float, dt: float):
    """RK4 on (q, q') with the Euler-Lagrange acceleration; returns (t, q, q')."""
    n, dt = _steps(T, dt)

    def rhs(q, v):
        return v, lagrangian_accel(sys, q, v)

    ys = np.empty((n + 1, 2))
    ys[0] = (q0, qdot0)
    q, v = q0, qdot0
    for i in range(n):
        q, v = _rk4_step(rhs, q, v, dt)
        ys[i + 1] = q, v
    return dt * np.arange(n + 1), ys[:, 0], ys[:, 1]


def hard_wall_reference(s0: PhaseState, geom: Geometry, T: float, mass: float = 1.0,
                        times=None, dt: float | None = None) -> Trajectory:
    """Free flight between specular walls at a and b, evaluated analytically."""
    a, b = geom.a, geom.b
    if not a < s0.q < b:
        raise DomainError(f"start {s0.q} outside ({a}, {b})")
    if s0.p == 0:
        raise DomainError("hard-wall reference needs p0 != 0")
    if times is None:
        n, dt = _steps(T, dt or T / 1000)
        times = dt * np.arange(n + 1)
    times = np.asarray(times, dtype=float)
    v = s0.p / mass
    if geom.is_bounded:
        L = b - a
        # unfold onto a circle of length 2L
        u = np.mod(s0.q - a + v * times, 2 * L)
        back = u > L
        q = a + np.where(back, 2 * L - u, u)
        p = np.where(back, -s0.p, s0.p)
    else:
        q = s0.q + v * times
        p = np.full_like(times, s0.p)
        hit = q < a
        q = np.where(hit, 2 * a - q, q)
        p = np.where(hit, -s0.p, p)
    E = np.full_like(times, 0.5 * s0.p**2 / mass)
    step = float(times[1] - times[0]) if len(times) > 1 else 0.0
    return Trajectory(times, q, p, E, step, np.zeros_like(times))


def first_wall_time(s0: PhaseState, geom: Geometry, mass: float = 1.0) -> float:
    v = s0.p / mass
    return (geom.b - s0.q) / v if v > 0 else (geom.a - s0.q) / v


@dataclass(frozen=True)
class LimitRow:
    n: int
    ell: float
    hbar: float
    interior_deviation: float
    penetration_depth: float
    max_abs_force: float
    drift: float


def default_limit_sequence(count: int = 6, ell0: float = 0.4):
    """ell_n = ell0 / 2^n, hbar_n = ell_n^2."""
    return [(ell0 / 2**n, (ell0 / 2**n) ** 2) for n in range(count)]


def classical_limit_study(s0: PhaseState, geom: Geometry, sequence=None, T: float = 8.0,
                          mass: float = 1.0, steps_per_ell: float = 40.0) -> list[LimitRow]:
    """Integrate the semi-classical flow along a sequence (ell_n, hbar_n) -> 0.

    Reports per index the max deviation from the hard-wall reference on the
    interior segment (before the particle comes within 8 sqrt(2) ell of a
    wall), the penetration depth max_t q(t) - b and the peak |force|.
    """
    if not geom.is_bounded:
        raise DomainError("classical-limit study needs a bounded interval")
    if s0.p <= 0:
        raise DomainError("study expects a right-moving start (p0 > 0)")
    sequence = list(sequence or default_limit_sequence())
    rows = []
    for n, (ell, hbar) in enumerate(sequence):
        if not abs(s0.p) > hbar / ell:
            raise DomainError(f"|p0| must exceed hbar/ell = {hbar / ell:g} at index {n}")
        params = QuantizationParams(ell, hbar, mass)
        sys = semiclassical_system(geom, params)
        dt = ell / (steps_per_ell * abs(s0.p) / mass)
        traj = integrate(sys, s0, T, dt)
        ref = hard_wall_reference(s0, geom, T, mass, times=traj.times)
        margin = 8 * math.sqrt(2) * ell
        t_in = (geom.b - margin - s0.q) * mass / s0.p
        seg = traj.times <= t_in
        dev = float(max(np.max(np.abs(traj.q[seg] - ref.q[seg])), np.max(np.abs(traj.p[seg] - ref.p[seg]))))
        rows.append(LimitRow(n, ell, hbar, dev, float(np.max(traj.q) - geom.b),
                             float(np.max(np.abs(traj.forces))), traj.drift))
    return rows
