import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzybox.dynamics import (DivergenceError, canonical_rhs, classical_limit_study, constant_mass,
                               default_limit_sequence, first_wall_time, force, hard_wall_reference, harmonic,
                               integrate, integrate_lagrangian, lagrangian_accel, semiclassical_force,
                               semiclassical_system)
from fuzzybox.errors import DomainError
from fuzzybox.quantizer import PhaseState
from fuzzybox.windowfn import Geometry, QuantizationParams, window_dB

BOX = Geometry.bounded(0.0, 10.0)
FIG7 = QuantizationParams(ell=0.1)


def test_free_particle_rhs():
    sys = constant_mass(2.0)
    assert canonical_rhs(sys, PhaseState(1.0, 3.0)) == (1.5, 0.0)
    assert lagrangian_accel(sys, 1.0, 3.0) == 0.0


def test_semiclassical_interior_rhs():
    sys = semiclassical_system(BOX, FIG7)
    dq, dp = canonical_rhs(sys, PhaseState(5.0, 7.0))
    assert abs(dq - 7.0) <= 1e-10
    assert abs(dp) <= 1e-10
    assert abs(force(sys, PhaseState(5.0, 7.0))) <= 1e-12


def test_critical_momentum_force_vanishes():
    sys = semiclassical_system(BOX, FIG7)
    pc = FIG7.critical_momentum
    for q in np.linspace(-1, 11, 1000):
        for p in (pc, -pc):
            assert abs(force(sys, PhaseState(q, p))) <= 1e-12
            assert abs(semiclassical_force(q, p, BOX, FIG7)) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(q=st.floats(-1, 11), p=st.floats(-40, 40))
def test_force_matches_closed_form_and_sign(q, p):
    sys = semiclassical_system(BOX, FIG7)
    F = force(sys, PhaseState(q, p))
    closed = semiclassical_force(q, p, BOX, FIG7)
    assert abs(F - closed) <= 1e-10 * max(1.0, abs(closed))
    dB = window_dB(1, q, BOX, math.sqrt(2) * FIG7.ell)
    k = p * p / 2 - FIG7.hbar**2 / (2 * FIG7.ell**2)
    if abs(dB) > 1e-200 and abs(k) > 1e-9 and abs(closed) > 1e-300:
        assert np.sign(F) == np.sign(dB) * np.sign(k)


@settings(max_examples=50, deadline=None)
@given(q=st.floats(-1, 11), p=st.floats(-40, 40))
def test_force_minus_pdot_identity(q, p):
    sys = semiclassical_system(BOX, FIG7)
    s = PhaseState(q, p)
    inv = sys.inverse_mass(q)
    if inv < 1e-100:
        return
    _, pdot = canonical_rhs(sys, s)
    rhs = -p * p * sys.mass_derivative(q) / sys.mass(q) ** 2
    assert abs(force(sys, s) - pdot - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_derivative_fields_consistent():
    h = 1e-5
    sys = semiclassical_system(BOX, QuantizationParams(ell=0.3))
    for q in np.linspace(-0.8, 10.8, 60):
        fd_inv = (sys.inverse_mass(q + h) - sys.inverse_mass(q - h)) / (2 * h)
        fd_V = (sys.potential(q + h) - sys.potential(q - h)) / (2 * h)
        assert abs(fd_inv - sys.inverse_mass_derivative(q)) <= 1e-6
        assert abs(fd_V - sys.potential_derivative(q)) <= 1e-6 * max(1.0, abs(fd_V))


def test_harmonic_oscillator_matches_closed_form():
    sys = harmonic(mass=2.0, k=8.0)
    w = 2.0
    t, q, v = integrate_lagrangian(sys, 1.0, 0.5, 10.0, 1e-3)
    assert np.max(np.abs(q - (np.cos(w * t) + 0.5 / w * np.sin(w * t)))) <= 1e-6
    assert lagrangian_accel(sys, 0.3, 1.0) == pytest.approx(-4 * 0.3)


def test_lagrangian_and_hamiltonian_agree():
    params = QuantizationParams(ell=0.5)
    sys = semiclassical_system(BOX, params)
    q0, p0 = 8.0, 3.0
    traj = integrate(sys, PhaseState(q0, p0), 2.0, 1e-3)
    t, q, v = integrate_lagrangian(sys, q0, p0 * sys.inverse_mass(q0), 2.0, 1e-3)
    assert traj.q.max() > BOX.b  # the run crosses the wall slope
    assert np.max(np.abs(traj.q - q)) <= 1e-6
    p_from_v = np.array([vv * sys.mass(qq) for qq, vv in zip(q, v)])
    assert np.max(np.abs(traj.p - p_from_v)) <= 1e-6


def test_lagrangian_flags_divergent_mass():
    sys = semiclassical_system(BOX, FIG7)
    with pytest.raises(DivergenceError):
        lagrangian_accel(sys, 60.0, 1.0)


def test_free_motion_exact():
    sys = semiclassical_system(BOX, FIG7)
    traj = integrate(sys, PhaseState(2.0, 1.5), 4.0, 0.01)
    assert np.max(np.abs(traj.q - (2.0 + 1.5 * traj.times))) <= 1e-10
    assert np.all(np.diff(traj.times) > 0)


@pytest.mark.slow
def test_energy_drift_fourth_order():
    sys = semiclassical_system(BOX, FIG7)
    T = 10 * FIG7.mass * FIG7.q0**2 / FIG7.hbar
    d1 = integrate(sys, PhaseState(5.0, 20.0), T, 2.5e-4).drift
    d2 = integrate(sys, PhaseState(5.0, 20.0), T, 1.25e-4).drift
    assert d1 < 1e-8
    assert 12 <= d1 / d2 <= 20


def test_momentum_monotone_on_right_slope():
    sys = semiclassical_system(BOX, FIG7)
    traj = integrate(sys, PhaseState(9.0, 20.0), 1.0, 2.5e-4)
    dB = window_dB(1, traj.q, BOX, math.sqrt(2) * FIG7.ell)
    on_slope = (dB < -1e-12) & (traj.p > 0)
    assert on_slope.sum() > 100
    pdot = np.array([canonical_rhs(sys, PhaseState(q, p))[1] for q, p in zip(traj.q, traj.p)])
    assert np.all(pdot[on_slope] > 0)
    # the force opposes the motion there: deceleration toward the wall
    assert np.all(traj.forces[on_slope] < 0)


def test_trajectory_truncated_deep_outside():
    sys = semiclassical_system(BOX, QuantizationParams(ell=0.5, hbar=0.01))
    traj = integrate(sys, PhaseState(9.0, 5.0), 500.0, 0.01)
    assert traj.truncated or traj.q[-1] < 20.0


def test_integrate_rejects_bad_steps():
    with pytest.raises(DomainError):
        integrate(constant_mass(), PhaseState(0, 1), 1.0, 0.0)


def test_divergence_error_carries_last_state():
    def bad_dV(q):
        return math.exp(q * q)

    sys = constant_mass(1.0, potential=lambda q: 0.0, potential_derivative=bad_dV)
    with pytest.raises(DivergenceError) as info:
        integrate(sys, PhaseState(10.0, 0.0), 1.0, 0.1)
    assert info.value.last_state is not None


# ---------------------------------------------------------------------------
# hard-wall reference


def test_hard_wall_first_contact_and_period():
    s0 = PhaseState(5.0, 2.0)
    assert first_wall_time(s0, BOX, mass=1.5) == pytest.approx(5 * 1.5 / 2.0)
    period = 2 * (BOX.b - BOX.a) * 1.5 / 2.0
    times = np.array([0.0, 0.5 * period, period, 2 * period])
    ref = hard_wall_reference(s0, BOX, 2 * period, mass=1.5, times=times)
    assert np.allclose(ref.q, [5.0, 5.0, 5.0, 5.0], atol=1e-12)
    assert list(ref.p) == [2.0, -2.0, 2.0, 2.0]
    assert np.all(ref.energies == ref.energies[0])
    tw = first_wall_time(s0, BOX, 1.5)
    assert hard_wall_reference(s0, BOX, 10, 1.5, times=[tw]).q[0] == pytest.approx(10.0)


def test_hard_wall_validation():
    with pytest.raises(DomainError):
        hard_wall_reference(PhaseState(11.0, 1.0), BOX, 1.0)
    with pytest.raises(DomainError):
        hard_wall_reference(PhaseState(5.0, 0.0), BOX, 1.0)


# ---------------------------------------------------------------------------
# classical limit


@pytest.fixture(scope="module")
def limit_rows():
    return classical_limit_study(PhaseState(5.0, 1.0), BOX)


def test_limit_sequence_default():
    seq = default_limit_sequence()
    assert len(seq) == 6
    assert seq[0] == (0.4, 0.4**2)
    assert all(h / e < e0 for (e, h), (e0, _) in zip(seq[1:], seq))


@pytest.mark.slow
def test_limit_interior_and_penetration(limit_rows):
    assert all(r.interior_deviation < 1e-6 for r in limit_rows)
    depths = [r.penetration_depth for r in limit_rows]
    assert all(d > 0 for d in depths)
    ratios = [a / b for a, b in zip(depths, depths[1:])]
    assert min(ratios) >= 1.5


@pytest.mark.slow
def test_limit_force_sharpens(limit_rows):
    peaks = [r.max_abs_force for r in limit_rows]
    assert all(b > a for a, b in zip(peaks, peaks[1:]))


def test_limit_study_requires_supercritical_momentum():
    with pytest.raises(DomainError):
        classical_limit_study(PhaseState(5.0, 0.1), BOX, [(0.4, 0.16)])
