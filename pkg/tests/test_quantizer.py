import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gaussian
from fuzzybox.errors import CoverageError, DomainError, ResolutionError
from fuzzybox.grid import Grid
from fuzzybox.operators import position_symbol
from fuzzybox.quantizer import (KINDS, ObservableSpec, PhaseState, cs_overlap, cs_sample, overlap_density,
                                portrait, quantize_element)
from fuzzybox.windowfn import Geometry, QuantizationParams, window_B

ONE = QuantizationParams(ell=1.0)


@pytest.fixture(scope="module")
def wide_grid():
    return Grid.symmetric(0.0, 15.0, 0.02)


def test_cs_value_at_origin(wide_grid):
    wf = cs_sample(PhaseState(0.0, 0.0), wide_grid, ONE)
    i0 = int(np.argmin(np.abs(wide_grid.x)))
    assert wf.values[i0].real == pytest.approx(0.7511255444649425, abs=1e-15)


@pytest.mark.parametrize("q, p", [(0, 0), (1.5, -3.0), (-4, 7.0), (3.3, 12.0)])
def test_cs_normalized(wide_grid, q, p):
    assert abs(cs_sample(PhaseState(q, p), wide_grid, ONE).norm - 1) <= 1e-8


def test_cs_momentum_only_rotates_phase(wide_grid):
    a = cs_sample(PhaseState(0.0, 0.0), wide_grid, ONE)
    b = cs_sample(PhaseState(0.0, 3.0), wide_grid, ONE)
    assert np.max(np.abs(np.abs(a.values) - np.abs(b.values))) <= 1e-15


def test_cs_coverage_and_resolution():
    small = Grid.symmetric(0.0, 3.0, 0.05)
    with pytest.raises(CoverageError):
        cs_sample(PhaseState(0.0, 0.0), small, ONE)
    coarse = Grid.symmetric(0.0, 10.0, 0.5)
    with pytest.raises(ResolutionError):
        cs_sample(PhaseState(0.0, 0.0), coarse, ONE)
    with pytest.raises(ResolutionError):
        cs_sample(PhaseState(0.0, 100.0), Grid.symmetric(0.0, 10.0, 0.05), ONE)


def test_overlap_examples():
    s = PhaseState(1.2, -0.7)
    assert cs_overlap(s, s, ONE) == 1
    val = cs_overlap(PhaseState(0, 0), PhaseState(2.0, 0), ONE)
    assert val.imag == 0
    assert val.real == pytest.approx(math.exp(-1), rel=1e-15)


@settings(max_examples=25, deadline=None)
@given(q1=st.floats(-4, 4), p1=st.floats(-5, 5), q2=st.floats(-4, 4), p2=st.floats(-5, 5))
def test_overlap_matches_numerical_inner_product(q1, p1, q2, p2):
    grid = Grid.symmetric(0.0, 11.0, 0.02)
    s1, s2 = PhaseState(q1, p1), PhaseState(q2, p2)
    num = cs_sample(s1, grid, ONE).inner(cs_sample(s2, grid, ONE))
    closed = cs_overlap(s1, s2, ONE)
    assert abs(abs(closed) - abs(num)) <= 1e-6
    # the full complex value agrees too with this phase convention
    assert abs(closed - num) <= 1e-6
    assert abs(closed) <= 1 + 1e-15


def test_overlap_density_lattice():
    params = QuantizationParams(ell=0.4, hbar=0.7)
    ell, hbar = params.ell, params.hbar
    base = PhaseState(0.3, -0.2)
    for dq in np.linspace(-2, 2, 5):
        for dp in np.linspace(-3, 3, 5):
            other = PhaseState(base.q + dq, base.p + dp)
            rho = math.exp(-dq * dq / (2 * ell**2)) * math.exp(-dp * dp / (2 * hbar**2 / ell**2))
            assert abs(cs_overlap(other, base, params)) ** 2 == pytest.approx(rho, rel=1e-12, abs=1e-300)
            assert overlap_density(other, base, params) == pytest.approx(rho, rel=1e-14, abs=1e-300)


# ---------------------------------------------------------------------------
# integral quantization oracle


@pytest.fixture(scope="module")
def box_grid():
    return Grid.covering(Geometry.bounded(0.0, 10.0), 0.1, 0.005, width=1.0)


def test_unit_unrestricted_is_identity(box_grid, box, params):
    rng = np.random.default_rng(7)
    for _ in range(10):
        bra = gaussian(box_grid, rng.uniform(-1, 11), rng.uniform(0.4, 1.2), rng.uniform(-3, 3))
        ket = gaussian(box_grid, rng.uniform(-1, 11), rng.uniform(0.4, 1.2), rng.uniform(-3, 3))
        val = quantize_element(ObservableSpec("unit", restricted=False), bra, ket, box, params)
        assert abs(val - bra.inner(ket)) < 1e-8


def test_unit_restricted_on_interior_state(box_grid, box, params):
    psi = gaussian(box_grid, 5.0, 0.5)
    assert abs(quantize_element(ObservableSpec("unit"), psi, psi, box, params) - 1) < 1e-6


def test_position_restricted_on_interior_state(box_grid, box, params):
    c = 4.2
    psi = gaussian(box_grid, c, 0.6)
    val = quantize_element(ObservableSpec("position"), psi, psi, box, params)
    assert abs(val - c) < 1e-4
    x = box_grid.x
    via_symbol = box_grid.integrate(position_symbol(x, box, params) * np.abs(psi.values) ** 2)
    assert abs(val - via_symbol) < 1e-8


def test_quantize_rejects_bad_inputs(box_grid, box, params):
    psi = gaussian(box_grid, 5.0)
    with pytest.raises(DomainError):
        ObservableSpec("spin")
    from fuzzybox.grid import WaveFunction
    with pytest.raises(DomainError):
        quantize_element(ObservableSpec("unit"), WaveFunction(box_grid, 2 * psi.values), psi, box, params)


# ---------------------------------------------------------------------------
# portraits

POINTS = [(q, p) for q, p in np.random.default_rng(11).uniform([-1.0, -10.0], [11.0, 10.0], size=(20, 2))]


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("restricted", [True, False])
def test_portrait_closed_form_vs_quadrature(kind, restricted, box):
    params = QuantizationParams(ell=0.3, hbar=1.0, mass=1.0)
    f = ObservableSpec(kind, restricted)
    for q, p in POINTS:
        at = PhaseState(q, p)
        a = portrait(f, at, box, params, "closed_form")
        b = portrait(f, at, box, params, "quadrature")
        assert abs(a - b) <= 1e-5, (kind, q, p, a, b)


def test_portrait_half_line():
    hl = Geometry.half_line(0.0)
    params = QuantizationParams(ell=0.2)
    for q in (-0.5, 0.0, 0.3, 4.0):
        for kind in KINDS:
            f = ObservableSpec(kind)
            at = PhaseState(q, 2.0)
            assert abs(portrait(f, at, hl, params) - portrait(f, at, hl, params, "quadrature")) <= 1e-5


def test_window_portrait_examples(box, params):
    f = ObservableSpec("unit")
    assert abs(portrait(f, PhaseState(5.0, 3.0), box, params) - 1) <= 1e-10
    for q in (-0.1, 0.05, 9.9):
        a = portrait(f, PhaseState(q, 0.0), box, params, "quadrature")
        b = portrait(f, PhaseState(q, 17.0), box, params, "quadrature")
        assert abs(a - b) <= 1e-9
    assert portrait(f, PhaseState(0.0, 0.0), box, params) == pytest.approx(
        window_B(0.0, box, math.sqrt(2) * params.ell))


def test_kinetic_portrait_interior(box, params):
    p = 3.0
    val = portrait(ObservableSpec("kinetic"), PhaseState(5.0, p), box, params)
    assert val == pytest.approx(p * p / 2 + 1 / (2 * params.ell**2), rel=1e-14)


def test_window_portrait_classical_limit(box):
    f = ObservableSpec("unit")
    inside = [portrait(f, PhaseState(0.5, 0), box, QuantizationParams(ell=e)) for e in (0.4, 0.2, 0.1, 0.05)]
    outside = [portrait(f, PhaseState(-0.5, 0), box, QuantizationParams(ell=e)) for e in (0.4, 0.2, 0.1, 0.05)]
    assert all(b > a for a, b in zip(inside, inside[1:]))
    assert all(b < a for a, b in zip(outside, outside[1:]))


def test_portrait_rejects_method(box, params):
    with pytest.raises(DomainError):
        portrait(ObservableSpec("unit"), PhaseState(0, 0), box, params, method="monte-carlo")
