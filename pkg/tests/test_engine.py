import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ghzsim import engine, opkit, seqlang, spinsys
from ghzsim.engine import EngineState
from ghzsim.seqlang import CouplingDelay, FixedDelay, Gradient, Pulse
from conftest import random_hermitian

ONE = spinsys.SpinSystem((0.0,))
TWO = spinsys.SpinSystem((0.0, 0.0), {(1, 2): 53.4})


def sx(j, n):
    return opkit.pauli("x", j, n)


def sy(j, n):
    return opkit.pauli("y", j, n)


def sz(j, n):
    return opkit.pauli("z", j, n)


def close(a, b, tol=1e-12):
    return np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol


# -- pulses -----------------------------------------------------------------

@pytest.mark.parametrize("pulse,before,after", [
    (Pulse(90, 90, (1,)), "z", "x"),
    (Pulse(90, -90, (1,)), "x", "z"),
    (Pulse(180, 0, (1,)), "z", "-z"),
])
def test_pulse_right_handed_examples(pulse, before, after):
    rho = opkit.pauli(before, 1, 1)
    sign = -1 if after.startswith("-") else 1
    out = engine.apply_pulse(EngineState(rho, ONE), pulse, sense=+1).rho
    assert close(out, sign * opkit.pauli(after[-1], 1, 1))


@pytest.mark.parametrize("pulse,before,after", [
    (Pulse(90, 90, (1,)), "z", "-x"),
    (Pulse(90, -90, (1,)), "x", "-z"),
    (Pulse(180, 0, (1,)), "z", "-z"),
    (Pulse(90, 0, (1,)), "z", "y"),
])
def test_pulse_frozen_sense_is_left_handed(pulse, before, after):
    assert engine.ROTATION_SENSE == -1
    rho = opkit.pauli(before, 1, 1)
    sign = -1 if after.startswith("-") else 1
    out = engine.apply_pulse(EngineState(rho, ONE), pulse).rho
    assert close(out, sign * opkit.pauli(after[-1], 1, 1))


def test_pulse_is_selective_and_timed():
    state = engine.apply_pulse(EngineState(sz(1, 2) + sz(2, 2), TWO), Pulse(90, 0, (2,), 1.5))
    assert close(state.rho, sz(1, 2) + sy(2, 2))
    assert state.elapsed == pytest.approx(1.5e-3)


# -- delays -----------------------------------------------------------------

def product_operator_x(theta, n=2):
    """sx^1 evolved under J12 coupling: sx^1 cos(pi J t) + sy^1 sz^2 sin(pi J t)."""
    return sx(1, n) * math.cos(theta) + sy(1, n) @ sz(2, n) * math.sin(theta)


@pytest.mark.parametrize("frac", [0.5, 0.25, 0.1, 1.0])
def test_coupling_delay_matches_product_operators(frac):
    state = engine.apply_delay(EngineState(sx(1, 2), TWO), CouplingDelay((1, 2), frac))
    assert close(state.rho, product_operator_x(math.pi * frac), 1e-10)
    assert state.elapsed == pytest.approx(frac / 53.4)


def test_half_j_delay_gives_antiphase():
    out = engine.apply_delay(EngineState(sx(1, 2), TWO), CouplingDelay((1, 2), 0.5)).rho
    assert close(out, sy(1, 2) @ sz(2, 2), 1e-10)


def test_quarter_j_delay():
    out = engine.apply_delay(EngineState(sx(1, 2), TWO), CouplingDelay((1, 2), 0.25)).rho
    assert close(out, (sx(1, 2) + sy(1, 2) @ sz(2, 2)) / math.sqrt(2), 1e-10)


def test_z_magnetization_unchanged_by_delay(alanine):
    for pair in [(1, 2), (2, 3)]:
        out = engine.apply_delay(EngineState(sz(1, 3), alanine), CouplingDelay(pair, 0.37)).rho
        assert close(out, sz(1, 3))


def test_coupling_delay_ignores_offsets():
    sys_ = spinsys.SpinSystem((100.0, -30.0), {(1, 2): 10.0})
    out = engine.apply_delay(EngineState(sx(1, 2), sys_), CouplingDelay((1, 2), 0.5)).rho
    assert close(out, sy(1, 2) @ sz(2, 2), 1e-10)


def test_fixed_delay_uses_full_hamiltonian():
    sys_ = spinsys.SpinSystem((25.0,))
    t = 0.01
    out = engine.apply_delay(EngineState(sx(1, 1), sys_), FixedDelay(t)).rho
    phi = 2 * math.pi * 25.0 * t
    assert close(out, sx(1, 1) * math.cos(phi) + sy(1, 1) * math.sin(phi), 1e-10)


def test_zero_coupling_delay_rejected(alanine):
    with pytest.raises(engine.EngineError):
        engine.apply_delay(EngineState(sz(1, 3), alanine), CouplingDelay((1, 3), 0.5))


# -- gradient crusher -------------------------------------------------------

def phase_average(rho, k):
    """Average exp(-i th Fz) rho exp(i th Fz) over th = 2 pi m / k; Fz = sum sz / 2."""
    n = opkit.n_spins(rho)
    fz = np.diag(sum(opkit.z_eigenvalues(n).T)) / 2
    acc = np.zeros_like(rho, dtype=complex)
    for m in range(k):
        th = 2 * math.pi * m / k
        u = np.diag(np.exp(-1j * th * np.diag(fz)))
        acc += u @ rho @ u.conj().T
    return acc / k


def test_crusher_kills_single_quantum():
    assert close(engine.crush(sx(1, 1)), 0)
    assert close(engine.crush(sx(1, 3) @ sz(2, 3)), 0)


def test_crusher_keeps_diagonal():
    rho = sz(1, 2) @ sz(2, 2)
    assert close(engine.crush(rho), rho, 0)


def test_crusher_keeps_zero_quantum():
    plus = (sx(1, 2) + 1j * sy(1, 2)) / 2
    minus2 = (sx(2, 2) - 1j * sy(2, 2)) / 2
    rho = plus @ minus2 + plus.conj().T @ minus2.conj().T
    assert close(engine.crush(rho), rho, 0)
    assert close(phase_average(rho, 64), rho, 1e-10)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4), k=st.integers(0, 60))
def test_crusher_equals_phase_average_and_is_idempotent(seed, n, k):
    rho = random_hermitian(np.random.default_rng(seed), 2**n)
    crushed = engine.crush(rho)
    assert close(crushed, phase_average(rho, 64), 1e-10)
    # any K >= 2n + 1 separates every nonzero coherence order
    assert close(crushed, phase_average(rho, 2 * n + 1 + k), 1e-10)
    assert np.array_equal(engine.crush(crushed), crushed)


def test_crusher_time_accounted():
    state = engine.apply_gradient(EngineState(sz(1, 1), ONE), Gradient("z"), crusher_time=1e-3)
    assert state.elapsed == 1e-3


# -- invariants over whole sequences ----------------------------------------

@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), angle=st.floats(1, 360), phase=st.floats(-360, 360),
       frac=st.floats(0.01, 2))
def test_unitary_steps_preserve_spectrum_hermiticity_trace(seed, angle, phase, frac, alanine):
    rho = random_hermitian(np.random.default_rng(seed), 8)
    rho = rho - np.trace(rho) / 8 * np.eye(8)
    before = np.linalg.eigvalsh(rho)
    state = EngineState(rho, alanine)
    for el in (Pulse(angle, phase, (1, 3)), CouplingDelay((2, 3), frac), FixedDelay(frac * 1e-2),
               Pulse(angle, -phase, (2,))):
        state = engine.step(state, el)
        assert np.max(np.abs(np.linalg.eigvalsh(state.rho) - before)) <= 1e-9
        state.check(1e-10)
    crushed = engine.step(state, Gradient("x"))
    crushed.check(1e-10)


def test_prepare_pp_from_equilibrium(alanine):
    state = engine.run(spinsys.equilibrium_deviation(3), alanine, seqlang.prepare_pp())
    rho, scale, dev = engine.normalize_pseudo_pure(state.rho)
    assert scale > 0
    assert scale == pytest.approx(2.0, abs=1e-12)
    assert dev <= 1e-8


@pytest.mark.parametrize("sense", [1, -1])
def test_prepare_pp_reaches_pattern_in_both_senses(sense, alanine):
    state = engine.run(spinsys.equilibrium_deviation(3), alanine, seqlang.prepare_pp(), sense=sense)
    engine.normalize_pseudo_pure(state.rho)


@pytest.mark.parametrize("sense,corner", [(-1, -1.0), (1, 1.0)])
def test_rotation_sense_search(sense, corner, alanine):
    # only the left-handed sense reproduces corners of -1
    rho = engine.run(engine.rho_pp_exact(), alanine, seqlang.rotate_ghz(), sense=sense).rho
    expected = np.zeros((8, 8))
    expected[0, 7] = expected[7, 0] = corner
    assert close(rho, expected, 1e-10)


def test_rotate_ghz_matches_reference(alanine):
    rho = engine.run(engine.rho_pp_exact(), alanine, seqlang.rotate_ghz()).rho
    assert close(rho, engine.rho_ghz_reference(), 1e-10)


def test_measure_elapsed(alanine):
    state = engine.run(sz(2, 3), alanine, seqlang.measure("x", "y", "y"))
    assert state.elapsed == pytest.approx(4.0e-3, abs=1e-15)
    state = engine.run(sz(2, 3), alanine, seqlang.measure("x", "y", "y", gap_ms=0.043))
    assert state.elapsed == pytest.approx(4.043e-3, abs=1e-15)


@pytest.mark.parametrize("j", "xy")
@pytest.mark.parametrize("l", "xy")
@pytest.mark.parametrize("sense", [1, -1])
def test_readout_maps_measured_axes_to_z(j, l, sense, alanine):
    # right-handed: sigma_j -> +sz; left-handed: sigma_j -> -sz on each spin
    seq = seqlang.measure(j, "x", l)
    for spin, axis in ((1, j), (3, l)):
        out = engine.run(opkit.pauli(axis, spin, 3), alanine, seq, sense=sense).rho
        assert close(out, sense * sz(spin, 3), 1e-10)


def test_run_rejects_dimension_mismatch(alanine):
    with pytest.raises(engine.EngineError):
        engine.run(sz(1, 2), alanine, seqlang.rotate_ghz())


def test_normalize_rejects_wrong_pattern():
    with pytest.raises(engine.EngineError):
        engine.normalize_pseudo_pure(-engine.rho_pp_exact())
    with pytest.raises(engine.EngineError):
        engine.normalize_pseudo_pure(spinsys.equilibrium_deviation(3))


def test_matrix_dump_round_trip():
    rho = engine.rho_ghz_reference() * (1 + 0.5j)
    back, scale = engine.matrix_from_dict(engine.matrix_to_dict(rho, 2.0))
    assert np.array_equal(back, rho) and scale == 2.0
