import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpes.amplification import run_pes
from qpes.fixtures import interval_around, uniform_fixture
from qpes.matrix_core import eig_oracle
from qpes.spectral import build_ces, build_phase_map
from qpes.statevector import QuantumState, RegisterLayout, apply_x, register_probabilities, zero_state
from qpes.window import (
    PhaseWindow,
    comparator_gate_count,
    good_probability,
    good_set,
    lambda_to_phase_window,
    lambda_to_phase_windows,
    qc_add_const,
    qc_sub_const,
    reflect_good,
)


def basis(lay, index):
    a = np.zeros(2 ** lay.total, dtype=complex)
    a[index] = 1
    return QuantumState(a, lay)


def value_of(state, qubits):
    p = register_probabilities(state, qubits)
    assert abs(p.max() - 1) < 1e-15
    return int(np.argmax(p))


def test_window_validation():
    with pytest.raises(ValueError):
        PhaseWindow(3, 3, 3)
    with pytest.raises(ValueError):
        PhaseWindow(0, 9, 3)
    assert 5 in PhaseWindow(3, 7, 3) and 7 not in PhaseWindow(3, 7, 3)


def test_full_half_grid_window():
    pm = build_phase_map(1.0, 4)
    w = lambda_to_phase_window((-1.0, 1.0), pm)
    assert (w.phi_l, w.phi_r) == (0, 8)


def test_single_phase_window():
    pm = build_phase_map(1.0, 4)
    w = lambda_to_phase_window(interval_around(pm, 5, 5), pm)
    assert (w.phi_l, w.phi_r) == (5, 6)
    # exact grid eigenvalue at the left end is inside, at the right end outside
    w2 = lambda_to_phase_window((pm.grid_to_lambda(5), pm.grid_to_lambda(7)), pm)
    assert (w2.phi_l, w2.phi_r) == (5, 7)


def test_empty_window_rejected():
    pm = build_phase_map(1.0, 4)
    with pytest.raises(ValueError):
        lambda_to_phase_window((0.01, 0.02), pm)
    with pytest.raises(ValueError):
        lambda_to_phase_window((0.5, 0.2), pm)


@settings(max_examples=60, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.sampled_from(["exponential", "walk"]))
def test_windows_match_brute_force(x, y, kind):
    pm = build_phase_map(1.0, 5, kind)
    lo, hi = min(x, y), max(x, y)
    lams = {phi: pm.grid_to_lambda(phi) for phi in pm.grid_range()}
    # grid points within the snap tolerance of an endpoint may go either way
    near = {phi for phi, lam in lams.items() if min(abs(lam - lo), abs(lam - hi)) < 1e-8}
    expect = {phi for phi, lam in lams.items() if lo <= lam < hi} - near
    if kind == "walk":
        near |= {pm.grid_size - phi for phi in near}
        expect |= {pm.grid_size - phi for phi in expect}
    try:
        ws = lambda_to_phase_windows((lo, hi), pm)
    except ValueError:
        assert not expect
        return
    got = {phi for w in ws for phi in range(w.phi_l, w.phi_r)}
    assert got - near == expect


def test_add_example_and_zero():
    lay = RegisterLayout(1, 4)
    s = basis(lay, 13 << 1)
    assert value_of(qc_add_const(s, lay.phase, 5), lay.phase) == 2
    assert np.array_equal(qc_add_const(s, lay.phase, 0).amplitudes, s.amplitudes)
    assert np.array_equal(qc_sub_const(s, lay.phase, 0).amplitudes, s.amplitudes)
    with pytest.raises(ValueError):
        qc_add_const(s, lay.phase, 16)


@pytest.mark.parametrize("c", [1, 3, 7, 12, 15])
def test_add_sub_involution_exhaustive(c):
    lay = RegisterLayout(1, 4)
    for x in range(16):
        s = basis(lay, x << 1)
        back = qc_sub_const(qc_add_const(s, lay.phase, c), lay.phase, c)
        assert np.array_equal(back.amplitudes, s.amplitudes)
        assert value_of(qc_add_const(s, lay.phase, c), lay.phase) == (x + c) % 16


def test_subtract_sign_bit():
    lay = RegisterLayout(1, 3)
    reg = lay.phase + (lay.anc1,)
    s = qc_sub_const(basis(lay, 5 << 1), reg, 3)
    assert value_of(s, lay.phase) == 2 and value_of(s, [lay.anc1]) == 0
    s = qc_sub_const(basis(lay, 2 << 1), reg, 3)
    assert value_of(s, [lay.anc1]) == 1


def test_reflect_examples():
    lay = RegisterLayout(1, 3)
    w = PhaseWindow(3, 7, 3)
    for phi, sign in [(5, -1), (7, 1), (2, 1), (3, -1), (6, -1)]:
        out = reflect_good(basis(lay, phi << 1), w)
        assert out.amplitudes[phi << 1] == sign


def test_reflect_involution_and_trace(fx_exp):
    ces = build_ces(fx_exp.matrix, 0, fx_exp.phase_map)
    s = ces.prepare()
    ws = lambda_to_phase_windows(fx_exp.interval, fx_exp.phase_map)
    trace = []
    once = reflect_good(s, ws, trace=trace)
    assert [lbl.split()[-1] for lbl, _ in trace] == ["phi_l", "anc1", "phi_l", "phi_r", "cz", "uncompute"]
    assert np.abs(reflect_good(once, ws).amplitudes - s.amplitudes).max() <= 1e-12
    # after "sub phi_r", ancilla 2 carries the sign of phi - phi_r
    w = ws[0]
    p = register_probabilities(trace[3][1], ces.layout.phase + (ces.layout.anc2,))
    base = register_probabilities(s, ces.layout.phase)
    below = base[:w.phi_r].sum()
    assert abs(p[2 ** ces.layout.m:].sum() - below) <= 1e-12


def test_reflect_rejects_dirty_ancilla_and_overlap():
    lay = RegisterLayout(1, 3)
    dirty = apply_x(zero_state(lay), [lay.anc2])
    with pytest.raises(ValueError):
        reflect_good(dirty, PhaseWindow(1, 3, 3))
    with pytest.raises(ValueError):
        reflect_good(zero_state(lay), [PhaseWindow(1, 4, 3), PhaseWindow(3, 5, 3)])


def test_good_probability_examples(fx_exp):
    ces = build_ces(fx_exp.matrix, 0, fx_exp.phase_map)
    s = ces.prepare()
    assert abs(good_probability(s, PhaseWindow(0, 64, 6)) - 1) <= 1e-12
    pm = fx_exp.phase_map
    phi = fx_exp.phases[3]
    w = lambda_to_phase_window(interval_around(pm, phi, phi), pm)
    oracle = eig_oracle(fx_exp.matrix)
    j = int(np.argmin(np.abs(oracle.eigenvalues - pm.grid_to_lambda(phi))))
    assert abs(good_probability(s, w) - oracle.component_weights(0)[j]) <= 1e-10


@pytest.mark.parametrize("kind", ["exponential", "walk"])
def test_uniform_k_over_n(kind):
    fx = uniform_fixture(16, kind, k=3)
    ces = build_ces(fx.matrix, 0, fx.phase_map)
    ws = lambda_to_phase_windows(fx.interval, fx.phase_map)
    assert abs(good_probability(ces.prepare(), ws) - 3 / 16) <= 1e-12
    assert good_set(fx.spectrum, fx.interval).k == 3


def test_gate_counts():
    c = comparator_gate_count(5, 2)
    assert c["cz"] == 2 and c["not"] == 4
    assert c["hadamard"] == 2 * (4 * 12 + 2 * 10)
