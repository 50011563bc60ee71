import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from qpes.matrix_core import eig_oracle
from qpes.statevector import (
    QuantumState,
    RegisterLayout,
    apply_unitary,
    apply_x,
    dump_state,
    load_state,
    prepare_basis_u,
    reflect_about_zero,
    register_distribution,
    register_probabilities,
    sample,
    zero_state,
)


def random_state(layout, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(2 ** layout.total) + 1j * rng.standard_normal(2 ** layout.total)
    return QuantumState(v / np.linalg.norm(v), layout)


def test_layout_counts():
    lay = RegisterLayout(3, 4)
    assert lay.total == 9 and lay.phase == (3, 4, 5, 6) and (lay.anc1, lay.anc2) == (7, 8)
    walk = RegisterLayout(3, 4, flag=True)
    assert walk.total == 10 and walk.system == (0, 1, 2, 3)
    assert RegisterLayout.for_dimension(9, 2).n == 4


def test_prepare_u_zero_and_five():
    lay = RegisterLayout(3, 2)
    assert prepare_basis_u(lay, 0).amplitudes[0] == 1
    s = prepare_basis_u(lay, 5)
    assert np.flatnonzero(s.amplitudes).tolist() == [0b101]
    with pytest.raises(ValueError):
        prepare_basis_u(lay, 8)


def test_prepare_u_expands_in_eigenbasis():
    rng = np.random.default_rng(0)
    d = rng.standard_normal((8, 8))
    spec = eig_oracle(d + d.T)
    lay = RegisterLayout(3, 1)
    u = 6
    sys_part = prepare_basis_u(lay, u).tensor()[0, 0, 0]
    coeff = spec.eigenvectors.conj().T @ sys_part
    assert np.allclose(coeff, spec.eigenvectors[u].conj(), atol=1e-14)
    recon = spec.eigenvectors @ coeff
    assert abs(np.vdot(sys_part, recon) - 1) < 1e-12


def test_identity_and_x_twice():
    lay = RegisterLayout(2, 2)
    s = random_state(lay, 1)
    assert np.allclose(apply_unitary(s, np.eye(4), [0, 3]).amplitudes, s.amplitudes, atol=1e-15)
    x = np.array([[0, 1], [1, 0]])
    twice = apply_unitary(apply_unitary(s, x, [2]), x, [2])
    assert np.array_equal(twice.amplitudes, s.amplitudes)
    assert np.array_equal(apply_x(apply_x(s, [1]), [1]).amplitudes, s.amplitudes)


def test_unitary_then_adjoint():
    lay = RegisterLayout(2, 2)
    s = random_state(lay, 2)
    u = unitary_group.rvs(4, random_state=3)
    out = apply_unitary(apply_unitary(s, u, [1, 4]), u.conj().T, [1, 4])
    assert np.abs(out.amplitudes - s.amplitudes).max() <= 1e-12
    assert abs(apply_unitary(s, u, [1, 4]).norm() - 1) <= 1e-12


def test_unitary_matches_kron():
    lay = RegisterLayout(1, 1)  # 4 qubits
    s = random_state(lay, 4)
    u = unitary_group.rvs(2, random_state=5)
    full = np.kron(np.eye(4), np.kron(u, np.eye(2)))  # qubit 1
    assert np.allclose(apply_unitary(s, u, [1]).amplitudes, full @ s.amplitudes, atol=1e-14)


def test_controlled_unitary():
    lay = RegisterLayout(1, 1)
    s = zero_state(lay)
    x = np.array([[0, 1], [1, 0]])
    assert np.array_equal(apply_unitary(s, x, [0], controls=[1]).amplitudes, s.amplitudes)
    s1 = apply_x(s, [1])
    assert np.flatnonzero(apply_unitary(s1, x, [0], controls=[1]).amplitudes).tolist() == [0b11]


def test_unitary_errors():
    s = zero_state(RegisterLayout(1, 1))
    with pytest.raises(ValueError):
        apply_unitary(s, np.eye(2), [0, 1])
    with pytest.raises(ValueError):
        apply_unitary(s, np.array([[1, 1], [0, 1]]), [0])


def test_reflect_about_zero():
    lay = RegisterLayout(1, 1)
    z = zero_state(lay)
    assert np.array_equal(reflect_about_zero(z, [0]).amplitudes, z.amplitudes)
    one = apply_x(z, [0])
    assert np.array_equal(reflect_about_zero(one, [0]).amplitudes, -one.amplitudes)
    s = random_state(lay, 6)
    assert np.abs(reflect_about_zero(reflect_about_zero(s, [0, 2]), [0, 2]).amplitudes - s.amplitudes).max() <= 1e-12


def test_distribution_examples():
    lay = RegisterLayout(1, 1)
    assert register_distribution(zero_state(lay), [0]) == {0: 1.0}
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    s = apply_unitary(zero_state(lay), h, [0])
    d = register_distribution(s, [0])
    assert abs(d[0] - 0.5) < 1e-15 and abs(d[1] - 0.5) < 1e-15


def test_marginals_consistent():
    lay = RegisterLayout(2, 2)
    s = random_state(lay, 7)
    joint = register_probabilities(s, [0, 1, 2])
    assert abs(joint.sum() - 1) <= 1e-12
    assert np.allclose(joint.reshape(2, 4).sum(axis=0), register_probabilities(s, [0, 1]), atol=1e-15)


def test_sampling():
    lay = RegisterLayout(1, 1)
    z = zero_state(lay)
    assert sample(z, [0, 1], 37, seed=0) == {0: 37}
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    s = apply_unitary(z, h, [0])
    assert sample(s, [0], 100, 9) == sample(s, [0], 100, 9)
    c = sample(s, [0], 10 ** 5, 3)
    sigma = math.sqrt(10 ** 5 * 0.25)
    assert all(abs(c[b] - 5e4) <= 5 * sigma for b in (0, 1))
    with pytest.raises(ValueError):
        sample(s, [0], 0, 1)


def test_dump_roundtrip(tmp_path):
    lay = RegisterLayout(2, 3, flag=True)
    s = random_state(lay, 8)
    dump_state(s, tmp_path / "s.bin")
    back = load_state(tmp_path / "s.bin")
    assert back.layout == lay and np.array_equal(back.amplitudes, s.amplitudes)
