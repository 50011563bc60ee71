import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpes.classical import (
    ConvergenceError,
    lanczos_extremal,
    power_method_topk,
    qr_eigensolver,
    tridiagonal_qr,
    tridiagonalize,
)
from qpes.matrix_core import eig_oracle, from_dense, random_orthogonal


def fixture32(seed=0):
    lam = np.concatenate([[10.0, 8.0, 6.0], np.linspace(-3, 3, 29)])
    q = random_orthogonal(32, seed)
    return from_dense((q * lam) @ q.T)


def test_power_diag_decay_half():
    r = power_method_topk(from_dense(np.diag([2.0, 1.0])), 1, tol=1e-12)
    p = r.pairs[0]
    assert r.converged and abs(p.value - 2) < 1e-12
    assert abs(abs(p.vector[0]) - 1) < 1e-10
    ratios = p.decay_ratios()[4:-1]
    assert np.all(np.abs(ratios - 0.5) <= 0.05)


def test_power_identity_one_iteration():
    r = power_method_topk(from_dense(np.eye(5)), 1)
    assert r.pairs[0].iterations == 1 and abs(r.pairs[0].value - 1) < 1e-14


def test_power_top3_vs_oracle():
    a = fixture32()
    oracle = eig_oracle(a)
    r = power_method_topk(a, 3, tol=1e-12)
    assert r.converged
    for p, j in zip(r.pairs, range(3)):
        assert abs(p.value - oracle.eigenvalues[j]) <= 1e-10
        v = oracle.eigenvectors[:, j]
        overlap = abs(np.vdot(v, p.vector))
        assert abs(overlap - 1) <= 1e-6


def test_power_nonconvergence_flagged():
    # +1 and -1 tie in magnitude: no dominant direction
    r = power_method_topk(from_dense(np.diag([1.0, -1.0, 0.5])), 2, max_iter=50)
    assert not r.converged and not r.pairs[-1].converged
    with pytest.raises(ValueError):
        power_method_topk(from_dense(np.eye(2)), 3)


def test_lanczos_full_dimension():
    a = fixture32(1)
    r = lanczos_extremal(a, 32, seed=3)
    assert np.abs(r.ritz.eigenvalues - eig_oracle(a).eigenvalues).max() <= 1e-8
    assert r.residuals.max() <= 1e-8
    assert np.abs(r.basis.conj().T @ r.basis - np.eye(32)).max() <= 1e-10


def test_lanczos_monotone_in_l():
    a = from_dense(np.diag(np.arange(1.0, 65.0)))
    errs = [64 - lanczos_extremal(a, l, seed=2).ritz.eigenvalues[0] for l in (4, 8, 16, 32)]
    assert all(e1 > e2 for e1, e2 in zip(errs, errs[1:]))
    assert all(e >= -1e-10 for e in errs)


def test_lanczos_breakdown():
    a = from_dense(np.diag([3.0, 3.0, 1.0, 1.0]))
    r = lanczos_extremal(a, 4, seed=0)
    assert r.breakdown and r.steps == 2
    assert np.allclose(np.sort(r.ritz.eigenvalues), [1, 3])


def test_lanczos_cost_accounting():
    a = fixture32()
    r = lanczos_extremal(a, 10)
    assert r.model_cost == 32 * a.sparsity * 10
    assert r.measured_cost > 0


def test_qr_diag_sorted():
    s = qr_eigensolver(np.diag([2.0, -1.0, 5.0, 0.0]))
    assert np.array_equal(s.eigenvalues, [5.0, 2.0, 0.0, -1.0])


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10))
def test_qr_two_by_two_closed_form(a, b, c):
    s = qr_eigensolver(np.array([[a, b], [b, c]]))
    mid, rad = 0.5 * (a + c), math.hypot(0.5 * (a - c), b)
    assert abs(s.eigenvalues[0] - (mid + rad)) <= 1e-14 * max(1, abs(mid) + rad) * 8
    assert abs(s.eigenvalues[1] - (mid - rad)) <= 1e-14 * max(1, abs(mid) + rad) * 8


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("complex_", [False, True])
def test_qr_vs_oracle(seed, complex_):
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((24, 24)) + (1j * rng.standard_normal((24, 24)) if complex_ else 0)
    h = 0.5 * (d + d.conj().T)
    s = qr_eigensolver(h, vectors=True)
    assert np.abs(s.eigenvalues - eig_oracle(h).eigenvalues).max() <= 1e-9
    v = s.eigenvectors
    assert np.abs(h @ v - v * s.eigenvalues).max() <= 1e-9


def test_tridiagonalize_reconstructs():
    rng = np.random.default_rng(5)
    d = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    h = d + d.conj().T
    diag, sub, q = tridiagonalize(h)
    t = np.diag(diag) + np.diag(sub, 1) + np.diag(sub, -1)
    assert np.abs(q @ t @ q.conj().T - h).max() <= 1e-12


def test_qr_sweep_cap():
    with pytest.raises(ConvergenceError):
        tridiagonal_qr(np.array([1.0, 2.0, 3.0]), np.array([1.0, 1.0]), max_sweeps=0)


@pytest.mark.parametrize("scale", [1e-170, 1e170])
def test_qr_extreme_scales(scale):
    h = scale * np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 1.0], [0.0, 1.0, 1.0]])
    s = qr_eigensolver(h)
    expect = scale * (1 + np.array([math.sqrt(2), 0.0, -math.sqrt(2)]))
    assert np.allclose(s.eigenvalues, expect, rtol=1e-13, atol=0)
