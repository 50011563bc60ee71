"""Self-check suites exposed by ``qpes verify``.

Each suite returns a list of :class:`Check` records; the CLI prints one
pass/fail line per record.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amplification import plan_iterations, run_aa, run_pes
from .classical import lanczos_extremal, power_method_topk, qr_eigensolver
from .estimator import budget_pes, estimate_eigenpairs, true_weights
from .fixtures import standard_fixture
from .matrix_core import eig_oracle, from_dense, random_orthogonal
from .spectral import build_ces
from .statevector import RegisterLayout, QuantumState, register_probabilities, sample
from .window import PhaseWindow, reflect_good


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  {self.detail}".rstrip()


def comparator_suite(m: int = 5) -> list[Check]:
    """Every phase value against every half-open window, one basis state at a time."""
    lay = RegisterLayout(1, m)
    size = 2 ** m
    worst_sign, worst_anc, worst_off = 0.0, 0.0, 0.0
    windows = 0
    for lo in range(size):
        for hi in range(lo + 1, size + 1):
            w = PhaseWindow(lo, hi, m)
            windows += 1
            for phi in range(size):
                amps = np.zeros(2 ** lay.total, dtype=complex)
                idx = phi << lay.n_system
                amps[idx] = 1.0
                out = reflect_good(QuantumState(amps, lay), w).amplitudes
                expect = -1.0 if lo <= phi < hi else 1.0
                worst_sign = max(worst_sign, abs(out[idx] - expect))
                worst_off = max(worst_off, float(np.abs(np.delete(out, idx)).max()))
                anc = register_probabilities(QuantumState(out, lay), (lay.anc1, lay.anc2))
                worst_anc = max(worst_anc, float(anc[1:].sum()))
    return [
        Check(f"comparator sign pattern (m={m}, {windows} windows)", worst_sign <= 1e-12, f"max dev {worst_sign:.1e}"),
        Check("comparator ancillas restored to |00>", worst_anc <= 1e-12, f"max mass {worst_anc:.1e}"),
        Check("comparator diagonal in computational basis", worst_off <= 1e-12, f"max off {worst_off:.1e}"),
    ]


def qpe_suite(m: int = 6) -> list[Check]:
    out = []
    for kind in ("exponential", "walk"):
        fx = standard_fixture(kind, m=m)
        ces = build_ces(fx.matrix, fx.u, fx.phase_map)
        p = register_probabilities(ces.prepare(), ces.layout.phase)
        oracle = eig_oracle(fx.matrix)
        w = oracle.component_weights(fx.u)
        grid = np.rint(fx.phase_map.lambda_to_grid(oracle.eigenvalues)).astype(int)
        expect = np.zeros(fx.phase_map.grid_size)
        for g, wj in zip(grid, w):
            if kind == "exponential":
                expect[g] += wj
            else:
                expect[g] += wj / 2
                expect[(-g) % fx.phase_map.grid_size] += wj / 2
        err = float(np.abs(p - expect).max())
        out.append(Check(f"CES phase marginal vs oracle ({kind}, m={m})", err <= 1e-10, f"max dev {err:.1e}"))
    return out


def aa_suite(m: int = 6) -> list[Check]:
    plan = plan_iterations(0.25)
    out = [Check("Grover p0=1/4 plans t=1 with final probability 1",
                 plan.t == 1 and abs(plan.final_probability - 1) <= 1e-10, f"t={plan.t}")]
    for kind in ("exponential", "walk"):
        fx = standard_fixture(kind, m=m)
        hist = []
        res = run_pes(fx.matrix, fx.u, fx.phase_map, fx.interval, history=hist)
        ideal = [math.sin((2 * r + 1) * res.plan.theta) ** 2 for r in range(res.plan.t + 1)]
        err = max(abs(a - b) for a, b in zip(hist, ideal))
        out.append(Check(f"per-round good probability sin^2((2r+1) theta) ({kind})", err <= 1e-10,
                         f"t={res.plan.t}, max dev {err:.1e}"))
    return out


def estimator_suite(m: int = 6, trials: int = 200, gamma: float = 0.1, zeta: float = 0.05) -> list[Check]:
    out = []
    for kind in ("exponential", "walk"):
        fx = standard_fixture(kind, m=m)
        res = run_pes(fx.matrix, fx.u, fx.phase_map, fx.interval)
        truth = true_weights(fx.spectrum, fx.u, fx.phase_map, res.good.indices)
        shots = budget_pes(res.good.k, gamma, zeta).shots
        fails, grid_ok = 0, True
        exact_lam = {phi: fx.phase_map.grid_to_lambda(phi) for phi in truth}
        for seed in range(trials):
            counts = sample(res.state, res.state.layout.phase, shots, seed)
            est = estimate_eigenpairs(counts, res.plan, fx.phase_map, res.windows, zeta)
            got = {e.phi: e for e in est if not e.is_leakage}
            if any(phi not in got or abs(got[phi].amp_sq_hat - w) > gamma * w for phi, w in truth.items()):
                fails += 1
            grid_ok &= all(e.lambda_hat == exact_lam.get(e.phi) for e in got.values())
        rate = fails / trials
        out.append(Check(f"PES estimates within gamma ({kind}, {shots} shots, {trials} trials)",
                         rate <= zeta + 0.03, f"failure rate {rate:.3f}"))
        out.append(Check(f"lambda_hat exactly on the oracle grid ({kind})", grid_ok))
    return out


def baselines_suite(seed: int = 0) -> list[Check]:
    n = 32
    lam = np.concatenate([[10.0, 8.0, 6.0], np.linspace(-3, 3, n - 3)])
    q = random_orthogonal(n, seed)
    a = from_dense((q * lam) @ q.T)
    oracle = eig_oracle(a)
    top = np.sort(oracle.eigenvalues)[::-1][:3]
    pw = power_method_topk(a, 3, tol=1e-12, seed=seed)
    perr = max(abs(p.value - t) for p, t in zip(pw.pairs, top))
    ratios = pw.pairs[0].decay_ratios()[5:-2]
    rat = float(np.median(ratios))
    lz = lanczos_extremal(a, n, seed=seed)
    lerr = float(np.abs(lz.ritz.eigenvalues - oracle.eigenvalues).max())
    qr = qr_eigensolver(a)
    qerr = float(np.abs(qr.eigenvalues - oracle.eigenvalues).max())
    return [
        Check("power method top-3 vs oracle", pw.converged and perr <= 1e-9, f"max dev {perr:.1e}"),
        Check("power method decay ratio vs lambda2/lambda1", abs(rat / 0.8 - 1) <= 0.1, f"median ratio {rat:.3f}"),
        Check("Lanczos l=N Ritz values vs oracle", lerr <= 1e-8, f"max dev {lerr:.1e}"),
        Check("QR eigensolver vs oracle", qerr <= 1e-9, f"max dev {qerr:.1e}"),
    ]


SUITES = {
    "comparator": comparator_suite,
    "qpe": qpe_suite,
    "aa": aa_suite,
    "estimator": estimator_suite,
    "baselines": lambda m=None: baselines_suite(),
}
