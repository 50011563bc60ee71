"""Amplitude amplification over the eigenvalue window and the partial eigenpair solver."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matrix_core import SparseHermitian, Spectrum
from .spectral import CES, PhaseMap, build_ces
from .statevector import QuantumState, reflect_about_zero
from .window import GoodSet, PhaseWindow, good_probability, good_set, lambda_to_phase_windows, reflect_good

MODES = ("oracle-exact", "worst-case")


@dataclass(frozen=True)
class AAPlan:
    t: int
    theta: float
    p0: float
    mode: str = "oracle-exact"

    @property
    def final_probability(self) -> float:
        return math.sin((2 * self.t + 1) * self.theta) ** 2

    @property
    def predicted_c(self) -> float:
        """|c| = sin((2t+1) theta) / sqrt(p0), the realized amplitude scale on good states."""
        return abs(math.sin((2 * self.t + 1) * self.theta)) / math.sqrt(self.p0)

    @property
    def c_squared(self) -> float:
        return self.final_probability / self.p0


def plan_iterations(p0: float, mode: str = "oracle-exact") -> AAPlan:
    """Grover round count t = round(pi / (4 theta) - 1/2) with sin^2(theta) = p0."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if not 0.0 < p0 <= 1.0 + 1e-12:
        raise ValueError(f"initial good probability must lie in (0, 1], got {p0}")
    p0 = min(p0, 1.0)
    theta = math.asin(math.sqrt(p0))
    # round(x - 1/2) == floor(x); the epsilon keeps exact cases such as p0 = 1/4 from slipping down
    t = max(0, math.floor(math.pi / (4.0 * theta) + 1e-12))
    return AAPlan(t, theta, p0, mode)


def worst_case_p0(k: int, n: int) -> float:
    """Starting good probability when every |v_uj|^2 equals 1/N."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= N, got k={k}, N={n}")
    return k / n


def reflect_state(state: QuantumState, ces: CES) -> QuantumState:
    """CES (2|0><0| - I) CES^dagger on the phase and system registers."""
    lay = state.layout
    s = ces.apply_inverse(state)
    s = reflect_about_zero(s, lay.system + lay.phase)
    return ces.apply(s)


def grover_round(state: QuantumState, windows, ces: CES) -> QuantumState:
    return reflect_state(reflect_good(state, windows), ces)


def run_aa(state: QuantumState, windows: list[PhaseWindow], plan: AAPlan, ces: CES,
           history: list | None = None) -> QuantumState:
    """Apply (R_state R_G)^t. ``history`` collects the good probability after each round (round 0 first)."""
    if history is not None:
        history.append(good_probability(state, windows))
    for _ in range(plan.t):
        state = grover_round(state, windows, ces)
        if history is not None:
            history.append(good_probability(state, windows))
    return state


@dataclass
class PESResult:
    state: QuantumState
    plan: AAPlan
    good: GoodSet
    windows: list[PhaseWindow]
    ces: CES
    initial: QuantumState

    @property
    def qubits(self) -> int:
        return self.state.layout.total

    @property
    def good_probability(self) -> float:
        return good_probability(self.state, self.windows)


def run_pes(a: SparseHermitian | None, u: int, phase_map: PhaseMap, interval: tuple[float, float],
            mode: str = "oracle-exact", spectrum: Spectrum | None = None,
            history: list | None = None) -> PESResult:
    """CES, then t Grover rounds about the eigenvalue window ``interval``."""
    ces = build_ces(a, u, phase_map, spectrum)
    good = good_set(ces.spectrum, interval)
    if good.k == 0:
        raise ValueError(f"no eigenvalue of the matrix lies in [{interval[0]}, {interval[1]})")
    windows = lambda_to_phase_windows(interval, phase_map)
    initial = ces.prepare()
    if mode == "worst-case":
        p0 = worst_case_p0(good.k, ces.spectrum.dim)
    else:
        p0 = good_probability(initial, windows)
        if p0 <= 1e-14:
            raise ValueError("basis state u has no overlap with the window eigenvectors")
    plan = plan_iterations(p0, mode)
    final = run_aa(initial, windows, plan, ces, history)
    return PESResult(final, plan, good, windows, ces, initial)


def good_bad_split(state: QuantumState, windows: list[PhaseWindow]) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude vectors projected onto the good and bad phase subspaces."""
    t = state.tensor()
    mask = np.zeros(2 ** state.layout.m, dtype=bool)
    for w in windows:
        mask[w.phi_l:w.phi_r] = True
    good = np.where(mask[None, None, :, None], t, 0).reshape(-1)
    return good, state.amplitudes - good
