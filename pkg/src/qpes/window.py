"""Eigenvalue-window reflection built from quantum-classical adders and a sign comparator."""
from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .matrix_core import Spectrum
from .spectral import PhaseMap
from .statevector import QuantumState, apply_permutation, apply_x, register_probabilities, register_values

log = logging.getLogger(__name__)

SNAP_TOL = 1e-9


@dataclass(frozen=True)
class PhaseWindow:
    """Half-open window [phi_l, phi_r) of m-bit grid integers."""

    phi_l: int
    phi_r: int
    m: int
    lambda_l: float | None = None
    lambda_r: float | None = None

    def __post_init__(self):
        if not 0 <= self.phi_l < self.phi_r <= 2 ** self.m:
            raise ValueError(f"invalid window [{self.phi_l}, {self.phi_r}) for m={self.m}")

    def __contains__(self, phi: int) -> bool:
        return self.phi_l <= phi < self.phi_r

    @property
    def size(self) -> int:
        return self.phi_r - self.phi_l


@dataclass(frozen=True)
class GoodSet:
    indices: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.indices)


def good_set(spectrum: Spectrum, interval: tuple[float, float], tol: float = 1e-9) -> GoodSet:
    """Indices j with lambda_j in [lambda_l, lambda_r); ``tol`` absorbs oracle round-off."""
    lo, hi = interval
    lam = spectrum.eigenvalues
    scale = max(1.0, float(np.abs(lam).max(initial=0.0)))
    mask = (lam >= lo - tol * scale) & (lam < hi - tol * scale)
    return GoodSet(tuple(int(j) for j in np.flatnonzero(mask)))


def _snap(x: float) -> float:
    r = round(x)
    return float(r) if abs(x - r) < SNAP_TOL else float(x)


def lambda_to_phase_windows(interval: tuple[float, float], phase_map: PhaseMap) -> list[PhaseWindow]:
    """Grid windows covering exactly the phases whose eigenvalue lies in ``interval``.

    The exponential map gives one window. The walk map gives the primary
    window plus its mirror under phi -> 2**m - phi, which catches the
    negative-phase branch of every eigenvector.
    """
    lam_l, lam_r = float(interval[0]), float(interval[1])
    a = phase_map.alpha
    if not lam_l < lam_r:
        raise ValueError(f"need lambda_l < lambda_r, got [{lam_l}, {lam_r})")
    if lam_l < -a * (1 + 1e-12) or lam_r > a * (1 + 1e-12):
        raise ValueError(f"interval [{lam_l}, {lam_r}) leaves [-alpha, alpha] with alpha={a}")
    m, size = phase_map.m, phase_map.grid_size
    x_l = _snap(float(phase_map.lambda_to_grid(lam_l)))
    x_r = _snap(float(phase_map.lambda_to_grid(lam_r)))

    if phase_map.kind == "exponential":
        lo, hi = math.ceil(x_l), math.ceil(x_r)
        lo, hi = max(lo, 0), min(hi, size // 2 + 1)
        if lo >= hi:
            raise ValueError(f"interval [{lam_l}, {lam_r}) contains no grid phase")
        return [PhaseWindow(lo, hi, m, lam_l, lam_r)]

    # f decreasing: lambda >= lambda_l  <=>  phi <= x_l ; lambda < lambda_r  <=>  phi > x_r
    lo, hi = math.floor(x_r) + 1, math.floor(x_l) + 1
    lo, hi = max(lo, 1), min(hi, size // 2)
    if lo >= hi:
        raise ValueError(f"interval [{lam_l}, {lam_r}) contains no grid phase")
    return [PhaseWindow(lo, hi, m, lam_l, lam_r), PhaseWindow(size - hi + 1, size - lo + 1, m, lam_l, lam_r)]


def lambda_to_phase_window(interval: tuple[float, float], phase_map: PhaseMap) -> PhaseWindow:
    return lambda_to_phase_windows(interval, phase_map)[0]


@lru_cache(maxsize=128)
def _add_permutation(total: int, qubits: tuple[int, ...], constant: int) -> np.ndarray:
    w = len(qubits)
    vals = register_values(total, qubits)
    idx = np.arange(2 ** total, dtype=np.int64)
    mask = 0
    for q in qubits:
        mask |= 1 << q
    new_vals = (vals + constant) % (2 ** w)
    out = idx & ~mask
    for i, q in enumerate(qubits):
        out |= ((new_vals >> i) & 1) << q
    return out


def qc_add_const(state: QuantumState, qubits: Sequence[int], constant: int) -> QuantumState:
    """|x> -> |x + constant mod 2**w> on ``qubits`` (LSB first)."""
    qubits = tuple(qubits)
    w = len(qubits)
    if not 0 <= constant < 2 ** w:
        raise ValueError(f"constant {constant} out of range for a {w}-qubit register")
    if constant == 0:
        return state.copy()
    return apply_permutation(state, _add_permutation(state.layout.total, qubits, constant))


def qc_sub_const(state: QuantumState, qubits: Sequence[int], constant: int) -> QuantumState:
    """|x> -> |x - constant mod 2**w>, the adjoint of :func:`qc_add_const`."""
    qubits = tuple(qubits)
    w = len(qubits)
    if not 0 <= constant < 2 ** w:
        raise ValueError(f"constant {constant} out of range for a {w}-qubit register")
    if constant == 0:
        return state.copy()
    return apply_permutation(state, _add_permutation(state.layout.total, qubits, (-constant) % (2 ** w)))


def _cz(state: QuantumState, a: int, b: int) -> QuantumState:
    idx = np.arange(state.amplitudes.size)
    both = ((idx >> a) & 1) & ((idx >> b) & 1)
    return state.with_amplitudes(np.where(both == 1, -state.amplitudes, state.amplitudes))


def _digest(state: QuantumState) -> str:
    return hashlib.sha256(np.round(state.amplitudes, 12).tobytes()).hexdigest()[:12]


def reflect_good(state: QuantumState, windows: PhaseWindow | Sequence[PhaseWindow],
                 trace: list | None = None) -> QuantumState:
    """Flip the sign of every component whose phase register lies in a window.

    Per window, the comparator runs: subtract phi_l with ancilla 1 as MSB,
    NOT ancilla 1, add phi_l back on the phase register, subtract phi_r with
    ancilla 2 as MSB, CZ(ancilla 1, ancilla 2), then undo the first four
    steps. Windows must be disjoint. Intermediate states are appended to
    ``trace`` as ``(label, state)`` pairs when given.
    """
    if isinstance(windows, PhaseWindow):
        windows = [windows]
    lay = state.layout
    for i, w in enumerate(windows):
        if w.m != lay.m:
            raise ValueError("window grid does not match the phase register")
        for other in windows[i + 1:]:
            if w.phi_l < other.phi_r and other.phi_l < w.phi_r:
                raise ValueError("windows overlap")
    anc = register_probabilities(state, (lay.anc1, lay.anc2))
    if anc[1:].sum() > 1e-12:
        raise ValueError("comparator ancillas are not in |00>")

    phase = lay.phase
    reg1 = phase + (lay.anc1,)
    reg2 = phase + (lay.anc2,)

    def record(label, s):
        if trace is not None:
            trace.append((label, s))
        if log.isEnabledFor(logging.DEBUG):
            log.debug("%-28s %s", label, _digest(s))

    for w in windows:
        s1 = qc_sub_const(state, reg1, w.phi_l)
        record(f"[{w.phi_l},{w.phi_r}) sub phi_l", s1)
        s2 = apply_x(s1, [lay.anc1])
        record(f"[{w.phi_l},{w.phi_r}) not anc1", s2)
        s3 = qc_add_const(s2, phase, w.phi_l)
        record(f"[{w.phi_l},{w.phi_r}) add phi_l", s3)
        s4 = qc_sub_const(s3, reg2, w.phi_r)
        record(f"[{w.phi_l},{w.phi_r}) sub phi_r", s4)
        s5 = _cz(s4, lay.anc1, lay.anc2)
        record(f"[{w.phi_l},{w.phi_r}) cz", s5)
        s = qc_add_const(s5, reg2, w.phi_r)
        s = qc_sub_const(s, phase, w.phi_l)
        s = apply_x(s, [lay.anc1])
        state = qc_add_const(s, reg1, w.phi_l)
        record(f"[{w.phi_l},{w.phi_r}) uncompute", state)
    return state


def window_mask(windows: Sequence[PhaseWindow], m: int) -> np.ndarray:
    mask = np.zeros(2 ** m, dtype=bool)
    for w in windows:
        mask[w.phi_l:w.phi_r] = True
    return mask


def good_probability(state: QuantumState, windows: PhaseWindow | Sequence[PhaseWindow]) -> float:
    """Exact probability that the phase register reads a value inside the windows."""
    if isinstance(windows, PhaseWindow):
        windows = [windows]
    p = register_probabilities(state, state.layout.phase)
    return float(p[window_mask(windows, state.layout.m)].sum())


def adder_gate_count(width: int) -> dict[str, int]:
    """Gate counts of a Draper (QFT-basis) constant adder on ``width`` qubits."""
    return {
        "hadamard": 2 * width,
        "controlled_phase": width * (width - 1),
        "phase": width,
    }


def comparator_gate_count(m: int, n_windows: int = 1) -> dict[str, int]:
    """Gate counts for one good-state reflection: six adders, two NOTs and one CZ per window."""
    wide, narrow = adder_gate_count(m + 1), adder_gate_count(m)
    total = {k: n_windows * (4 * wide[k] + 2 * narrow[k]) for k in wide}
    total["not"] = 2 * n_windows
    total["cz"] = n_windows
    return total
