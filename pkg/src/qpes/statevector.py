"""Exact statevector simulation of the solver register.

Qubits are numbered little-endian: qubit ``q`` is bit ``q`` of the flat
amplitude index. The layout packs, from least significant upward, the
system register (plus the optional walk flag as its top bit), the m-bit
phase register, and the two comparator sign ancillas.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

MAX_DENSE_DIM = 2 ** 12
NORM_TOL = 1e-12


@dataclass(frozen=True)
class RegisterLayout:
    """Qubit bookkeeping for ``n`` system qubits, ``m`` phase qubits and two ancillas."""

    n: int
    m: int
    flag: bool = False

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError(f"need n >= 1 and m >= 1, got n={self.n}, m={self.m}")

    @classmethod
    def for_dimension(cls, dim: int, m: int, flag: bool = False) -> "RegisterLayout":
        return cls(max(1, int(np.ceil(np.log2(dim)))), m, flag)

    @property
    def n_system(self) -> int:
        return self.n + int(self.flag)

    @property
    def total(self) -> int:
        return self.n_system + self.m + 2

    @property
    def system(self) -> tuple[int, ...]:
        return tuple(range(self.n_system))

    @property
    def phase(self) -> tuple[int, ...]:
        return tuple(range(self.n_system, self.n_system + self.m))

    @property
    def anc1(self) -> int:
        return self.n_system + self.m

    @property
    def anc2(self) -> int:
        return self.n_system + self.m + 1

    @property
    def tensor_shape(self) -> tuple[int, int, int, int]:
        """Shape of the (anc2, anc1, phase, system) view of the amplitudes."""
        return (2, 2, 2 ** self.m, 2 ** self.n_system)


@dataclass
class QuantumState:
    amplitudes: np.ndarray
    layout: RegisterLayout

    def __post_init__(self):
        if self.amplitudes.shape != (2 ** self.layout.total,):
            raise ValueError("amplitude vector does not match layout")

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.tensor_shape)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "QuantumState":
        return QuantumState(self.amplitudes.copy(), self.layout)

    def with_amplitudes(self, amps: np.ndarray) -> "QuantumState":
        return QuantumState(amps, self.layout)


def zero_state(layout: RegisterLayout) -> QuantumState:
    amps = np.zeros(2 ** layout.total, dtype=complex)
    amps[0] = 1.0
    return QuantumState(amps, layout)


def prepare_basis_u(layout: RegisterLayout, u: int) -> QuantumState:
    """|0...0>|u>: NOT gates on the set bits of ``u`` in the system register."""
    if not 0 <= u < 2 ** layout.n:
        raise ValueError(f"u={u} out of range for {layout.n} system qubits")
    bits = [q for q in range(layout.n) if (u >> q) & 1]
    return apply_x(zero_state(layout), bits)


def inner(a: QuantumState, b: QuantumState) -> complex:
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: QuantumState, b: QuantumState) -> float:
    return abs(inner(a, b)) ** 2


@lru_cache(maxsize=64)
def register_values(total: int, qubits: tuple[int, ...]) -> np.ndarray:
    """Integer held by ``qubits`` (LSB first) for every flat basis index."""
    idx = np.arange(2 ** total, dtype=np.int64)
    out = np.zeros_like(idx)
    for i, q in enumerate(qubits):
        out |= ((idx >> q) & 1) << i
    out.setflags(write=False)
    return out


def _axis(total: int, q: int) -> int:
    return total - 1 - q


def apply_x(state: QuantumState, qubits: Iterable[int]) -> QuantumState:
    mask = 0
    for q in qubits:
        mask |= 1 << q
    if mask == 0:
        return state.copy()
    idx = np.arange(state.amplitudes.size) ^ mask
    return state.with_amplitudes(state.amplitudes[idx])


def apply_permutation(state: QuantumState, perm: np.ndarray) -> QuantumState:
    """Send basis state ``i`` to ``perm[i]``."""
    out = np.empty_like(state.amplitudes)
    out[perm] = state.amplitudes
    return state.with_amplitudes(out)


def check_unitary(u: np.ndarray, tol: float = 1e-12) -> None:
    d = u.shape[0]
    if u.shape != (d, d):
        raise ValueError(f"unitary must be square, got {u.shape}")
    err = np.abs(u.conj().T @ u - np.eye(d)).max()
    if err > tol:
        raise ValueError(f"matrix is not unitary (deviation {err:.3e})")


def apply_unitary(state: QuantumState, u: np.ndarray, qubits: Sequence[int],
                  controls: Sequence[int] = (), check: bool = True) -> QuantumState:
    """Apply dense ``u`` to ``qubits`` (``qubits[0]`` is the LSB of u's index).

    With ``controls`` the action is restricted to basis states where every
    control qubit is 1.
    """
    qubits = tuple(qubits)
    controls = tuple(controls)
    k = len(qubits)
    if u.shape != (2 ** k, 2 ** k):
        raise ValueError(f"unitary of shape {u.shape} does not act on {k} qubits")
    if 2 ** k > MAX_DENSE_DIM:
        raise ValueError(f"dense unitaries are limited to dimension {MAX_DENSE_DIM}")
    if set(qubits) & set(controls) or len(set(qubits)) != k:
        raise ValueError("target and control qubits must be distinct")
    if check:
        check_unitary(u)

    total = state.layout.total
    psi = state.amplitudes.copy().reshape((2,) * total)
    sel = [slice(None)] * total
    for c in controls:
        sel[_axis(total, c)] = 1
    sub = psi[tuple(sel)]

    # remaining axes after dropping control axes
    kept = [ax for ax in range(total) if sel[ax] == slice(None)]
    targets = [kept.index(_axis(total, q)) for q in reversed(qubits)]
    dest = list(range(sub.ndim - k, sub.ndim))
    moved = np.moveaxis(sub, targets, dest)
    shape = moved.shape
    res = (moved.reshape(-1, 2 ** k) @ u.T).reshape(shape)
    sub[...] = np.moveaxis(res, dest, targets)
    return state.with_amplitudes(psi.reshape(-1))


def reflect_about_zero(state: QuantumState, qubits: Sequence[int]) -> QuantumState:
    """2|0><0| - I on ``qubits``: keep all-zero components, negate the rest."""
    vals = register_values(state.layout.total, tuple(qubits))
    amps = np.where(vals == 0, state.amplitudes, -state.amplitudes)
    return state.with_amplitudes(amps)


def register_probabilities(state: QuantumState, qubits: Sequence[int]) -> np.ndarray:
    """Dense marginal distribution over the values of ``qubits``."""
    qubits = tuple(qubits)
    vals = register_values(state.layout.total, qubits)
    probs = np.abs(state.amplitudes) ** 2
    return np.bincount(vals, weights=probs, minlength=2 ** len(qubits))


def register_distribution(state: QuantumState, qubits: Sequence[int], cutoff: float = 0.0) -> dict[int, float]:
    p = register_probabilities(state, qubits)
    return {int(i): float(p[i]) for i in np.flatnonzero(p > cutoff)}


def sample(state: QuantumState, qubits: Sequence[int], shots: int, seed: int) -> dict[int, int]:
    """Seeded multinomial draw of ``shots`` measurements of ``qubits``."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = register_probabilities(state, qubits)
    return sample_distribution(p, shots, np.random.default_rng(seed))


def sample_distribution(p: np.ndarray, shots: int, rng: np.random.Generator) -> dict[int, int]:
    p = np.clip(p, 0.0, None)
    counts = rng.multinomial(shots, p / p.sum())
    return {int(i): int(counts[i]) for i in np.flatnonzero(counts)}


_DUMP_MAGIC = b"QSV1"


def dump_state(state: QuantumState, path) -> None:
    """Binary dump: magic, uint32 header (n, m, flag), little-endian complex128 amplitudes."""
    lay = state.layout
    with open(path, "wb") as fh:
        fh.write(_DUMP_MAGIC)
        fh.write(struct.pack("<3I", lay.n, lay.m, int(lay.flag)))
        fh.write(state.amplitudes.astype("<c16").tobytes())


def load_state(path) -> QuantumState:
    with open(path, "rb") as fh:
        if fh.read(4) != _DUMP_MAGIC:
            raise ValueError("not a state dump")
        n, m, flag = struct.unpack("<3I", fh.read(12))
        amps = np.frombuffer(fh.read(), dtype="<c16").astype(complex)
    return QuantumState(amps, RegisterLayout(n, m, bool(flag)))
