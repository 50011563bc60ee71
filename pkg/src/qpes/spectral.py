"""Phase maps, the spectral unitary V, phase estimation and the complete eigenpair solver."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matrix_core import SparseHermitian, Spectrum, eig_oracle
from .statevector import (
    QuantumState,
    RegisterLayout,
    apply_unitary,
    apply_x,
    check_unitary,
    prepare_basis_u,
    register_probabilities,
)

KINDS = ("exponential", "walk")
_ALIASES = {"exp": "exponential", "exponential": "exponential", "walk": "walk"}


@dataclass(frozen=True)
class PhaseMap:
    """Maps eigenvalues to eigenphases and back.

    ``exponential``: f(lam) = 2*pi*(lam + alpha) / (4*alpha), increasing, image [0, pi].
    ``walk``: f(lam) = arccos(lam / alpha), decreasing, image (0, pi) for |lam| < alpha.
    """

    kind: str
    alpha: float
    m: int

    @property
    def grid_size(self) -> int:
        return 2 ** self.m

    @property
    def resolution(self) -> float:
        """Eigenvalue spacing of the grid in the exponential model."""
        return 4.0 * self.alpha / self.grid_size

    def f(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.kind == "exponential":
            out = 2.0 * np.pi * (lam + self.alpha) / (4.0 * self.alpha)
        else:
            out = np.arccos(np.clip(lam / self.alpha, -1.0, 1.0))
        return out if out.ndim else float(out)

    def f_inv(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.kind == "exponential":
            out = 4.0 * self.alpha * theta / (2.0 * np.pi) - self.alpha
        else:
            out = self.alpha * np.cos(theta)
        return out if out.ndim else float(out)

    def lambda_to_grid(self, lam):
        """Real-valued grid coordinate 2**m f(lam) / 2 pi."""
        if self.kind == "exponential":
            return self.grid_size * (np.asarray(lam, dtype=float) + self.alpha) / (4.0 * self.alpha)
        return self.grid_size * np.asarray(self.f(lam)) / (2.0 * np.pi)

    def grid_range(self) -> range:
        """Grid integers that are images of admissible eigenvalues."""
        half = self.grid_size // 2
        return range(0, half + 1) if self.kind == "exponential" else range(1, half)

    def grid_to_lambda(self, phi: int) -> float:
        """Eigenvalue whose eigenphase is exactly the grid point ``phi``."""
        phi = int(phi)
        if phi not in self.grid_range():
            raise ValueError(f"grid phase {phi} outside the invertible range of the {self.kind} map")
        if self.kind == "exponential":
            return self.alpha * (4.0 * phi / self.grid_size) - self.alpha
        return self.alpha * float(np.cos(2.0 * np.pi * phi / self.grid_size))

    def measured_to_lambda(self, y: int) -> float:
        """Eigenvalue estimate for a measured phase-register value (mirror branch folded)."""
        y = int(y) % self.grid_size
        if self.kind == "walk" and y > self.grid_size // 2:
            y = self.grid_size - y
        if self.kind == "exponential":
            return self.alpha * (4.0 * y / self.grid_size) - self.alpha
        return self.alpha * float(np.cos(2.0 * np.pi * y / self.grid_size))


def build_phase_map(alpha: float, m: int, kind: str = "exponential") -> PhaseMap:
    if alpha <= 0:
        raise ValueError(f"spectral bound alpha must be positive, got {alpha}")
    if m < 1:
        raise ValueError(f"need at least one phase bit, got m={m}")
    if kind not in _ALIASES:
        raise ValueError(f"unknown phase-map kind {kind!r}")
    return PhaseMap(_ALIASES[kind], float(alpha), int(m))


def default_alpha(a: SparseHermitian) -> float:
    """s * max|A_uv|, which bounds every |lambda| by Gershgorin."""
    return a.sparsity * a.max_abs


@dataclass(frozen=True)
class SpectralUnitary:
    kind: str
    matrix: np.ndarray
    spectrum: Spectrum
    phase_map: PhaseMap
    n: int
    mu_plus: np.ndarray | None = field(default=None, repr=False)
    mu_minus: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_qubits(self) -> int:
        return self.n + (1 if self.kind == "walk" else 0)


def build_spectral_unitary(spectrum: Spectrum, phase_map: PhaseMap, n: int | None = None) -> SpectralUnitary:
    """Dense V with eigenphases f(lambda_j) (exponential) or +-f(lambda_j) on mu_pm (walk).

    The walk model adds a flag qubit above the system register and uses
    mu_pm = (|0>|v_j> -+ i|1>|v_j>) / sqrt(2), so that |0>|v_j> splits
    evenly over both branches.
    """
    lam = spectrum.eigenvalues
    dim = spectrum.dim
    if n is None:
        n = max(1, int(np.ceil(np.log2(dim))))
    size = 2 ** n
    if dim > size:
        raise ValueError(f"{dim} eigenvectors do not fit in {n} qubits")
    bound = np.abs(lam).max()
    if phase_map.kind == "exponential" and bound > phase_map.alpha * (1 + 1e-12):
        raise ValueError(f"max |lambda| = {bound} exceeds alpha = {phase_map.alpha}")
    if phase_map.kind == "walk" and bound >= phase_map.alpha:
        raise ValueError(f"walk model needs max |lambda| < alpha, got {bound} >= {phase_map.alpha}")

    vecs = np.zeros((size, dim), dtype=complex)
    vecs[:dim] = spectrum.eigenvectors
    pad = np.eye(size, dtype=complex)
    pad[:dim, :dim] = 0.0
    phases = phase_map.f(lam)

    if phase_map.kind == "exponential":
        u = (vecs * np.exp(1j * phases)) @ vecs.conj().T + pad
        return SpectralUnitary("exponential", u, spectrum, phase_map, n)

    mu_plus = np.vstack([vecs, -1j * vecs]) / np.sqrt(2)
    mu_minus = np.vstack([vecs, 1j * vecs]) / np.sqrt(2)
    u = (mu_plus * np.exp(1j * phases)) @ mu_plus.conj().T
    u += (mu_minus * np.exp(-1j * phases)) @ mu_minus.conj().T
    u += np.kron(np.eye(2), pad)
    return SpectralUnitary("walk", u, spectrum, phase_map, n, mu_plus, mu_minus)


def hadamard_matrix(m: int) -> np.ndarray:
    h = np.array([[1.0]])
    h1 = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    for _ in range(m):
        h = np.kron(h, h1)
    return h


def qft_matrix(m: int) -> np.ndarray:
    size = 2 ** m
    j = np.arange(size)
    return np.exp(2j * np.pi * np.outer(j, j) / size) / np.sqrt(size)


class PhaseEstimation:
    """Textbook QPE on a fixed layout: Hadamards, controlled V^(2^t), inverse QFT.

    Phase qubit ``t`` (little-endian) controls V^(2^t); the powers are
    formed once by repeated squaring.
    """

    def __init__(self, unitary: SpectralUnitary, layout: RegisterLayout):
        if layout.n_system != unitary.n_qubits:
            raise ValueError("layout system register does not match the unitary")
        self.unitary = unitary
        self.layout = layout
        check_unitary(unitary.matrix, tol=1e-10)
        powers = []
        w = unitary.matrix
        for _ in range(layout.m):
            powers.append(w)
            w = w @ w
        self._powers = powers
        self._powers_dag = [p.conj().T for p in powers]
        self._h = hadamard_matrix(1)
        self._iqft = qft_matrix(layout.m).conj().T
        self._qft = qft_matrix(layout.m)

    def forward(self, state: QuantumState) -> QuantumState:
        lay = self.layout
        for q in lay.phase:
            state = apply_unitary(state, self._h, [q], check=False)
        for t, q in enumerate(lay.phase):
            state = apply_unitary(state, self._powers[t], lay.system, controls=[q], check=False)
        return apply_unitary(state, self._iqft, lay.phase, check=False)

    def inverse(self, state: QuantumState) -> QuantumState:
        lay = self.layout
        state = apply_unitary(state, self._qft, lay.phase, check=False)
        for t in reversed(range(lay.m)):
            state = apply_unitary(state, self._powers_dag[t], lay.system, controls=[lay.phase[t]], check=False)
        for q in reversed(lay.phase):
            state = apply_unitary(state, self._h, [q], check=False)
        return state


class CES:
    """Complete eigenpair solver: NOT gates preparing |u>, then QPE.

    ``apply``/``apply_inverse`` replay the circuit (and its adjoint) on an
    arbitrary register state, which is what the state reflection needs.
    """

    def __init__(self, unitary: SpectralUnitary, u: int, m: int):
        if m != unitary.phase_map.m:
            raise ValueError("phase map and phase register disagree on m")
        if not 0 <= u < unitary.spectrum.dim:
            raise ValueError(f"u={u} out of range for N={unitary.spectrum.dim}")
        self.unitary = unitary
        self.u = u
        self.m = m
        self.layout = RegisterLayout(unitary.n, m, flag=unitary.kind == "walk")
        self.qpe = PhaseEstimation(unitary, self.layout)
        self._u_bits = [q for q in range(self.layout.n) if (u >> q) & 1]

    @property
    def spectrum(self) -> Spectrum:
        return self.unitary.spectrum

    @property
    def phase_map(self) -> PhaseMap:
        return self.unitary.phase_map

    def apply(self, state: QuantumState) -> QuantumState:
        return self.qpe.forward(apply_x(state, self._u_bits))

    def apply_inverse(self, state: QuantumState) -> QuantumState:
        return apply_x(self.qpe.inverse(state), self._u_bits)

    def prepare(self) -> QuantumState:
        return self.qpe.forward(prepare_basis_u(self.layout, self.u))


def apply_qpe(state: QuantumState, unitary: SpectralUnitary, m: int) -> QuantumState:
    """Textbook QPE of ``unitary`` into the cleared m-qubit phase register of ``state``."""
    if state.layout.m != m:
        raise ValueError(f"state has {state.layout.m} phase qubits, expected {m}")
    p0 = register_probabilities(state, state.layout.phase)[0]
    if abs(p0 - 1.0) > 1e-12:
        raise ValueError("phase register is not in |0>")
    return PhaseEstimation(unitary, state.layout).forward(state)


def build_ces(a: SparseHermitian | None, u: int, phase_map: PhaseMap,
              spectrum: Spectrum | None = None) -> CES:
    if spectrum is None:
        if a is None:
            raise ValueError("need a matrix or a spectrum")
        spectrum = eig_oracle(a)
    return CES(build_spectral_unitary(spectrum, phase_map), u, phase_map.m)


def run_ces(a: SparseHermitian | None, u: int, phase_map: PhaseMap,
            spectrum: Spectrum | None = None) -> QuantumState:
    """Pre-measurement CES state for basis state ``u``."""
    return build_ces(a, u, phase_map, spectrum).prepare()


def qpe_kernel(phase: float, m: int) -> np.ndarray:
    """Outcome distribution of m-bit QPE for a real grid coordinate ``phase``.

    Evaluated by direct summation over the 2**m phase-register values.
    """
    size = 2 ** m
    x = np.arange(size)
    amp = np.exp(2j * np.pi * np.outer(phase - x, x) / size).sum(axis=1) / size
    return np.abs(amp) ** 2


def expected_phase_distribution(spectrum: Spectrum, u: int, phase_map: PhaseMap) -> np.ndarray:
    """Phase marginal predicted from the spectrum via the analytic QPE kernel."""
    weights = spectrum.component_weights(u)
    grid = phase_map.lambda_to_grid(spectrum.eigenvalues)
    out = np.zeros(phase_map.grid_size)
    for w, g in zip(weights, grid):
        if phase_map.kind == "exponential":
            out += w * qpe_kernel(g, phase_map.m)
        else:
            out += 0.5 * w * (qpe_kernel(g, phase_map.m) + qpe_kernel(-g, phase_map.m))
    return out


def leakage(state: QuantumState, spectrum: Spectrum, u: int, phase_map: PhaseMap) -> float:
    """Phase-register mass outside the nearest grid bins of the eigenphases with v_uj != 0."""
    p = register_probabilities(state, state.layout.phase)
    weights = spectrum.component_weights(u)
    grid = phase_map.lambda_to_grid(spectrum.eigenvalues[weights > 1e-14])
    bins = set(int(b) for b in np.rint(grid).astype(int) % phase_map.grid_size)
    if phase_map.kind == "walk":
        bins |= {(-b) % phase_map.grid_size for b in bins}
    return float(1.0 - sum(p[b] for b in bins))
