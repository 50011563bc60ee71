"""Reproducible on-grid test problems shared by the tests, the CLI and the demos."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matrix_core import SparseHermitian, Spectrum, basis_with_row, synthesize_on_grid
from .spectral import PhaseMap, build_phase_map


@dataclass
class Fixture:
    matrix: SparseHermitian
    spectrum: Spectrum
    phase_map: PhaseMap
    interval: tuple[float, float]
    u: int
    phases: list[int]

    @property
    def N(self) -> int:
        return self.matrix.dim


def interval_around(phase_map: PhaseMap, lo_phi: int, hi_phi: int) -> tuple[float, float]:
    """Eigenvalue interval whose grid image is exactly the phases between lo_phi and hi_phi.

    Endpoints sit half a grid step outside, so neighbouring grid phases are excluded.
    """
    a = phase_map.alpha
    size = phase_map.grid_size
    lam = lambda x: float(np.clip(phase_map.f_inv(2 * math.pi * x / size), -a, a))
    if phase_map.kind == "exponential":
        return lam(min(lo_phi, hi_phi) - 0.5), lam(max(lo_phi, hi_phi) + 0.5)
    return lam(max(lo_phi, hi_phi) + 0.5), lam(min(lo_phi, hi_phi) - 0.5)


def standard_fixture(kind: str = "exponential", m: int = 6, seed: int = 7, pair_weight: float = 0.09,
                     u: int = 0) -> Fixture:
    """N = 16 matrix with k = 2 eigenvalues in the target interval.

    The eigenphases are 16 distinct seeded grid points. The basis is a seeded
    orthogonal matrix whose row ``u`` gives each in-window eigenvector weight
    ``pair_weight`` and spreads the remaining mass randomly over the others.
    """
    pm = build_phase_map(1.0, m, kind)
    rng = np.random.default_rng(seed)
    phases = sorted(int(p) for p in rng.choice(list(pm.grid_range()), 16, replace=False))
    pair = (7, 8)
    rest = rng.standard_normal(16)
    rest[list(pair)] = 0.0
    rest *= math.sqrt(1.0 - 2 * pair_weight) / np.linalg.norm(rest)
    rest[list(pair)] = math.sqrt(pair_weight)
    q = basis_with_row(rest, u=u, seed=seed)
    a, spec = synthesize_on_grid(4, m, pm, phases, basis=q)
    interval = interval_around(pm, phases[pair[0]], phases[pair[1]])
    return Fixture(a, spec, pm, interval, u, phases)


def uniform_fixture(N: int, kind: str = "exponential", k: int = 2, seed: int = 0) -> Fixture:
    """Hadamard eigenbasis (every |v_uj|^2 = 1/N) with k adjacent eigenvalues in the interval.

    m is the smallest grid that holds N distinct eigenphases.
    """
    n = int(round(math.log2(N)))
    if 2 ** n != N:
        raise ValueError("uniform fixtures need a power-of-two N")
    m = n + 1 if kind == "exponential" else n + 2
    pm = build_phase_map(1.0, m, kind)
    rng = np.random.default_rng(seed)
    phases = sorted(int(p) for p in rng.choice(list(pm.grid_range()), N, replace=False))
    a, spec = synthesize_on_grid(n, m, pm, phases, basis="hadamard")
    mid = N // 2
    interval = interval_around(pm, phases[mid], phases[mid + k - 1])
    return Fixture(a, spec, pm, interval, 0, phases)
