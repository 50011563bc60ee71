"""Eigenpair estimates from phase-register samples, plus the shot budgets."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .amplification import AAPlan
from .matrix_core import Spectrum
from .spectral import PhaseMap
from .window import PhaseWindow, window_mask


@dataclass(frozen=True)
class SampleBudget:
    shots: int
    delta: float
    gamma: float
    zeta: float
    outcomes: int


def hoeffding_shots(delta: float, zeta: float, outcomes: int) -> int:
    """Shots so that all ``outcomes`` frequencies are within ``delta`` with probability 1 - zeta.

    Two-sided Hoeffding bound with a union over the outcomes.
    """
    if delta <= 0 or not 0 < zeta <= 1 or outcomes < 1:
        raise ValueError(f"bad budget parameters delta={delta}, zeta={zeta}, M={outcomes}")
    return math.ceil(math.log(2 * outcomes / zeta) / (2 * delta * delta))


def _check(gamma: float, zeta: float) -> None:
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    if not 0 < zeta < 1:
        raise ValueError(f"zeta must lie in (0, 1), got {zeta}")


def budget_ces(n: int, gamma: float, zeta: float) -> SampleBudget:
    """Shots for the unfiltered solver, assuming every |v_uj|^2 is 1/N."""
    _check(gamma, zeta)
    if n < 1:
        raise ValueError("N must be positive")
    delta = gamma / n
    return SampleBudget(hoeffding_shots(delta, zeta, n), delta, gamma, zeta, n)


def budget_pes(k: int, gamma: float, zeta: float) -> SampleBudget:
    """Shots once amplification has lifted the k window pairs to weight ~1/k each."""
    _check(gamma, zeta)
    if k < 1:
        raise ValueError("k must be positive")
    delta = gamma / k
    return SampleBudget(hoeffding_shots(delta, zeta, k), delta, gamma, zeta, k)


@dataclass(frozen=True)
class EigenpairEstimate:
    phi: int | None
    lambda_hat: float
    amp_sq_hat: float
    ci_halfwidth: float
    count: int
    shots: int
    in_window: bool = True
    multiplicity: int | None = None

    @property
    def raw_fraction(self) -> float:
        return self.count / self.shots

    @property
    def is_leakage(self) -> bool:
        return self.phi is None


def fold_phase(y: int, phase_map: PhaseMap) -> int:
    """Map the mirror branch 2**m - phi of the walk model back onto phi."""
    size = phase_map.grid_size
    y = int(y) % size
    if phase_map.kind == "walk" and y > size // 2:
        return size - y
    return y


def estimate_eigenpairs(counts: Mapping[int, int], plan: AAPlan | None, phase_map: PhaseMap,
                        windows: Sequence[PhaseWindow] | None = None, zeta: float = 0.05,
                        spectrum: Spectrum | None = None) -> list[EigenpairEstimate]:
    """Turn phase-register counts into (lambda_hat, |v_uj|^2 hat) estimates.

    Frequencies are divided by |c|^2 from ``plan`` (``None`` means no
    amplification). Walk-model mirror bins are merged before estimation.
    Outcomes outside ``windows`` are pooled into one trailing leakage
    record whose amp_sq_hat is its uncorrected frequency.
    """
    shots = int(sum(counts.values()))
    if shots == 0:
        raise ValueError("no counts to estimate from")
    c_sq = 1.0 if plan is None else plan.c_squared
    if c_sq <= 0:
        raise ValueError("amplification scale |c|^2 is zero")
    inside = np.ones(phase_map.grid_size, dtype=bool) if windows is None else window_mask(windows, phase_map.m)

    merged: dict[int, int] = {}
    leaked = 0
    for y, cnt in counts.items():
        if inside[int(y)]:
            phi = fold_phase(y, phase_map)
            merged[phi] = merged.get(phi, 0) + int(cnt)
        else:
            leaked += int(cnt)

    mult = None
    if spectrum is not None:
        grid = np.rint(phase_map.lambda_to_grid(spectrum.eigenvalues)).astype(int)
        mult = {}
        for g in grid:
            g = fold_phase(int(g), phase_map)
            mult[g] = mult.get(g, 0) + 1

    half = math.sqrt(math.log(2 * max(1, len(merged)) / zeta) / (2 * shots)) / c_sq
    out = [
        EigenpairEstimate(
            phi=phi,
            lambda_hat=phase_map.measured_to_lambda(phi),
            amp_sq_hat=cnt / shots / c_sq,
            ci_halfwidth=half,
            count=cnt,
            shots=shots,
            in_window=True,
            multiplicity=None if mult is None else mult.get(phi, 0),
        )
        for phi, cnt in merged.items()
    ]
    out.sort(key=lambda e: (-e.amp_sq_hat, e.phi))
    if leaked:
        out.append(EigenpairEstimate(None, math.nan, leaked / shots, math.nan, leaked, shots, in_window=False))
    return out


CSV_FIELDS = ("phi", "lambda_hat", "amp_sq_hat", "ci_halfwidth", "count", "in_window")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "" if math.isnan(x) else repr(x)
    return str(x)


def write_estimates_csv(rows: Sequence[EigenpairEstimate], fh) -> None:
    w = csv.writer(fh)
    w.writerow(CSV_FIELDS)
    for e in rows:
        w.writerow([_fmt(e.phi), _fmt(e.lambda_hat), _fmt(e.amp_sq_hat), _fmt(e.ci_halfwidth),
                    _fmt(e.count), _fmt(e.in_window)])


def true_weights(spectrum: Spectrum, u: int, phase_map: PhaseMap, indices: Sequence[int]) -> dict[int, float]:
    """|v_uj|^2 summed per folded grid phase over the eigenvectors in ``indices``."""
    w = spectrum.component_weights(u)
    out: dict[int, float] = {}
    for j in indices:
        phi = fold_phase(int(np.rint(phase_map.lambda_to_grid(spectrum.eigenvalues[j]))), phase_map)
        out[phi] = out.get(phi, 0.0) + float(w[j])
    return out


def trial_errors(probs: np.ndarray, shots: int, truth: Mapping[int, float], c_sq: float,
                 phase_map: PhaseMap, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Relative errors |hat - true| / true per trial and tracked phase, shape (trials, len(truth))."""
    p = np.clip(probs, 0.0, None)
    draws = rng.multinomial(shots, p / p.sum(), size=trials)
    size = phase_map.grid_size
    cols = []
    for phi in truth:
        c = draws[:, phi].astype(float)
        if phase_map.kind == "walk" and 0 < phi < size // 2:
            c = c + draws[:, size - phi]
        cols.append(c)
    hat = np.stack(cols, axis=1) / shots / c_sq
    ref = np.array(list(truth.values()))
    return np.abs(hat - ref) / ref


def success_rate(probs: np.ndarray, shots: int, truth: Mapping[int, float], c_sq: float,
                 phase_map: PhaseMap, gamma: float, trials: int, seed: int) -> float:
    """Fraction of seeded trials in which every tracked estimate is within gamma relative error."""
    err = trial_errors(probs, shots, truth, c_sq, phase_map, trials, np.random.default_rng(seed))
    return float(np.mean(np.all(err <= gamma, axis=1)))


def empirical_shots_needed(probs: np.ndarray, truth: Mapping[int, float], c_sq: float, phase_map: PhaseMap,
                           gamma: float, confidence: float = 0.95, trials: int = 200, seed: int = 0,
                           start: int = 16, factor: float = 2 ** 0.25, limit: int = 10 ** 8) -> int:
    """Smallest shot count on a geometric ladder reaching ``confidence`` success rate."""
    shots = start
    while shots <= limit:
        if success_rate(probs, shots, truth, c_sq, phase_map, gamma, trials, seed) >= confidence:
            return shots
        shots = max(shots + 1, int(round(shots * factor)))
    raise RuntimeError(f"no shot count up to {limit} reaches confidence {confidence}")
