"""Runtime models of the quantum and classical eigensolvers and the N-scaling study.

All hidden constants are 1 and logarithms are base 2, so absolute cost
values and crossover sizes are artifacts of that convention; only slopes
and orderings carry meaning.
"""
from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

CONVENTIONS = {
    "constants": "all hidden big-O constants set to 1",
    "log_base": 2,
    "worst_case": "epsilon = delta = gap = 1/N, lambda2/lambda1 = 1 - 1/N, gamma = zeta = a_max = 1",
    "sampling": "shots = max(1, ln(2M/zeta) / (2 delta^2)); CES: M = N, delta as given; PES: M = k, delta = gamma/k",
    "note": "absolute costs and crossover N are artifacts of the unit constants",
}


@dataclass(frozen=True)
class CostParams:
    N: float
    s: float = 1.0
    k: float = 1.0
    gamma: float = 1.0
    epsilon: float = 0.1
    delta: float = 0.1
    zeta: float = 1.0
    gap: float = 0.1
    ratio: float = 0.5
    a_max: float = 1.0

    def __post_init__(self):
        if self.N < 1 or self.s < 1 or self.k < 1:
            raise ValueError("N, s and k must be at least 1")
        if self.k > self.N:
            raise ValueError(f"k={self.k} exceeds N={self.N}")
        for name in ("gamma", "epsilon", "delta", "zeta"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        if self.gap <= 0 or self.a_max <= 0:
            raise ValueError("gap and a_max must be positive")
        if not 0 < self.ratio < 1:
            raise ValueError(f"lambda2/lambda1 must lie in (0, 1), got {self.ratio}")


def worst_case(N: float, k: float = 1, s: float = 1) -> CostParams:
    """Homogeneously spread spectrum: every tolerance and gap scales as 1/N."""
    inv = 1.0 / N
    return CostParams(N=N, s=s, k=k, gamma=1.0, epsilon=inv, delta=inv, zeta=1.0, gap=inv,
                      ratio=1.0 - inv, a_max=1.0)


def cost_pes(p: CostParams) -> float:
    return math.sqrt(p.N / p.k) * p.s * p.a_max * max(1.0 / p.epsilon, p.k / (p.gamma * p.gap))


def cost_ces(p: CostParams) -> float:
    """Circuit cost without the window: the PES formula at k = N."""
    return p.s * p.a_max * max(1.0 / p.epsilon, p.N / (p.gamma * p.gap))


def cost_power(p: CostParams) -> float:
    return p.N * p.s * p.k * abs(math.log2(p.epsilon)) / abs(math.log2(p.ratio))


def cost_lanczos(p: CostParams) -> float:
    return p.N * p.s * math.log2(p.N) / math.sqrt(p.epsilon)


def cost_qr(p: CostParams) -> float:
    return p.N * p.N * p.s


def shots_ces(p: CostParams) -> float:
    return max(1.0, math.log(2 * p.N / p.zeta) / (2 * p.delta ** 2))


def shots_pes(p: CostParams) -> float:
    delta = p.gamma / p.k
    return max(1.0, math.log(2 * p.k / p.zeta) / (2 * delta ** 2))


QUERY_MODELS = {
    "PES": cost_pes,
    "CES": cost_ces,
    "Power": cost_power,
    "Lanczos": cost_lanczos,
    "QR": cost_qr,
}

SAMPLED_MODELS = {
    "PES": lambda p: cost_pes(p) * shots_pes(p),
    "CES": lambda p: cost_ces(p) * shots_ces(p),
    "Power": cost_power,
    "Lanczos": cost_lanczos,
    "QR": cost_qr,
}

CURVE_SETS = {"query": QUERY_MODELS, "with-sampling": SAMPLED_MODELS}

# curves with an extra log N factor; their "log-free" slope divides it out
LOG_CURVES = {"Lanczos", "Power"}


def memory_model(N: int, s: int, m: int, walk: bool = False) -> dict[str, int]:
    """Classical matrix storage in words against simulated qubits."""
    n = max(1, math.ceil(math.log2(N)))
    return {"classical_words": int(N * s), "qubits": n + m + 2 + int(walk)}


@dataclass
class CostCurve:
    method: str
    curve_set: str
    N: np.ndarray
    cost: np.ndarray
    regime: str = "worst-case"

    def slope(self, lo: float | None = None, hi: float | None = None, strip_log: bool = False) -> float:
        """Least-squares slope of log cost against log N over [lo, hi]."""
        sel = np.ones_like(self.N, dtype=bool)
        if lo is not None:
            sel &= self.N >= lo
        if hi is not None:
            sel &= self.N <= hi
        y = self.cost[sel]
        if strip_log:
            y = y / np.log2(self.N[sel])
        return float(np.polyfit(np.log(self.N[sel]), np.log(y), 1)[0])


@dataclass(frozen=True)
class Crossover:
    curve_set: str
    first: str
    second: str
    N: float
    cost: float


@dataclass
class ScalingStudy:
    curves: list[CostCurve]
    crossovers: list[Crossover]
    k: float
    s: float
    metadata: dict = field(default_factory=dict)

    def curve(self, method: str, curve_set: str = "query") -> CostCurve:
        for c in self.curves:
            if c.method == method and c.curve_set == curve_set:
                return c
        raise KeyError((method, curve_set))

    def slopes(self, curve_set: str = "query") -> dict[str, dict[str, float]]:
        out = {}
        for c in self.curves:
            if c.curve_set == curve_set:
                out[c.method] = {"slope": c.slope(), "slope_log_free": c.slope(strip_log=True)}
        return out


def _log_ratio(f, g, k, s, log_n):
    p = worst_case(2.0 ** log_n, k, s)
    return math.log(f(p)) - math.log(g(p))


def find_crossovers(models: dict, n_min: float, n_max: float, k: float, s: float, curve_set: str,
                    grid_per_octave: int = 16, rtol: float = 1e-9, tie: float = 1e-9) -> list[Crossover]:
    """Every N in [n_min, n_max] where two cost models swap order, by bisection in log N.

    Log-ratios within ``tie`` of zero count as equal, so coincident curves
    (CES and QR share N^2 in the query set) produce no crossings.
    """
    lo, hi = math.log2(max(n_min, k, 2.0)), math.log2(n_max)
    grid = np.linspace(lo, hi, max(2, int(round((hi - lo) * grid_per_octave)) + 1))
    found = []
    for (na, fa), (nb, fb) in itertools.combinations(models.items(), 2):
        vals = np.array([_log_ratio(fa, fb, k, s, x) for x in grid])
        sign = np.where(np.abs(vals) <= tie, 0, np.sign(vals))
        nz = np.flatnonzero(sign)
        for i0, i1 in zip(nz[:-1], nz[1:]):
            if sign[i0] == sign[i1]:
                continue
            if i1 - i0 > 1:
                # touched zero on the grid between the brackets
                root = 0.5 * (grid[i0 + 1] + grid[i1 - 1])
            else:
                a, b, va = grid[i0], grid[i1], vals[i0]
                while b - a > rtol:
                    mid = 0.5 * (a + b)
                    vm = _log_ratio(fa, fb, k, s, mid)
                    if vm * va <= 0:
                        b = mid
                    else:
                        a, va = mid, vm
                root = 0.5 * (a + b)
            n = float(2.0 ** root)
            found.append(Crossover(curve_set, na, nb, n, float(fa(worst_case(n, k, s)))))
    found.sort(key=lambda c: (c.curve_set, c.N))
    return found


def scaling_study(n_min: float = 2 ** 10, n_max: float = 2 ** 20, k: float = 1, s: float = 1,
                  curves: str = "both", points_per_octave: int = 4) -> ScalingStudy:
    """Evaluate every cost model under worst-case substitutions on a log-spaced N grid."""
    if n_min < 2 or n_max <= n_min:
        raise ValueError(f"need 2 <= n_min < n_max, got [{n_min}, {n_max}]")
    sets = ["query", "with-sampling"] if curves == "both" else [curves]
    for name in sets:
        if name not in CURVE_SETS:
            raise ValueError(f"unknown curve set {name!r}")
    lo, hi = math.log2(max(n_min, k)), math.log2(n_max)
    ns = 2.0 ** np.linspace(lo, hi, int(round((hi - lo) * points_per_octave)) + 1)
    out, crossings = [], []
    for name in sets:
        models = CURVE_SETS[name]
        for method, f in models.items():
            cost = np.array([f(worst_case(n, k, s)) for n in ns])
            out.append(CostCurve(method, name, ns, cost))
        crossings += find_crossovers(models, n_min, n_max, k, s, name)
    meta = dict(CONVENTIONS, n_min=n_min, n_max=n_max, k=k, s=s, curve_sets=sets)
    return ScalingStudy(out, crossings, k, s, meta)


def write_curves_csv(study: ScalingStudy, fh) -> None:
    w = csv.writer(fh)
    w.writerow(["method", "N", "cost", "regime", "curve_set"])
    for c in study.curves:
        for n, v in zip(c.N, c.cost):
            w.writerow([c.method, repr(float(n)), repr(float(v)), c.regime, c.curve_set])


def write_crossovers_csv(study: ScalingStudy, fh) -> None:
    w = csv.writer(fh)
    w.writerow(["curve_set", "first", "second", "N", "cost", "note"])
    for x in study.crossovers:
        w.writerow([x.curve_set, x.first, x.second, repr(x.N), repr(x.cost), "unit-constant model artifact"])


def write_metadata(study: ScalingStudy, fh) -> None:
    doc = dict(study.metadata)
    doc["slopes"] = {name: study.slopes(name) for name in doc.get("curve_sets", [])}
    doc["crossovers"] = [asdict(x) for x in study.crossovers]
    json.dump(doc, fh, indent=2, sort_keys=True)


def plot_study(study: ScalingStudy, path) -> None:
    """Log-log SVG with one panel per curve set; crossovers are marked and labeled."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    sets = study.metadata.get("curve_sets", ["query"])
    fig, axes = plt.subplots(1, len(sets), figsize=(6.5 * len(sets), 4.8), squeeze=False)
    for ax, name in zip(axes[0], sets):
        for c in study.curves:
            if c.curve_set == name:
                ax.loglog(c.N, c.cost, label=c.method)
        for x in study.crossovers:
            if x.curve_set == name:
                ax.plot([x.N], [x.cost], "k.", ms=5)
                ax.annotate(f"{x.first}/{x.second}\nN={x.N:.3g}", (x.N, x.cost), fontsize=6,
                            xytext=(3, -10), textcoords="offset points")
        ax.set_xlabel("N")
        ax.set_ylabel("cost (unit constants)")
        ax.set_title(f"worst case, {name}")
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
