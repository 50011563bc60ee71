"""Command-line entry point: ``qpes {pes,ces,classical,scaling,verify}``.

Exit codes: 0 ok, 1 usage, 2 validation, 3 numerical failure. Errors are
reported on stderr as a single JSON object.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .amplification import run_pes
from .classical import ConvergenceError, lanczos_extremal, power_method_topk, qr_eigensolver
from .complexity import memory_model, plot_study, scaling_study, write_crossovers_csv, write_curves_csv, write_metadata
from .estimator import (
    EigenpairEstimate,
    budget_ces,
    budget_pes,
    estimate_eigenpairs,
    write_estimates_csv,
)
from .matrix_core import MatrixError, load_matrix
from .spectral import build_ces, build_phase_map, default_alpha
from .statevector import register_probabilities, sample
from .verify import SUITES

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3

DEFAULTS = {
    "pes": {"u": 0, "m": 6, "model": "exp", "alpha": None, "shots": "auto", "gamma": 0.1, "zeta": 0.05,
            "seed": 0, "mode": "oracle-exact", "out": "out"},
    "ces": {"u": 0, "m": 6, "model": "exp", "alpha": None, "shots": "auto", "gamma": 0.1, "zeta": 0.05,
            "seed": 0, "out": "out"},
    "classical": {"method": "lanczos", "k": 1, "tol": 1e-10, "l": None, "u": 0, "max_iter": 10000, "seed": 0,
                  "out": "out"},
    "scaling": {"n_min": 1024, "n_max": 1048576, "k": 1, "s": 1, "curves": "both", "points_per_octave": 4,
                "out": "out"},
    "verify": {"suite": "comparator", "m": None},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qpes", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="JSON file with option defaults")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--threads", type=int, help="worker cap (recorded; runs are single-threaded)")

    def quantum(sp):
        sp.add_argument("--matrix", help="Matrix Market or JSON triple file")
        sp.add_argument("--u", type=int)
        sp.add_argument("--m", type=int)
        sp.add_argument("--model", choices=["exp", "walk"])
        sp.add_argument("--alpha", type=float, help="spectral bound (default s * max|A_uv|)")
        sp.add_argument("--shots", help="'auto' or a positive integer")
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--zeta", type=float)

    sp = sub.add_parser("pes", help="partial eigenpair solver on an eigenvalue window")
    common(sp)
    quantum(sp)
    sp.add_argument("--lambda-l", type=float, dest="lambda_l")
    sp.add_argument("--lambda-r", type=float, dest="lambda_r")
    sp.add_argument("--mode", choices=["oracle-exact", "worst-case"])

    sp = sub.add_parser("ces", help="complete eigenpair solver, no window")
    common(sp)
    quantum(sp)

    sp = sub.add_parser("classical", help="classical baseline eigensolver")
    common(sp)
    sp.add_argument("--matrix")
    sp.add_argument("--method", choices=["power", "lanczos", "qr"])
    sp.add_argument("--k", type=int)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--l", type=int, help="Krylov dimension for lanczos (default N)")
    sp.add_argument("--u", type=int, help="component reported as amp_sq_hat")
    sp.add_argument("--max-iter", type=int, dest="max_iter")

    sp = sub.add_parser("scaling", help="worst-case cost-model study")
    common(sp)
    sp.add_argument("--n-min", type=float, dest="n_min")
    sp.add_argument("--n-max", type=float, dest="n_max")
    sp.add_argument("--k", type=float)
    sp.add_argument("--s", type=float)
    sp.add_argument("--curves", choices=["query", "with-sampling", "both"])
    sp.add_argument("--points-per-octave", type=int, dest="points_per_octave")

    sp = sub.add_parser("verify", help="run invariant suites")
    sp.add_argument("--config")
    sp.add_argument("--suite", choices=sorted(SUITES))
    sp.add_argument("--m", type=int)
    return p


def _merge(command: str, args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[command])
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            cfg.update(json.load(fh))
    for key, val in vars(args).items():
        if key in ("command", "config") or val is None:
            continue
        cfg[key] = val
    return cfg


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _versions() -> dict:
    return {"qpes": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__}


def _write_manifest(out: Path, manifest: dict) -> None:
    with open(out / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_distribution(out: Path, probs: np.ndarray, phase_map) -> None:
    with open(out / "distribution.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["phi", "lambda", "probability"])
        for y in np.flatnonzero(probs > 1e-15):
            w.writerow([int(y), repr(phase_map.measured_to_lambda(int(y))), repr(float(probs[y]))])


def _quantum(command: str, cfg: dict) -> dict:
    if not cfg.get("matrix"):
        raise UsageError("--matrix is required")
    a = load_matrix(cfg["matrix"])
    alpha = cfg["alpha"] if cfg["alpha"] is not None else default_alpha(a)
    pm = build_phase_map(alpha, int(cfg["m"]), cfg["model"])
    gamma, zeta = float(cfg["gamma"]), float(cfg["zeta"])

    if command == "pes":
        if cfg.get("lambda_l") is None or cfg.get("lambda_r") is None:
            raise UsageError("--lambda-l and --lambda-r are required")
        res = run_pes(a, int(cfg["u"]), pm, (cfg["lambda_l"], cfg["lambda_r"]), mode=cfg["mode"])
        state, plan, windows, k = res.state, res.plan, res.windows, res.good.k
        budget = budget_pes(k, gamma, zeta)
        extra = {"k": k, "good_indices": list(res.good.indices),
                 "windows": [[w.phi_l, w.phi_r] for w in windows],
                 "plan": {"t": plan.t, "theta": plan.theta, "p0": plan.p0, "c_squared": plan.c_squared,
                          "final_probability": plan.final_probability, "mode": plan.mode}}
    else:
        ces = build_ces(a, int(cfg["u"]), pm)
        state, plan, windows = ces.prepare(), None, None
        budget = budget_ces(a.dim, gamma, zeta)
        extra = {}

    shots = budget.shots if str(cfg["shots"]) == "auto" else int(cfg["shots"])
    if shots < 1:
        raise ValueError("shots must be positive")
    counts = sample(state, state.layout.phase, shots, int(cfg["seed"]))
    estimates = estimate_eigenpairs(counts, plan, pm, windows, zeta)
    probs = register_probabilities(state, state.layout.phase)

    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "estimates.csv", "w", encoding="utf-8", newline="") as fh:
        write_estimates_csv(estimates, fh)
    _write_distribution(out, probs, pm)
    mem = memory_model(a.dim, a.sparsity, pm.m, walk=pm.kind == "walk")
    manifest = {
        "command": command,
        "config": cfg,
        "resolved": {"alpha": alpha, "shots": shots, "shots_budget": budget.shots, "delta": budget.delta,
                     "phase_map": pm.kind, "N": a.dim, "s": a.sparsity, "max_abs": a.max_abs, **extra},
        "seeds": {"sampling": int(cfg["seed"])},
        "inputs": {"matrix": {"path": str(cfg["matrix"]), "sha256": _sha256(cfg["matrix"])}},
        "memory": {"qubits": state.layout.total, "qubits_model": mem["qubits"],
                   "classical_words": a.storage_words()},
        "versions": _versions(),
    }
    _write_manifest(out, manifest)
    print(f"{command}: N={a.dim} qubits={state.layout.total} classical_words={a.storage_words()} "
          f"shots={shots} estimates={sum(1 for e in estimates if not e.is_leakage)}")
    return manifest


def _classical(cfg: dict) -> dict:
    if not cfg.get("matrix"):
        raise UsageError("--matrix is required")
    a = load_matrix(cfg["matrix"])
    u = int(cfg["u"])
    method = cfg["method"]
    rows: list[EigenpairEstimate] = []
    info: dict = {}
    if method == "power":
        res = power_method_topk(a, int(cfg["k"]), float(cfg["tol"]), int(cfg["max_iter"]), int(cfg["seed"]))
        if not res.converged:
            raise ConvergenceError(f"power method stopped after {len(res.pairs)} converged pairs")
        vals = [(p.value, p.vector, p.iterations, p.residual) for p in res.pairs]
        info = {"matvecs": res.matvecs}
    elif method == "lanczos":
        l = int(cfg["l"]) if cfg["l"] is not None else a.dim
        res = lanczos_extremal(a, l, int(cfg["seed"]))
        kk = min(int(cfg["k"]), res.steps)
        vals = [(res.ritz.eigenvalues[i], res.ritz_vectors[:, i], res.steps, float(res.residuals[i]))
                for i in range(kk)]
        info = {"steps": res.steps, "breakdown": res.breakdown, "model_cost": res.model_cost,
                "measured_cost": res.measured_cost}
    else:
        spec = qr_eigensolver(a, vectors=True)
        kk = min(int(cfg["k"]), a.dim)
        dense = a.to_dense()
        vals = [(spec.eigenvalues[i], spec.eigenvectors[:, i], 0,
                 float(np.linalg.norm(dense @ spec.eigenvectors[:, i] - spec.eigenvalues[i] * spec.eigenvectors[:, i])))
                for i in range(kk)]
    for lam, vec, its, resid in vals:
        rows.append(EigenpairEstimate(None, float(lam), float(abs(vec[u]) ** 2), float(resid), int(its), 1))

    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "estimates.csv", "w", encoding="utf-8", newline="") as fh:
        write_estimates_csv(rows, fh)
    manifest = {
        "command": "classical",
        "config": cfg,
        "resolved": {"N": a.dim, "s": a.sparsity, **info},
        "seeds": {"start_vector": int(cfg["seed"])},
        "inputs": {"matrix": {"path": str(cfg["matrix"]), "sha256": _sha256(cfg["matrix"])}},
        "memory": {"classical_words": a.storage_words(),
                   "qubits_equivalent": memory_model(a.dim, a.sparsity, 1)["qubits"] - 1},
        "versions": _versions(),
        "columns": "ci_halfwidth holds the residual norm, count the iteration count",
    }
    _write_manifest(out, manifest)
    print(f"classical/{method}: N={a.dim} classical_words={a.storage_words()} pairs={len(rows)}")
    return manifest


def _scaling(cfg: dict) -> dict:
    study = scaling_study(float(cfg["n_min"]), float(cfg["n_max"]), float(cfg["k"]), float(cfg["s"]),
                          cfg["curves"], int(cfg["points_per_octave"]))
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "curves.csv", "w", encoding="utf-8", newline="") as fh:
        write_curves_csv(study, fh)
    with open(out / "crossovers.csv", "w", encoding="utf-8", newline="") as fh:
        write_crossovers_csv(study, fh)
    with open(out / "metadata.json", "w", encoding="utf-8") as fh:
        write_metadata(study, fh)
    plot_study(study, out / "plot.svg")
    manifest = {"command": "scaling", "config": cfg, "versions": _versions(),
                "outputs": ["curves.csv", "crossovers.csv", "metadata.json", "plot.svg"]}
    _write_manifest(out, manifest)
    for name in study.metadata["curve_sets"]:
        for method, sl in study.slopes(name).items():
            print(f"{name:14s} {method:8s} slope {sl['slope']:.3f}  log-free {sl['slope_log_free']:.3f}")
    print(f"{len(study.crossovers)} crossovers")
    return manifest


def _verify(cfg: dict) -> int:
    suite = SUITES[cfg["suite"]]
    checks = suite() if cfg["m"] is None else suite(int(cfg["m"]))
    for c in checks:
        print(c.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERICAL


def _fail(code: int, exc: BaseException) -> int:
    json.dump({"error": type(exc).__name__, "message": str(exc), "exit_code": code}, sys.stderr)
    sys.stderr.write("\n")
    return code


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        cfg = _merge(args.command, args)
        if args.command in ("pes", "ces"):
            _quantum(args.command, cfg)
        elif args.command == "classical":
            _classical(cfg)
        elif args.command == "scaling":
            _scaling(cfg)
        else:
            return _verify(cfg)
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc)
    except (MatrixError, ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        return _fail(EXIT_VALIDATION, exc)
    except (ConvergenceError, RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
        return _fail(EXIT_NUMERICAL, exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
