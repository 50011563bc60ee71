"""Classical partial and complete eigensolvers used as baselines.

- power method with implicit deflation for the k dominant eigenpairs
- Lanczos with full reorthogonalization for extremal Ritz pairs
- Householder tridiagonalization + implicit Wilkinson-shift QR for full spectra
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from .matrix_core import SparseHermitian, Spectrum, _fix_signs


_TINY = np.finfo(float).tiny


class ConvergenceError(RuntimeError):
    pass


def _operator(a):
    if isinstance(a, SparseHermitian):
        return a.to_csr(), a.dim
    if scipy.sparse.issparse(a):
        return a.tocsr(), a.shape[0]
    a = np.asarray(a)
    return a, a.shape[0]


@dataclass
class Eigenpair:
    value: float
    vector: np.ndarray
    iterations: int = 0
    residual: float = 0.0
    converged: bool = True
    history: list[float] = field(default_factory=list, repr=False)

    def decay_ratios(self) -> np.ndarray:
        h = np.asarray(self.history)
        return h[1:] / h[:-1]


@dataclass
class PowerResult:
    pairs: list[Eigenpair]
    matvecs: int
    converged: bool


def power_method_topk(a, k: int, tol: float = 1e-10, max_iter: int = 10_000, seed: int = 0) -> PowerResult:
    """The k eigenpairs of largest magnitude by power iteration.

    Found pairs are deflated implicitly, y <- A x - sum_i lam_i v_i (v_i^H x),
    so the matrix itself is never modified. A stage stops once the relative
    Rayleigh-quotient change and the relative residual both drop to ``tol``.
    ``history`` holds the residual norm of every iteration.
    """
    op, n = _operator(a)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= N, got k={k}")
    rng = np.random.default_rng(seed)
    found: list[Eigenpair] = []
    matvecs = 0
    all_ok = True
    for _ in range(k):
        x = rng.standard_normal(n).astype(complex)
        for p in found:
            x -= p.vector * np.vdot(p.vector, x)
        x /= np.linalg.norm(x)
        rho_prev = None
        history = []
        converged = False
        it = 0
        for it in range(1, max_iter + 1):
            y = op @ x
            matvecs += 1
            for p in found:
                y -= p.value * p.vector * np.vdot(p.vector, x)
            rho = float(np.vdot(x, y).real)
            res = float(np.linalg.norm(y - rho * x))
            history.append(res)
            scale = max(abs(rho), np.finfo(float).tiny)
            small_change = rho_prev is None or abs(rho - rho_prev) <= tol * scale
            if res <= tol * scale and small_change:
                converged = True
                break
            rho_prev = rho
            ny = np.linalg.norm(y)
            if ny == 0.0:
                break
            x = y / ny
        true_res = float(np.linalg.norm(op @ x - rho * x))
        found.append(Eigenpair(rho, x, it, true_res, converged, history))
        if not converged:
            all_ok = False
            break
    return PowerResult(found, matvecs, all_ok)


@dataclass
class LanczosResult:
    alphas: np.ndarray
    betas: np.ndarray
    basis: np.ndarray
    ritz: Spectrum
    ritz_vectors: np.ndarray
    residuals: np.ndarray
    breakdown: bool
    model_cost: float
    measured_cost: float

    @property
    def steps(self) -> int:
        return self.alphas.size

    @property
    def T(self) -> np.ndarray:
        return np.diag(self.alphas) + np.diag(self.betas, 1) + np.diag(self.betas, -1)


def lanczos_extremal(a, l: int, seed: int = 0, reorthogonalize: bool = True) -> LanczosResult:
    """l-step Lanczos from a seeded random start, Ritz pairs via :func:`qr_eigensolver`.

    Full reorthogonalization against all previous Lanczos vectors is on by
    default. On breakdown (beta ~ 0) the Krylov space is invariant and the
    iteration stops early with ``breakdown=True``.
    """
    op, n = _operator(a)
    if not 1 <= l <= n:
        raise ValueError(f"Krylov dimension must satisfy 1 <= l <= N, got {l}")
    nnz = op.nnz if scipy.sparse.issparse(op) else n * n
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(n).astype(complex)
    q /= np.linalg.norm(q)
    basis = np.zeros((n, l), dtype=complex)
    alphas, betas = [], []
    basis[:, 0] = q
    beta, q_prev = 0.0, np.zeros(n, dtype=complex)
    breakdown = False
    flops = 0.0
    for j in range(l):
        w = op @ basis[:, j]
        flops += 2 * nnz
        alpha = float(np.vdot(basis[:, j], w).real)
        alphas.append(alpha)
        w = w - alpha * basis[:, j] - beta * q_prev
        if reorthogonalize:
            w -= basis[:, :j + 1] @ (basis[:, :j + 1].conj().T @ w)
            flops += 4 * n * (j + 1)
        beta = float(np.linalg.norm(w))
        if j == l - 1:
            break
        if beta <= 1e-12 * max(1.0, abs(alpha)):
            breakdown = True
            break
        betas.append(beta)
        q_prev = basis[:, j]
        basis[:, j + 1] = w / beta
    steps = len(alphas)
    basis = basis[:, :steps]
    alphas, betas = np.array(alphas), np.array(betas)
    t = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
    ritz = qr_eigensolver(t, vectors=True)
    y = basis @ ritz.eigenvectors
    res = np.linalg.norm(op @ y - y * ritz.eigenvalues, axis=0)
    sparsity = max(1, int(math.ceil(nnz / n)))
    return LanczosResult(alphas, betas, basis, ritz, y, res, breakdown,
                         model_cost=float(n * sparsity * steps), measured_cost=flops)


def tridiagonalize(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Householder reduction A = Q T Q^H with T real symmetric tridiagonal.

    Returns (diagonal, subdiagonal, Q). Complex Hermitian input is handled
    by a final diagonal phase rotation that makes the subdiagonal real.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        phase = x[0] / abs(x[0]) if abs(x[0]) > _TINY else 1.0
        v = x.copy()
        v[0] += phase * nx
        v /= np.linalg.norm(v)
        # H = I - 2 v v^H applied from both sides on the trailing block
        a[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ a[k + 1:, :])
        a[:, k + 1:] -= 2.0 * np.outer(a[:, k + 1:] @ v, v.conj())
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, v.conj())
    d = a.diagonal().real.copy()
    sub = a.diagonal(-1).copy()
    phases = np.ones(n, dtype=complex)
    for j in range(n - 1):
        phases[j + 1] = phases[j] * (sub[j] / abs(sub[j]) if abs(sub[j]) > _TINY else 1.0)
    e = np.abs(sub)
    return d, e, q * phases


def _wilkinson(a: float, b: float, c: float) -> float:
    delta = 0.5 * (a - c)
    if b == 0.0:
        return c
    sign = 1.0 if delta >= 0 else -1.0
    return c - b * b / (delta + sign * math.hypot(delta, b))


def tridiagonal_qr(d: np.ndarray, e: np.ndarray, z: np.ndarray | None = None, max_sweeps: int | None = None):
    """Implicit-shift symmetric QR on (d, e) in place; rotations accumulate into ``z``."""
    n = d.size
    eps = np.finfo(float).eps
    cap = 30 * n if max_sweeps is None else max_sweeps
    sweeps = 0
    hi = n - 1
    while hi > 0:
        if abs(e[hi - 1]) <= eps * (abs(d[hi - 1]) + abs(d[hi])):
            e[hi - 1] = 0.0
            hi -= 1
            continue
        lo = hi - 1
        while lo > 0 and abs(e[lo - 1]) > eps * (abs(d[lo - 1]) + abs(d[lo])):
            lo -= 1
        if lo > 0:
            e[lo - 1] = 0.0
        sweeps += 1
        if sweeps > cap:
            raise ConvergenceError(f"QR iteration did not converge within {cap} sweeps")

        mu = _wilkinson(d[hi - 1], e[hi - 1], d[hi])
        x, zz = d[lo] - mu, e[lo]
        for k in range(lo, hi):
            r = math.hypot(x, zz)
            c, s = (1.0, 0.0) if r == 0.0 else (x / r, zz / r)
            if k > lo:
                e[k - 1] = r
            a, b, cc = d[k], e[k], d[k + 1]
            d[k] = c * c * a + 2 * c * s * b + s * s * cc
            d[k + 1] = s * s * a - 2 * c * s * b + c * c * cc
            e[k] = c * s * (cc - a) + (c * c - s * s) * b
            if k < hi - 1:
                x, zz = e[k], s * e[k + 1]
                e[k + 1] *= c
            if z is not None:
                zk = z[:, k].copy()
                z[:, k] = c * zk + s * z[:, k + 1]
                z[:, k + 1] = -s * zk + c * z[:, k + 1]
    return d, sweeps


def qr_eigensolver(a, vectors: bool = False) -> Spectrum:
    """Full spectrum of a Hermitian matrix by tridiagonalization and implicit QR.

    Eigenvalues are returned in descending order. Without ``vectors`` the
    eigenvector field is an empty (N, 0) array.
    """
    if isinstance(a, SparseHermitian):
        a = a.to_dense()
    a = np.asarray(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"matrix must be square, got {a.shape}")
    if n == 1:
        vec = np.ones((1, 1), dtype=complex) if vectors else np.zeros((1, 0), dtype=complex)
        return Spectrum(np.array([float(np.real(a[0, 0]))]), vec, "qr")
    # unit scale keeps the shift arithmetic clear of underflow and overflow
    scale = float(np.abs(a).max())
    if scale == 0.0:
        scale = 1.0
    d, e, q = tridiagonalize(a / scale)
    z = np.eye(n) if vectors else None
    d, _ = tridiagonal_qr(d, e.copy(), z)
    d = d * scale
    order = np.argsort(-d, kind="stable")
    if not vectors:
        return Spectrum(d[order], np.zeros((n, 0), dtype=complex), "qr")
    return Spectrum(d[order], _fix_signs((q @ z)[:, order]), "qr")
