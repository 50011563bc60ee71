"""Hermitian input matrices, a dense eigendecomposition oracle and on-grid test matrices."""
from __future__ import annotations

import io
import json
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.io
import scipy.sparse

HERMITIAN_TOL = 1e-12
ORACLE_MAX_DIM = 4096


class MatrixError(ValueError):
    """Raised for malformed or non-Hermitian matrix input."""


@dataclass(frozen=True)
class SparseHermitian:
    """A Hermitian matrix stored as unordered (row, col, value) triples.

    Both triangles are stored explicitly; ``rows`` is sorted so that the
    entries of row ``u`` form a contiguous slice given by ``row_ptr``.
    """

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    row_ptr: np.ndarray = field(repr=False)

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    @property
    def sparsity(self) -> int:
        """Maximum number of nonzeros in any row (the ``s`` of s-sparse)."""
        if self.nnz == 0:
            return 0
        return int(np.diff(self.row_ptr).max())

    @property
    def max_abs(self) -> float:
        if self.nnz == 0:
            return 0.0
        return float(np.abs(self.values).max())

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0))

    def entries(self) -> list[tuple[int, int, complex]]:
        return [(int(r), int(c), complex(v)) for r, c, v in zip(self.rows, self.cols, self.values)]

    def row(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.row_ptr[u], self.row_ptr[u + 1]
        return self.cols[lo:hi], self.values[lo:hi]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        out[self.rows, self.cols] = self.values
        return out

    def to_csr(self) -> scipy.sparse.csr_matrix:
        return scipy.sparse.csr_matrix((self.values, (self.rows, self.cols)), shape=(self.dim, self.dim))

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.to_csr() @ x

    def storage_words(self) -> int:
        """Words a CSR copy of the matrix occupies: values, column indices and row pointers."""
        return 2 * self.nnz + self.dim + 1


def from_triples(dim: int, triples: Iterable[Sequence]) -> SparseHermitian:
    """Build a validated :class:`SparseHermitian` from ``(row, col, value)`` triples.

    Entries whose mirror is absent are mirrored with the conjugate value.
    Entries given on both sides must agree to within ``HERMITIAN_TOL``.
    """
    if dim < 1:
        raise MatrixError(f"dimension must be positive, got {dim}")
    given: dict[tuple[int, int], complex] = {}
    for t in triples:
        r, c, v = int(t[0]), int(t[1]), complex(t[2])
        if not (0 <= r < dim and 0 <= c < dim):
            raise MatrixError(f"index ({r}, {c}) out of range for dimension {dim}")
        if (r, c) in given:
            raise MatrixError(f"duplicate entry ({r}, {c})")
        given[(r, c)] = v

    full: dict[tuple[int, int], complex] = {}
    for (r, c), v in given.items():
        if r == c:
            if abs(v.imag) > HERMITIAN_TOL:
                raise MatrixError(f"diagonal entry ({r}, {r}) has imaginary part {v.imag}")
            full[(r, r)] = complex(v.real, 0.0)
            continue
        mirror = given.get((c, r))
        if mirror is not None and abs(mirror - v.conjugate()) > HERMITIAN_TOL:
            raise MatrixError(f"entries ({r}, {c}) and ({c}, {r}) are not conjugate")
        # lower triangle is authoritative when both halves are present
        if mirror is not None and r < c:
            continue
        full[(r, c)] = v
        full[(c, r)] = v.conjugate()

    keys = sorted(full)
    rows = np.array([k[0] for k in keys], dtype=np.int64)
    cols = np.array([k[1] for k in keys], dtype=np.int64)
    values = np.array([full[k] for k in keys], dtype=complex)
    row_ptr = np.searchsorted(rows, np.arange(dim + 1), side="left").astype(np.int64)
    return SparseHermitian(dim, rows, cols, values, row_ptr)


def from_dense(a: np.ndarray, atol: float = 0.0) -> SparseHermitian:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise MatrixError(f"matrix must be square, got shape {a.shape}")
    if np.abs(a - a.conj().T).max(initial=0.0) > HERMITIAN_TOL * max(1.0, np.abs(a).max(initial=0.0)):
        raise MatrixError("matrix is not Hermitian")
    r, c = np.nonzero(np.abs(np.tril(a)) > atol)
    return from_triples(a.shape[0], zip(r, c, a[r, c]))


def load_matrix(source) -> SparseHermitian:
    """Read a matrix from a Matrix Market stream/path or the JSON triple format.

    The JSON form is ``{"dim": N, "entries": [[u, v, re, im], ...]}``; the
    imaginary part may be omitted.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")

    if text.lstrip().startswith("%%MatrixMarket"):
        return _load_mtx(text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixError(f"unrecognized matrix format: {exc}") from None
    dim = int(doc["dim"])
    triples = []
    for e in doc["entries"]:
        if len(e) not in (3, 4):
            raise MatrixError(f"bad JSON entry {e!r}")
        im = e[3] if len(e) == 4 else 0.0
        triples.append((e[0], e[1], complex(e[2], im)))
    return from_triples(dim, triples)


def _load_mtx(text: str) -> SparseHermitian:
    header = text.lstrip().splitlines()[0].lower().split()
    if len(header) < 5 or header[2] != "coordinate":
        raise MatrixError("only Matrix Market coordinate format is supported")
    symmetry = header[4]
    m = scipy.io.mmread(io.StringIO(text))
    if m.shape[0] != m.shape[1]:
        raise MatrixError(f"matrix must be square, got shape {m.shape}")
    coo = scipy.sparse.coo_matrix(m)
    if symmetry in ("symmetric", "hermitian"):
        # mmread expands the stored triangle; keep the lower half only
        keep = coo.row >= coo.col
        return from_triples(coo.shape[0], zip(coo.row[keep], coo.col[keep], coo.data[keep]))
    return from_triples(coo.shape[0], zip(coo.row, coo.col, coo.data))


def save_matrix(a: SparseHermitian, target, fmt: str | None = None) -> None:
    """Write ``a`` as JSON triples or Matrix Market (``fmt`` = ``"json"`` | ``"mtx"``)."""
    if fmt is None:
        fmt = "mtx" if str(target).endswith(".mtx") else "json"
    if fmt == "json":
        lower = a.rows >= a.cols
        doc = {
            "dim": a.dim,
            "entries": [
                [int(r), int(c), float(v.real), float(v.imag)]
                for r, c, v in zip(a.rows[lower], a.cols[lower], a.values[lower])
            ],
        }
        with open(target, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)
    elif fmt == "mtx":
        lower = a.rows >= a.cols
        data = a.values[lower] if not a.is_real else a.values[lower].real
        m = scipy.sparse.coo_matrix((data, (a.rows[lower], a.cols[lower])), shape=(a.dim, a.dim))
        scipy.io.mmwrite(target, m, symmetry="hermitian" if not a.is_real else "symmetric", precision=17)
    else:
        raise ValueError(f"unknown format {fmt!r}")


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source: str = "oracle"

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.size)

    def component_weights(self, u: int) -> np.ndarray:
        """|v_uj|^2 for every eigenvector j."""
        return np.abs(self.eigenvectors[u, :]) ** 2


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    vecs = vecs.copy()
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        idx = np.flatnonzero(np.abs(col) > 1e-12)[0]
        vecs[:, j] = col * (abs(col[idx]) / col[idx])
    return vecs


def eig_oracle(a: SparseHermitian | np.ndarray) -> Spectrum:
    """Dense ground-truth eigendecomposition (LAPACK ``eigh``).

    Ordering is by descending eigenvalue; every eigenvector is rotated so
    that its first non-negligible component is real and positive.
    """
    dense = a.to_dense() if isinstance(a, SparseHermitian) else np.asarray(a, dtype=complex)
    if dense.shape[0] > ORACLE_MAX_DIM:
        raise MatrixError(f"oracle limited to N <= {ORACLE_MAX_DIM}")
    w, v = np.linalg.eigh(dense)
    order = np.argsort(-w, kind="stable")
    return Spectrum(w[order], _fix_signs(v[:, order]), "oracle")


def random_orthogonal(dim: int, seed: int, complex_: bool = False) -> np.ndarray:
    """Haar-random orthogonal (or unitary) matrix from a seeded generator."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((dim, dim))
    if complex_:
        z = z + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def hadamard_basis(dim: int) -> np.ndarray:
    """Normalized Sylvester-Hadamard matrix; every |Q_uj|^2 equals 1/dim."""
    if dim & (dim - 1):
        raise MatrixError("Hadamard basis needs a power-of-two dimension")
    h = np.array([[1.0]])
    while h.shape[0] < dim:
        h = np.block([[h, h], [h, -h]])
    return h / np.sqrt(dim)


def basis_with_row(row: np.ndarray, u: int = 0, seed: int = 0) -> np.ndarray:
    """Seeded orthogonal basis whose ``u``-th row equals the unit vector ``row``.

    Lets a fixture prescribe the weights |v_uj|^2 seen from basis state u.
    """
    row = np.asarray(row, dtype=float)
    row = row / np.linalg.norm(row)
    dim = row.size
    e = np.zeros(dim)
    e[u] = 1.0
    w = e - row
    if np.linalg.norm(w) < 1e-14:
        h = np.eye(dim)
    else:
        w /= np.linalg.norm(w)
        h = np.eye(dim) - 2.0 * np.outer(w, w)
    # random rotation acting on everything but u keeps row u of the product intact
    others = [i for i in range(dim) if i != u]
    r = np.eye(dim)
    r[np.ix_(others, others)] = random_orthogonal(dim - 1, seed)
    return r @ h


def synthesize_on_grid(n: int, m: int, phase_map, phases: Sequence[int], basis_seed: int = 0,
                       basis: str | np.ndarray = "random") -> tuple[SparseHermitian, Spectrum]:
    """Matrix on 2**n whose eigenphases sit exactly on the m-bit phase grid.

    ``phases`` lists one grid integer per eigenvalue (repeats allowed).
    ``basis`` is ``"random"`` (seeded orthogonal), ``"identity"``,
    ``"hadamard"`` or an explicit orthogonal matrix.
    """
    dim = 2 ** n
    phases = [int(p) for p in phases]
    if len(phases) != dim:
        raise MatrixError(f"need {dim} phases, got {len(phases)}")
    if phase_map.m != m:
        raise MatrixError("phase map built for a different m")
    lam = np.array([phase_map.grid_to_lambda(p) for p in phases])

    if isinstance(basis, np.ndarray):
        q = basis
    elif basis == "random":
        q = random_orthogonal(dim, basis_seed)
    elif basis == "identity":
        q = np.eye(dim)
    elif basis == "hadamard":
        q = hadamard_basis(dim)
    else:
        raise ValueError(f"unknown basis {basis!r}")
    if np.abs(q.conj().T @ q - np.eye(dim)).max() > 1e-12:
        raise MatrixError("basis is not orthonormal")

    a = (q * lam) @ q.conj().T
    a = 0.5 * (a + a.conj().T)
    a[np.abs(a) < 1e-15 * max(1.0, np.abs(lam).max())] = 0.0
    matrix = from_dense(a)

    order = np.argsort(-lam, kind="stable")
    spec = Spectrum(lam[order], _fix_signs(q[:, order].astype(complex)), "synthetic")
    return matrix, spec
