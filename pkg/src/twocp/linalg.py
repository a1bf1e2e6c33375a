"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Tensor products
follow the left-most-significant convention: the basis vector ``e_i (x) e_j``
of ``C^m (x) C^n`` sits at index ``i * n + j``, which is what ``np.kron``
produces.  Every multi-wire composite in the package relies on this.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


class TwoCPError(ValueError):
    """Base class for all errors raised by the package."""


class ShapeError(TwoCPError):
    """Inputs have inconsistent or unsupported shapes."""


class VerificationError(TwoCPError):
    """An input failed a mathematical certification."""

    def __init__(self, message: str, deviation: float = float("nan")):
        super().__init__(message)
        self.deviation = deviation


@dataclass(frozen=True)
class Verdict:
    """Outcome of a single equation check together with its residual."""

    name: str
    passed: bool
    deviation: float

    def __bool__(self) -> bool:
        return self.passed

    def as_dict(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "deviation": float(self.deviation)}


def max_abs(a) -> float:
    """Max-absolute-entry norm; zero for empty arrays."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def verdict(name: str, lhs, rhs, tol: float) -> Verdict:
    dev = max_abs(np.asarray(lhs) - np.asarray(rhs))
    return Verdict(name, dev <= tol, dev)


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ShapeError(f"expected a matrix, got array of shape {m.shape}")
    return m


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(factors: Iterable) -> np.ndarray:
    return reduce(kron, factors, np.ones((1, 1), dtype=complex))


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def direct_sum(mats: Sequence) -> np.ndarray:
    """Block-diagonal matrix; accepts zero-sized blocks."""
    mats = [as_matrix(m) if np.asarray(m).size else np.zeros(np.shape(m) or (0, 0), complex)
            for m in mats]
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=complex)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def swap(m: int, n: int) -> np.ndarray:
    """Permutation ``C^m (x) C^n -> C^n (x) C^m``."""
    out = np.zeros((m * n, m * n), dtype=complex)
    for i in range(m):
        for j in range(n):
            out[j * m + i, i * n + j] = 1.0
    return out


def basis_vector(n: int, i: int) -> np.ndarray:
    v = np.zeros((n, 1), dtype=complex)
    v[i, 0] = 1.0
    return v


def hermitian_deviation(a) -> float:
    a = as_matrix(a)
    return max_abs(a - a.conj().T)


def is_psd(a, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``a`` is Hermitian within ``tol`` and has no eigenvalue below ``-tol``."""
    return psd_deviation(a, tol) <= tol


def psd_deviation(a, tol: float = DEFAULT_TOL) -> float:
    """Worst of the Hermiticity defect and the most negative eigenvalue (clipped at 0)."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"is_psd needs a square matrix, got {a.shape}")
    if a.size == 0:
        return 0.0
    herm = hermitian_deviation(a)
    lo = float(np.linalg.eigvalsh((a + a.conj().T) / 2)[0])
    return max(herm, -lo, 0.0)


def canonical_phase(v: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Rescale a vector so its first entry of modulus > tol is real and positive."""
    idx = np.flatnonzero(np.abs(v) > tol)
    if idx.size == 0:
        return v
    z = v[idx[0]]
    return v * (abs(z) / z)


def idempotent_deviation(p) -> float:
    p = as_matrix(p)
    return max(max_abs(p @ p - p), hermitian_deviation(p))


def split_projection(p, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Split a dagger idempotent ``p`` as ``i @ i^dag`` with ``i^dag @ i = I``.

    The columns of the returned isometry are the eigenvectors of ``p`` with
    eigenvalue near 1, in ``eigh`` order, each phase-fixed by
    :func:`canonical_phase`.
    """
    p = as_matrix(p)
    n, m = p.shape
    if n != m:
        raise ShapeError(f"projection must be square, got {p.shape}")
    dev = idempotent_deviation(p)
    if dev > tol:
        raise VerificationError(f"not a dagger idempotent (max deviation {dev:.3g})", dev)
    tr = float(np.trace(p).real)
    rank = round(tr)
    if abs(tr - rank) > tol:
        raise VerificationError(f"trace {tr!r} is not within tol of an integer", abs(tr - rank))
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    vals, vecs = np.linalg.eigh((p + p.conj().T) / 2)
    keep = np.flatnonzero(vals > 0.5)
    if keep.size != rank:
        raise VerificationError(f"eigenvalue count {keep.size} disagrees with trace rank {rank}")
    cols = [canonical_phase(vecs[:, k], tol) for k in keep]
    if not cols:
        return np.zeros((n, 0), dtype=complex)
    return np.stack(cols, axis=1)


def isometry_deviation(i) -> float:
    i = as_matrix(i)
    return max_abs(i.conj().T @ i - np.eye(i.shape[1]))


def null_space(a, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (as columns) of the kernel of ``a``."""
    a = as_matrix(a)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(a)
    scale = max(1.0, s[0] if s.size else 1.0)
    rank = int(np.sum(s > tol * scale))
    return vh[rank:].conj().T


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# -- JSON encoding -----------------------------------------------------------

def matrix_to_json(a) -> dict:
    a = as_matrix(a)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in a.reshape(-1)],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ShapeError(f"malformed matrix object: {exc}") from exc
    if rows < 0 or cols < 0 or len(entries) != rows * cols:
        raise ShapeError(f"matrix has {len(entries)} entries, expected {rows}x{cols}")
    try:
        data = np.array([complex(float(re), float(im)) for re, im in entries], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"bad matrix entry: {exc}") from exc
    if not np.all(np.isfinite(data)):
        raise ShapeError("matrix entries must be finite")
    return data.reshape(rows, cols)
