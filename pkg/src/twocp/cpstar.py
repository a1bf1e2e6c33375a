"""Finite-dimensional C*-algebras and completely positive maps between them.

An algebra ``M_{k_1} (+) ... (+) M_{k_m}`` is stored as its block sizes.  An
element is a coordinate vector in the matrix-units basis, block by block, each
block row-major (``e_ab`` of block ``i`` at ``offset_i + a * k_i + b``).  A
linear map is the matrix acting on these coordinates.  Complete positivity is
decided block-wise on Choi matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .frobenius import FrobeniusAlgebra, direct_sum_algebra, matrix_algebra
from .linalg import (
    DEFAULT_TOL,
    ShapeError,
    TwoCPError,
    VerificationError,
    as_matrix,
    canonical_phase,
    dagger,
    direct_sum,
    kron,
    matrix_from_json,
    matrix_to_json,
    max_abs,
    psd_deviation,
)


@dataclass(frozen=True)
class CStarAlgebra:
    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(k) for k in self.blocks)
        if any(k < 1 for k in blocks):
            raise ShapeError(f"block sizes must be >= 1, got {blocks}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def commutative(cls, n: int) -> "CStarAlgebra":
        return cls((1,) * n)

    @classmethod
    def matrix(cls, k: int) -> "CStarAlgebra":
        return cls((k,))

    @property
    def dim(self) -> int:
        return sum(k * k for k in self.blocks)

    @property
    def hilbert_dim(self) -> int:
        return sum(self.blocks)

    @property
    def is_commutative(self) -> bool:
        return all(k == 1 for k in self.blocks)

    @property
    def offsets(self) -> list[int]:
        out, off = [], 0
        for k in self.blocks:
            out.append(off)
            off += k * k
        return out

    def block_slice(self, i: int) -> slice:
        off = self.offsets[i]
        return slice(off, off + self.blocks[i] ** 2)

    def tensor(self, other: "CStarAlgebra") -> "CStarAlgebra":
        return CStarAlgebra(tuple(k * l for k in self.blocks for l in other.blocks))

    def direct_sum(self, other: "CStarAlgebra") -> "CStarAlgebra":
        return CStarAlgebra(self.blocks + other.blocks)

    @cached_property
    def unit(self) -> np.ndarray:
        u = np.zeros((self.dim, 1), dtype=complex)
        for off, k in zip(self.offsets, self.blocks):
            for a in range(k):
                u[off + a * k + a, 0] = 1.0
        return u

    @cached_property
    def trace(self) -> np.ndarray:
        """The trace functional (row vector): sum of all block traces."""
        return self.unit.T.copy()

    @cached_property
    def product(self) -> np.ndarray:
        """The ordinary C*-algebra product as a ``dim x dim^2`` matrix."""
        d = self.dim
        out = np.zeros((d, d * d), dtype=complex)
        for off, k in zip(self.offsets, self.blocks):
            for a in range(k):
                for b in range(k):
                    for c in range(k):
                        out[off + a * k + c, (off + a * k + b) * d + off + b * k + c] = 1.0
        return out

    def frobenius(self) -> FrobeniusAlgebra:
        """The special dagger Frobenius algebra this object is in the CP* picture."""
        return direct_sum_algebra([matrix_algebra(k) for k in self.blocks])

    @cached_property
    def embedding(self) -> np.ndarray:
        """Isometry from coordinates to ``vec`` of block-diagonal ``K x K`` operators."""
        big = self.hilbert_dim
        out = np.zeros((big * big, self.dim), dtype=complex)
        h = 0
        for off, k in zip(self.offsets, self.blocks):
            for a in range(k):
                for b in range(k):
                    out[(h + a) * big + h + b, off + a * k + b] = 1.0
            h += k
        return out

    def to_operator(self, x) -> np.ndarray:
        """Element coordinates -> block-diagonal operator on ``C^hilbert_dim``."""
        big = self.hilbert_dim
        return (self.embedding @ as_matrix(x)).reshape(big, big)

    def from_operator(self, op) -> np.ndarray:
        """Compress an operator to the block diagonal and return coordinates."""
        return dagger(self.embedding) @ as_matrix(op).reshape(-1, 1)

    def to_json(self) -> dict:
        return {"blocks": list(self.blocks)}

    @classmethod
    def from_json(cls, obj) -> "CStarAlgebra":
        try:
            return cls(tuple(obj["blocks"]))
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed algebra: {exc}") from exc


def tensor_permutation(a: CStarAlgebra, b: CStarAlgebra) -> np.ndarray:
    """Permutation from Kronecker coordinates of ``a (x) b`` to block coordinates of ``a.tensor(b)``.

    Block ``(i, j)`` of the tensor algebra is ``M_{k_i l_j}`` with row index
    ``(a, c) -> a * l_j + c``.  For a commutative left factor the permutation
    is the identity.
    """
    t = a.tensor(b)
    perm = np.zeros((t.dim, a.dim * b.dim), dtype=complex)
    toff = iter(t.offsets)
    for oi, k in zip(a.offsets, a.blocks):
        for oj, l in zip(b.offsets, b.blocks):
            base = next(toff)
            kl = k * l
            for x in range(k):
                for y in range(k):
                    for u in range(l):
                        for v in range(l):
                            src = (oi + x * k + y) * b.dim + oj + u * l + v
                            dst = base + (x * l + u) * kl + (y * l + v)
                            perm[dst, src] = 1.0
    return perm


@dataclass(frozen=True, eq=False)
class CPMap:
    """Linear map ``dom -> cod`` on element coordinates (``cod.dim x dom.dim``)."""

    dom: CStarAlgebra
    cod: CStarAlgebra
    map: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.map, dtype=complex)
        if m.shape != (self.cod.dim, self.dom.dim):
            raise ShapeError(f"map must be {(self.cod.dim, self.dom.dim)}, got {m.shape}")
        object.__setattr__(self, "map", m)

    def __call__(self, x) -> np.ndarray:
        return self.map @ as_matrix(x)

    def component(self, i: int, j: int) -> np.ndarray:
        """Restriction to dom block ``i`` followed by projection on cod block ``j``."""
        return self.map[self.cod.block_slice(j), self.dom.block_slice(i)]

    def to_json(self) -> dict:
        return {"dom": self.dom.to_json(), "cod": self.cod.to_json(), "map": matrix_to_json(self.map)}

    @classmethod
    def from_json(cls, obj) -> "CPMap":
        try:
            return cls(CStarAlgebra.from_json(obj["dom"]), CStarAlgebra.from_json(obj["cod"]),
                       matrix_from_json(obj["map"]))
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed CP map: {exc}") from exc


@dataclass(frozen=True)
class ChoiBlock:
    i: int
    j: int
    choi: np.ndarray


def choi_blocks(f: CPMap) -> list[ChoiBlock]:
    """Choi matrix ``sum_ab e_ab (x) f_ji(e_ab)`` of every block component."""
    out = []
    for i, k in enumerate(f.dom.blocks):
        for j, l in enumerate(f.cod.blocks):
            comp = f.component(i, j).reshape(l, l, k, k)  # [c, d, a, b]
            choi = comp.transpose(2, 0, 3, 1).reshape(k * l, k * l)
            out.append(ChoiBlock(i, j, choi))
    return out


@dataclass(frozen=True)
class CPReport:
    passed: bool
    deviation: float
    min_eigenvalue: float
    worst_block: tuple[int, int] | None

    def __bool__(self) -> bool:
        return self.passed


def is_completely_positive(f: CPMap, tol: float = DEFAULT_TOL) -> CPReport:
    worst, worst_dev, lowest = None, 0.0, np.inf
    for blk in choi_blocks(f):
        if blk.choi.size == 0:
            continue
        dev = psd_deviation(blk.choi, tol)
        lo = float(np.linalg.eigvalsh((blk.choi + dagger(blk.choi)) / 2)[0])
        lowest = min(lowest, lo)
        if worst is None or dev > worst_dev:
            worst, worst_dev = (blk.i, blk.j), dev
    if not np.isfinite(lowest):
        lowest = 0.0
    return CPReport(worst_dev <= tol, worst_dev, lowest, worst)


@dataclass(frozen=True)
class CPWitness:
    """Factorisation ``choi_ij = g_ij^dag g_ij`` for each block pair.

    ``g`` stacks the per-block factors block-diagonally: its rows index the
    ancilla (one per retained Choi eigenvector), its columns run over
    ``dom block (x) cod block`` coordinates in :func:`choi_blocks` order.
    ``kraus`` holds the same data as operators ``K: C^{k_i} -> C^{l_j}``.
    """

    g: np.ndarray
    kraus: list[tuple[int, int, np.ndarray]]
    dropped: list[float] = field(default_factory=list)

    @property
    def ancilla_dim(self) -> int:
        return self.g.shape[0]


def cp_witness(f: CPMap, tol: float = DEFAULT_TOL) -> CPWitness:
    report = is_completely_positive(f, tol)
    if not report:
        raise VerificationError(
            f"map is not completely positive: Choi eigenvalue {report.min_eigenvalue:.3g} "
            f"in block {report.worst_block}",
            report.deviation,
        )
    factors, kraus, dropped = [], [], []
    for blk in choi_blocks(f):
        k, l = f.dom.blocks[blk.i], f.cod.blocks[blk.j]
        vals, vecs = np.linalg.eigh((blk.choi + dagger(blk.choi)) / 2)
        rows = []
        for lam, v in zip(vals, vecs.T):
            if lam <= tol:
                dropped.append(float(lam))
                continue
            v = canonical_phase(v, tol)
            rows.append(np.sqrt(lam) * v.conj())
            kraus.append((blk.i, blk.j, np.sqrt(lam) * v.reshape(k, l).T))
        factors.append(np.array(rows).reshape(len(rows), k * l))
    return CPWitness(direct_sum(factors), kraus, dropped)


def map_from_kraus(dom: CStarAlgebra, cod: CStarAlgebra, kraus) -> CPMap:
    """Build ``x -> sum K x K^dag`` blockwise from ``(i, j, K)`` triples."""
    m = np.zeros((cod.dim, dom.dim), dtype=complex)
    for i, j, op in kraus:
        op = as_matrix(op)
        if op.shape != (cod.blocks[j], dom.blocks[i]):
            raise ShapeError(f"Kraus operator for blocks ({i},{j}) has shape {op.shape}")
        m[cod.block_slice(j), dom.block_slice(i)] += kron(op, op.conj())
    return CPMap(dom, cod, m)


def reconstruct(w: CPWitness, dom: CStarAlgebra, cod: CStarAlgebra) -> CPMap:
    """Rebuild the map a witness was extracted from."""
    return map_from_kraus(dom, cod, w.kraus)


def identity_cp(a: CStarAlgebra) -> CPMap:
    return CPMap(a, a, np.eye(a.dim, dtype=complex))


def compose_cp(g: CPMap, f: CPMap) -> CPMap:
    """``g after f``."""
    if f.cod != g.dom:
        raise ShapeError(f"cannot compose: {f.cod} != {g.dom}")
    return CPMap(f.dom, g.cod, g.map @ f.map)


def dagger_cp(f: CPMap) -> CPMap:
    return CPMap(f.cod, f.dom, dagger(f.map))


def tensor_cp(f: CPMap, g: CPMap) -> CPMap:
    pd = tensor_permutation(f.dom, g.dom)
    pc = tensor_permutation(f.cod, g.cod)
    return CPMap(f.dom.tensor(g.dom), f.cod.tensor(g.cod), pc @ kron(f.map, g.map) @ pd.T)


def direct_sum_cp(maps: list[CPMap]) -> CPMap:
    dom = CStarAlgebra(tuple(b for f in maps for b in f.dom.blocks))
    cod = CStarAlgebra(tuple(b for f in maps for b in f.cod.blocks))
    return CPMap(dom, cod, direct_sum([f.map for f in maps]))


def entrywise_positive(f: CPMap, tol: float = DEFAULT_TOL) -> bool:
    """CP test for maps between commutative algebras: nonnegative real entries."""
    if not (f.dom.is_commutative and f.cod.is_commutative):
        raise TwoCPError("entrywise positivity is only meaningful between commutative algebras")
    m = f.map
    return bool(m.size == 0 or (np.min(m.real) >= -tol and max_abs(m.imag) <= tol))


def trace_preservation_deviation(f: CPMap) -> float:
    return max_abs(f.cod.trace @ f.map - f.dom.trace)


def conjugation(u) -> CPMap:
    """``x -> u x u^dag`` on a single matrix block."""
    u = as_matrix(u)
    a = CStarAlgebra.matrix(u.shape[0])
    return map_from_kraus(a, a, [(0, 0, u)])


def permutation_map(perm: list[int]) -> CPMap:
    """Coordinate permutation ``e_x -> e_perm[x]`` of a commutative algebra."""
    n = len(perm)
    m = np.zeros((n, n), dtype=complex)
    for x, y in enumerate(perm):
        m[y, x] = 1.0
    a = CStarAlgebra.commutative(n)
    return CPMap(a, a, m)


def random_cp_map(dom: CStarAlgebra, cod: CStarAlgebra, rng: np.random.Generator,
                  max_kraus: int = 3) -> CPMap:
    kraus = []
    for i, k in enumerate(dom.blocks):
        for j, l in enumerate(cod.blocks):
            for _ in range(int(rng.integers(0, max_kraus + 1))):
                op = rng.standard_normal((l, k)) + 1j * rng.standard_normal((l, k))
                kraus.append((i, j, op))
    return map_from_kraus(dom, cod, kraus)
