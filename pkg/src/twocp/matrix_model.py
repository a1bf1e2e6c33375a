"""Concrete 2-category of matrices of C*-algebras and matrices of CP maps.

Objects are natural numbers, 1-morphisms ``m -> n`` are ``m x n`` grids of
finite-dimensional C*-algebras, 2-morphisms are grids of CP maps.  The
functions here translate grids to and from dagger bimodules over the
classical structures ``C^m``, ``C^n`` and implement the grid compositions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bimodule import BimoduleHom, DaggerBimodule, _same_algebra
from .cpstar import (
    CPMap,
    CStarAlgebra,
    compose_cp,
    direct_sum_cp,
    identity_cp,
    is_completely_positive,
    tensor_cp,
    tensor_permutation,
)
from .frobenius import classical_structure
from .linalg import (
    DEFAULT_TOL,
    ShapeError,
    TwoCPError,
    VerificationError,
    as_matrix,
    dagger,
    direct_sum,
    kron,
    null_space,
    split_projection,
)

ZERO = CStarAlgebra(())


@dataclass(frozen=True)
class AlgebraMatrix:
    cells: tuple[tuple[CStarAlgebra, ...], ...]

    def __post_init__(self):
        cells = tuple(tuple(row) for row in self.cells)
        if cells and len({len(r) for r in cells}) != 1:
            raise ShapeError("algebra grid must be rectangular")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_blocks(cls, grid) -> "AlgebraMatrix":
        """Build from nested lists of block-size lists, e.g. ``[[[1], [2]]]``."""
        return cls(tuple(tuple(CStarAlgebra(tuple(b)) for b in row) for row in grid))

    @classmethod
    def identity(cls, n: int) -> "AlgebraMatrix":
        one = CStarAlgebra((1,))
        return cls(tuple(tuple(one if i == j else ZERO for j in range(n)) for i in range(n)))

    @property
    def m(self) -> int:
        return len(self.cells)

    @property
    def n(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    @property
    def total_dim(self) -> int:
        return sum(c.dim for row in self.cells for c in row)

    def dims(self) -> list[list[int]]:
        return [[c.dim for c in row] for row in self.cells]

    def flat(self) -> list[CStarAlgebra]:
        return [c for row in self.cells for c in row]

    def to_json(self) -> list:
        return [[c.to_json() for c in row] for row in self.cells]

    @classmethod
    def from_json(cls, obj) -> "AlgebraMatrix":
        try:
            return cls(tuple(tuple(CStarAlgebra.from_json(c) for c in row) for row in obj))
        except TypeError as exc:
            raise ShapeError(f"malformed algebra grid: {exc}") from exc


@dataclass(frozen=True, eq=False)
class CPMatrix:
    source: AlgebraMatrix
    target: AlgebraMatrix
    cells: tuple[tuple[CPMap, ...], ...]

    def __post_init__(self):
        cells = tuple(tuple(row) for row in self.cells)
        object.__setattr__(self, "cells", cells)
        if (self.source.m, self.source.n) != (self.target.m, self.target.n):
            raise ShapeError("source and target grids differ in shape")
        for i, row in enumerate(cells):
            for j, f in enumerate(row):
                if f.dom != self.source.cells[i][j] or f.cod != self.target.cells[i][j]:
                    raise ShapeError(f"cell ({i},{j}) has the wrong domain or codomain")

    @classmethod
    def identity(cls, a: AlgebraMatrix) -> "CPMatrix":
        return cls(a, a, tuple(tuple(identity_cp(c) for c in row) for row in a.cells))

    def is_certified(self, tol: float = DEFAULT_TOL) -> bool:
        return all(is_completely_positive(f, tol) for row in self.cells for f in row)


def compose_matrix_model(a: AlgebraMatrix, b: AlgebraMatrix) -> AlgebraMatrix:
    """Cell ``(i, k)`` is ``(+)_j a_ij (x) b_jk``."""
    if a.n != b.m:
        raise ShapeError(f"inner dimensions differ: {a.m}x{a.n} then {b.m}x{b.n}")
    cells = []
    for i in range(a.m):
        row = []
        for k in range(b.n):
            blocks = ()
            for j in range(a.n):
                blocks += a.cells[i][j].tensor(b.cells[j][k]).blocks
            row.append(CStarAlgebra(blocks))
        cells.append(tuple(row))
    return AlgebraMatrix(tuple(cells))


def compose_matrix_homs(f: CPMatrix, g: CPMatrix) -> CPMatrix:
    """Horizontal composite: cell ``(i, k)`` is ``(+)_j f_ij (x) g_jk``."""
    if f.source.n != g.source.m:
        raise ShapeError("inner dimensions differ")
    cells = []
    for i in range(f.source.m):
        row = []
        for k in range(g.source.n):
            parts = [tensor_cp(f.cells[i][j], g.cells[j][k]) for j in range(f.source.n)]
            row.append(direct_sum_cp(parts))
        cells.append(tuple(row))
    return CPMatrix(compose_matrix_model(f.source, g.source),
                    compose_matrix_model(f.target, g.target), tuple(cells))


def vertical_compose(f: CPMatrix, g: CPMatrix) -> CPMatrix:
    """Cellwise ``g_ij after f_ij``."""
    if f.target != g.source:
        raise ShapeError("vertical composition needs f.target == g.source")
    cells = tuple(tuple(compose_cp(gc, fc) for fc, gc in zip(fr, gr))
                  for fr, gr in zip(f.cells, g.cells))
    return CPMatrix(f.source, g.target, cells)


def from_matrix_of_algebras(g: AlgebraMatrix) -> DaggerBimodule:
    """Bimodule on ``(+)_ij M_ij`` where ``|i> (x) a (x) |j>`` projects ``a`` onto ``M_ij``."""
    if g.m < 1 or g.n < 1:
        raise ShapeError("grid must have at least one row and one column")
    total = g.total_dim
    act = np.zeros((total, g.m, total, g.n), dtype=complex)
    off = 0
    for i, row in enumerate(g.cells):
        for j, cell in enumerate(row):
            for x in range(off, off + cell.dim):
                act[x, i, x, j] = 1.0
            off += cell.dim
    carrier = CStarAlgebra(tuple(b for c in g.flat() for b in c.blocks))
    return DaggerBimodule(
        classical_structure(g.m),
        classical_structure(g.n),
        total,
        act.reshape(total, g.m * total * g.n),
        carrier.product,
    )


def hom_from_cp_matrix(f: CPMatrix) -> BimoduleHom:
    """Block-diagonal bimodule homomorphism ``(+)_ij f_ij``."""
    mats = [c.map for row in f.cells for c in row]
    return BimoduleHom(from_matrix_of_algebras(f.source), from_matrix_of_algebras(f.target),
                       direct_sum(mats))


def recover_blocks(mult, tol: float = 1e-7) -> tuple[int, ...]:
    """Block sizes of a semisimple algebra given only its structure constants.

    The centre is computed as a null space; the left multiplication by a
    generic central element has one eigenvalue per block, with multiplicity
    ``k^2`` for a block ``M_k``.  Returned sorted ascending.
    """
    mult = as_matrix(mult)
    r = mult.shape[0]
    if r == 0:
        return ()
    eye = np.eye(r)
    rows = []
    for b in range(r):
        e = eye[:, [b]]
        rows.append(mult @ kron(eye, e) - mult @ kron(e, eye))
    centre = null_space(np.vstack(rows), tol)
    if centre.shape[1] == 0:
        raise VerificationError("algebra has trivial centre; not unital semisimple")
    rng = np.random.default_rng(12345)
    coeffs = rng.standard_normal(centre.shape[1]) + 1j * rng.standard_normal(centre.shape[1])
    z = centre @ coeffs.reshape(-1, 1)
    vals = np.linalg.eigvals(mult @ kron(z, eye))
    scale = max(1.0, float(np.max(np.abs(vals))))
    clusters: list[list[complex]] = []
    for v in vals:
        for cl in clusters:
            if abs(cl[0] - v) <= 1e-6 * scale:
                cl.append(v)
                break
        else:
            clusters.append([v])
    sizes = []
    for cl in clusters:
        k = round(np.sqrt(len(cl)))
        if k * k != len(cl):
            raise VerificationError(f"eigenvalue multiplicity {len(cl)} is not a square")
        sizes.append(k)
    if len(sizes) != centre.shape[1]:
        raise VerificationError("centre dimension disagrees with the number of blocks")
    return tuple(sorted(sizes))


def _is_standard_classical(a, n: int) -> bool:
    return _same_algebra(a, classical_structure(n))


def to_matrix_of_algebras(b: DaggerBimodule, tol: float = DEFAULT_TOL) -> AlgebraMatrix:
    """Read off the grid ``M_ij = image of act(|i> (x) - (x) |j>)``.

    Cell block structure comes from ``carrier_mult`` restricted to the image.
    Without a recorded carrier product the carrier is taken to be commutative.
    """
    m, n = b.left.dim, b.right.dim
    if not (_is_standard_classical(b.left, m) and _is_standard_classical(b.right, n)):
        raise TwoCPError("to_matrix_of_algebras needs classical structures on both sides")
    A = b.tensor4
    cells = []
    for i in range(m):
        row = []
        for j in range(n):
            p = A[:, i, :, j]
            iso = split_projection(p, tol)
            r = iso.shape[1]
            if r == 0:
                row.append(ZERO)
            elif b.carrier_mult is None:
                row.append(CStarAlgebra((1,) * r))
            else:
                induced = dagger(iso) @ b.carrier_mult @ kron(iso, iso)
                row.append(CStarAlgebra(recover_blocks(induced)))
        cells.append(tuple(row))
    return AlgebraMatrix(tuple(cells))


def concrete_embedding(a: AlgebraMatrix, b: AlgebraMatrix) -> np.ndarray:
    """Isometry from the carrier of ``compose_matrix_model(a, b)`` into ``M (x) N``.

    ``M``, ``N`` are the carriers of ``from_matrix_of_algebras`` of ``a``, ``b``.
    Each summand ``a_ij (x) b_jk`` lands on its Kronecker coordinates.
    """
    def offsets(g: AlgebraMatrix) -> list[list[int]]:
        out, off = [], 0
        for row in g.cells:
            r = []
            for c in row:
                r.append(off)
                off += c.dim
            out.append(r)
        return out

    oa, ob = offsets(a), offsets(b)
    dn = b.total_dim
    total = compose_matrix_model(a, b).total_dim
    emb = np.zeros((a.total_dim * dn, total), dtype=complex)
    col = 0
    for i in range(a.m):
        for k in range(b.n):
            for j in range(a.n):
                x, y = a.cells[i][j], b.cells[j][k]
                perm = tensor_permutation(x, y)  # kron coords -> block coords
                for src in range(x.dim * y.dim):
                    u, v = divmod(src, y.dim)
                    row = (oa[i][j] + u) * dn + ob[j][k] + v
                    emb[row, col:col + perm.shape[0]] += perm[:, src]
                col += perm.shape[0]
    return emb
