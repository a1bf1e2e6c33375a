"""Random certified inputs for property tests."""
import numpy as np

from twocp.bimodule import DaggerBimodule, boundary_bimodules, identity_bimodule
from twocp.cpstar import CStarAlgebra
from twocp.frobenius import classical_structure, direct_sum_algebra, matrix_algebra
from twocp.linalg import dagger, direct_sum, kron_all, random_unitary
from twocp.matrix_model import AlgebraMatrix, from_matrix_of_algebras

CELLS = [(), (1,), (1, 1), (2,)]


def random_algebra(rng, max_dim=5):
    choices = [
        lambda: classical_structure(int(rng.integers(1, 4))),
        lambda: matrix_algebra(2),
        lambda: direct_sum_algebra([classical_structure(1), matrix_algebra(2)]),
    ]
    a = choices[int(rng.integers(len(choices)))]()
    if rng.random() < 0.5:
        a = a.conjugate(random_unitary(a.dim, rng))
    return a


def transport(b, u):
    """Move a bimodule along a unitary on its carrier."""
    act = u @ b.action @ kron_all([np.eye(b.left.dim), dagger(u), np.eye(b.right.dim)])
    return DaggerBimodule(b.left, b.right, b.carrier_dim, act)


def sum_bimodules(a, b):
    """Direct sum of two bimodules over the same algebras."""
    assert a.left is b.left and a.right is b.right
    A, B = a.tensor4, b.tensor4
    da, db = a.carrier_dim, b.carrier_dim
    t = np.zeros((da + db, a.left.dim, da + db, a.right.dim), dtype=complex)
    t[:da, :, :da, :] = A
    t[da:, :, da:, :] = B
    n = da + db
    return DaggerBimodule(a.left, a.right, n, t.reshape(n, a.left.dim * n * a.right.dim))


def left_module(d, rng):
    """Some bimodule ``? -> d`` (right action by ``d``)."""
    kind = int(rng.integers(3))
    b = identity_bimodule(d) if kind == 0 else boundary_bimodules(d)[1]
    if kind == 2:
        b = sum_bimodules(b, b)
    return transport(b, random_unitary(b.carrier_dim, rng))


def right_module(d, rng):
    """Some bimodule ``d -> ?`` (left action by ``d``)."""
    kind = int(rng.integers(3))
    b = identity_bimodule(d) if kind == 0 else boundary_bimodules(d)[0]
    if kind == 2:
        b = sum_bimodules(b, b)
    return transport(b, random_unitary(b.carrier_dim, rng))


def random_grid(rng, m, n, cells=CELLS):
    return AlgebraMatrix(tuple(
        tuple(CStarAlgebra(cells[int(rng.integers(len(cells)))]) for _ in range(n))
        for _ in range(m)))


def random_pair(rng):
    """Composable certified bimodules ``M: C -> D``, ``N: D -> E``."""
    if rng.random() < 0.3:
        j = int(rng.integers(1, 3))
        a = random_grid(rng, int(rng.integers(1, 3)), j)
        b = random_grid(rng, j, int(rng.integers(1, 3)))
        if a.total_dim and b.total_dim:
            return from_matrix_of_algebras(a), from_matrix_of_algebras(b)
    d = random_algebra(rng)
    return left_module(d, rng), right_module(d, rng)


def random_cp_grid(rng, grid):
    from twocp.cpstar import random_cp_map
    from twocp.matrix_model import CPMatrix
    return CPMatrix(grid, grid, tuple(tuple(random_cp_map(c, c, rng, 2) for c in row)
                                      for row in grid.cells))


__all__ = ["random_algebra", "transport", "sum_bimodules", "random_pair", "random_grid",
           "random_cp_grid", "direct_sum"]


def rotated_bell(ws, v=None):
    """Teleportation from the unitary error basis ``ws`` with the receiver's half rotated by ``v``.

    The receiver holds ``v W_i^dag psi`` after outcome ``i``, so the
    correction is conjugation by ``W_i v^dag``.
    """
    from twocp.cpstar import CStarAlgebra, conjugation
    from twocp.protocols import POVM, TeleportationData, measurement_from_povm
    d = ws[0].shape[0]
    v = np.eye(d) if v is None else v
    phi = np.eye(d, dtype=complex).reshape(d * d, 1) / np.sqrt(d)
    bells = [np.kron(w, np.eye(d)) @ phi for w in ws]
    povm = POVM(tuple(b @ dagger(b) for b in bells))
    sys_ = CStarAlgebra.matrix(d)
    res = np.kron(np.eye(d), v) @ phi
    return TeleportationData(d * d, sys_, res @ dagger(res), measurement_from_povm(povm, sys_.tensor(sys_)),
                             tuple(conjugation(w @ dagger(v)) for w in ws))


GROUP_TABLES = [
    [[0, 1], [1, 0]],
    [[(a + b) % 3 for b in range(3)] for a in range(3)],
    [[(a + b) % 4 for b in range(4)] for a in range(4)],
    [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]],
    # S3 with 0 = identity, 1, 2 rotations, 3, 4, 5 reflections
    [[0, 1, 2, 3, 4, 5], [1, 2, 0, 4, 5, 3], [2, 0, 1, 5, 3, 4],
     [3, 5, 4, 0, 2, 1], [4, 3, 5, 1, 0, 2], [5, 4, 3, 2, 1, 0]],
]


def random_solution(rng):
    """A random genuine solution of the teleportation equation."""
    from twocp.groupoid import group_from_table
    from twocp.protocols import one_time_pad, weyl_basis
    if rng.random() < 0.3:
        return one_time_pad(group_from_table(GROUP_TABLES[int(rng.integers(len(GROUP_TABLES)))]))
    d = int(rng.integers(2, 4))
    u = random_unitary(d, rng)
    ws = [np.exp(2j * np.pi * rng.random()) * u @ w @ dagger(u) for w in weyl_basis(d)]
    ws = [ws[k] for k in rng.permutation(len(ws))]
    return rotated_bell(ws, random_unitary(d, rng) if rng.random() < 0.5 else None)
