import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from factories import random_cp_grid, random_grid
from oracles import composite_cell_dims
from twocp.bimodule import (
    check_bimodule,
    check_hom,
    compose_bimodules,
    horizontal_compose_homs,
    identity_bimodule,
    vertical_compose_homs,
)
from twocp.cpstar import CStarAlgebra
from twocp.frobenius import classical_structure, matrix_algebra
from twocp.linalg import ShapeError, TwoCPError, dagger
from twocp.matrix_model import (
    AlgebraMatrix,
    compose_matrix_homs,
    compose_matrix_model,
    concrete_embedding,
    from_matrix_of_algebras,
    hom_from_cp_matrix,
    recover_blocks,
    to_matrix_of_algebras,
    vertical_compose,
)

seeds = st.integers(0, 2**32 - 1)


def blocks(g):
    return [[tuple(sorted(c.blocks)) for c in row] for row in g.cells]


def test_identity_bimodule_grid():
    g = to_matrix_of_algebras(identity_bimodule(classical_structure(2)))
    assert g.dims() == [[1, 0], [0, 1]]
    assert blocks(g) == [[(1,), ()], [(), (1,)]]


def test_roundtrip_c_m2():
    g = AlgebraMatrix.from_blocks([[[1], [2]]])
    b = from_matrix_of_algebras(g)
    assert check_bimodule(b)
    assert blocks(to_matrix_of_algebras(b)) == [[(1,), (2,)]]


def test_all_zero_cells():
    g = AlgebraMatrix.from_blocks([[[], []], [[], []]])
    b = from_matrix_of_algebras(g)
    assert b.carrier_dim == 0
    assert to_matrix_of_algebras(b).dims() == [[0, 0], [0, 0]]


def test_compose_row_by_column():
    a = AlgebraMatrix.from_blocks([[[1], [2]]])
    b = AlgebraMatrix.from_blocks([[[2]], [[1]]])
    ab = compose_matrix_model(a, b)
    assert ab.dims() == [[8]]
    assert ab.cells[0][0].blocks == (2, 2)


def test_compose_with_identity_grid(rng):
    g = random_grid(rng, 2, 3)
    assert compose_matrix_model(AlgebraMatrix.identity(2), g).dims() == g.dims()
    assert compose_matrix_model(g, AlgebraMatrix.identity(3)).dims() == g.dims()


def test_compose_shape_mismatch(rng):
    with pytest.raises(ShapeError):
        compose_matrix_model(random_grid(rng, 2, 2), random_grid(rng, 3, 1))


def test_to_grid_needs_classical():
    with pytest.raises(TwoCPError):
        to_matrix_of_algebras(identity_bimodule(matrix_algebra(2)))


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_abstract_matches_concrete(seed):
    r = np.random.default_rng(seed)
    m, j, p = (int(x) for x in r.integers(1, 3, size=3))
    a, b = random_grid(r, m, j), random_grid(r, j, p)
    if not (a.total_dim and b.total_dim):
        return
    comp, i = compose_bimodules(from_matrix_of_algebras(a), from_matrix_of_algebras(b))
    ab = compose_matrix_model(a, b)
    assert ab.dims() == composite_cell_dims(a.dims(), b.dims())
    assert comp.carrier_dim == ab.total_dim
    assert blocks(to_matrix_of_algebras(comp)) == blocks(ab)
    if comp.carrier_dim:
        u = dagger(i) @ concrete_embedding(a, b)
        assert np.abs(dagger(u) @ u - np.eye(u.shape[0])).max() < 1e-9


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_hom_composites_agree(seed):
    r = np.random.default_rng(seed)
    a, b = random_grid(r, 2, 2), random_grid(r, 2, 1)
    if not (a.total_dim and b.total_dim):
        return
    f, g = random_cp_grid(r, a), random_cp_grid(r, b)
    hf, hg = hom_from_cp_matrix(f), hom_from_cp_matrix(g)
    assert check_hom(hf) and check_hom(hg)
    comp, i = compose_bimodules(hf.source, hg.source)
    abstract = horizontal_compose_homs(hf, hg, i, i, comp, comp)
    concrete = compose_matrix_homs(f, g)
    assert concrete.is_certified(1e-8)
    u = dagger(i) @ concrete_embedding(a, b)
    assert np.abs(abstract.map - u @ hom_from_cp_matrix(concrete).map @ dagger(u)).max() < 1e-9


def test_vertical_cellwise(rng):
    a = random_grid(rng, 2, 2)
    f, g = random_cp_grid(rng, a), random_cp_grid(rng, a)
    fg = vertical_compose(f, g)
    ref = vertical_compose_homs(hom_from_cp_matrix(g), hom_from_cp_matrix(f)).map
    assert np.abs(hom_from_cp_matrix(fg).map - ref).max() < 1e-12


@pytest.mark.parametrize("sizes", [(1,), (2,), (1, 1), (1, 2), (2, 2, 1), (3,)])
def test_recover_blocks(sizes, rng):
    from twocp.linalg import kron, random_unitary
    a = CStarAlgebra(sizes)
    u = random_unitary(a.dim, rng)
    mult = u @ a.product @ kron(dagger(u), dagger(u))
    assert recover_blocks(mult) == tuple(sorted(sizes))


def test_grid_json_roundtrip(rng):
    g = random_grid(rng, 2, 3)
    assert AlgebraMatrix.from_json(g.to_json()) == g


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_interchange_law(seed):
    r = np.random.default_rng(seed)
    a, b = random_grid(r, 2, 2), random_grid(r, 2, 2)
    if not (a.total_dim and b.total_dim):
        return
    f, f2 = (hom_from_cp_matrix(random_cp_grid(r, a)) for _ in range(2))
    g, g2 = (hom_from_cp_matrix(random_cp_grid(r, b)) for _ in range(2))
    comp, i = compose_bimodules(f.source, g.source)
    h = lambda x, y: horizontal_compose_homs(x, y, i, i, comp, comp)  # noqa: E731
    lhs = h(vertical_compose_homs(f2, f), vertical_compose_homs(g2, g)).map
    rhs = h(f2, g2).map @ h(f, g).map
    assert np.abs(lhs - rhs).max() <= 1e-9 * max(1.0, np.abs(lhs).max())
