import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from factories import random_algebra, random_pair, transport
from twocp.bimodule import (
    BimoduleHom,
    DaggerBimodule,
    associator_comparison,
    boundary_bimodules,
    check_bimodule,
    check_hom,
    check_topological_boundary,
    coequalizer_deviation,
    compose_bimodules,
    composite_idempotent,
    horizontal_compose_homs,
    identity_bimodule,
    identity_hom,
    require_bimodule,
    tensor_bimodules,
    trivial_bimodule,
    unitor_comparisons,
    vertical_compose_homs,
)
from twocp.frobenius import classical_structure, matrix_algebra
from twocp.groupoid import cyclic_group, groupoid_to_algebra
from twocp.linalg import (
    TwoCPError,
    VerificationError,
    dagger,
    idempotent_deviation,
    isometry_deviation,
    random_unitary,
)

seeds = st.integers(0, 2**32 - 1)


def unitary_dev(u):
    return max(np.abs(dagger(u) @ u - np.eye(u.shape[1])).max(),
               np.abs(u @ dagger(u) - np.eye(u.shape[0])).max())


def test_identity_bimodule_examples():
    assert np.array_equal(identity_bimodule(classical_structure(1)).action, [[1]])
    assert check_bimodule(identity_bimodule(classical_structure(2)))
    assert check_bimodule(identity_bimodule(matrix_algebra(2)))


def test_trivial_bimodule():
    assert check_bimodule(trivial_bimodule(3))


def test_scaled_action_breaks_unit_law():
    b = identity_bimodule(classical_structure(2))
    rep = check_bimodule(DaggerBimodule(b.left, b.right, 2, 2 * b.action))
    assert not rep.unital


def test_require_bimodule_names_failure():
    b = identity_bimodule(classical_structure(2))
    with pytest.raises(VerificationError, match="unital"):
        require_bimodule(DaggerBimodule(b.left, b.right, 2, 2 * b.action))


def test_boundary_bimodules():
    L, R = boundary_bimodules(classical_structure(1))
    assert np.array_equal(L.action, [[1]])
    for a in (classical_structure(3), matrix_algebra(2)):
        L, R = boundary_bimodules(a)
        assert check_bimodule(L) and check_bimodule(R)


def test_hom_examples(rng):
    b = identity_bimodule(classical_structure(2))
    assert check_hom(identity_hom(b))
    assert check_hom(BimoduleHom(b, b, np.zeros((2, 2))))
    bad = check_hom(BimoduleHom(b, b, rng.standard_normal((2, 2))))
    assert not bad and bad.deviation > 0


def test_hom_algebra_mismatch():
    a = identity_bimodule(classical_structure(2))
    b = identity_bimodule(matrix_algebra(2))
    with pytest.raises(TwoCPError):
        check_hom(BimoduleHom(a, trivial_bimodule(2), np.eye(2)))
    with pytest.raises(TwoCPError):
        check_hom(BimoduleHom(a, b, np.zeros((4, 2))))


def test_idempotent_trivial_and_rank():
    one = identity_bimodule(classical_structure(1))
    assert np.abs(composite_idempotent(one, one) - 1).max() < 1e-15
    for n in (2, 3, 4):
        b = identity_bimodule(classical_structure(n))
        assert np.isclose(np.trace(composite_idempotent(b, b)).real, n)


def test_boundary_composite_idempotent():
    a = classical_structure(2)
    L, R = boundary_bimodules(a)
    p = composite_idempotent(R, L)
    assert np.abs(p - a.comult @ a.mult).max() < 1e-12
    assert np.isclose(np.trace(p).real, 2)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_boundary_composite_dimension(n):
    L, R = boundary_bimodules(classical_structure(n))
    comp, i = compose_bimodules(R, L)
    assert comp.carrier_dim == n
    assert check_bimodule(comp)


def test_middle_mismatch():
    a = identity_bimodule(classical_structure(2))
    b = identity_bimodule(matrix_algebra(2))
    with pytest.raises(TwoCPError, match="middle algebras differ"):
        compose_bimodules(a, b)


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_random_pairs_compose(seed):
    r = np.random.default_rng(seed)
    m, n = random_pair(r)
    assert check_bimodule(m, 1e-9) and check_bimodule(n, 1e-9)
    p = composite_idempotent(m, n)
    assert idempotent_deviation(p) <= 1e-9
    comp, i = compose_bimodules(m, n)
    assert isometry_deviation(i) <= 1e-9
    assert check_bimodule(comp, 1e-8)
    assert coequalizer_deviation(m, n, i) <= 1e-9


@given(seeds)
@settings(max_examples=15, deadline=None)
def test_unit_laws(seed):
    r = np.random.default_rng(seed)
    m, _ = random_pair(r)
    comp, _ = compose_bimodules(identity_bimodule(m.left), m)
    assert comp.carrier_dim == m.carrier_dim
    lam, rho = unitor_comparisons(m)
    assert unitary_dev(lam) < 1e-9 and unitary_dev(rho) < 1e-9
    assert check_hom(BimoduleHom(comp, m, lam), 1e-8)


def test_associator_unitary(rng):
    a = random_algebra(rng)
    m = transport(identity_bimodule(a), random_unitary(a.dim, rng))
    L, R = boundary_bimodules(a)
    u = associator_comparison(R, m, L)
    assert unitary_dev(u) < 1e-9


def test_horizontal_identities(rng):
    m, n = random_pair(rng)
    comp, i = compose_bimodules(m, n)
    h = horizontal_compose_homs(identity_hom(m), identity_hom(n), i, i, comp, comp)
    assert np.abs(h.map - np.eye(comp.carrier_dim)).max() < 1e-9
    z = horizontal_compose_homs(BimoduleHom(m, m, np.zeros((m.carrier_dim,) * 2)),
                                identity_hom(n), i, i, comp, comp)
    assert not z.map.any()


def test_tensor_of_bimodules(rng):
    a = identity_bimodule(classical_structure(2))
    b = boundary_bimodules(matrix_algebra(2))[0]
    assert check_bimodule(tensor_bimodules(a, b), 1e-9)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_topological_boundary(n):
    rep = check_topological_boundary(classical_structure(n))
    assert rep and [v.name for v in rep.verdicts] == [
        "zigzag_right", "zigzag_left", "hole", "twisted_hole"]


def test_topological_boundary_needs_special():
    rep = check_topological_boundary(groupoid_to_algebra(cyclic_group(2)))
    assert not rep["hole"] and rep["zigzag_right"] is not None


def test_topological_boundary_rejects_noncommutative():
    with pytest.raises(TwoCPError):
        check_topological_boundary(matrix_algebra(2))


def test_vertical_compose(rng):
    b = identity_bimodule(classical_structure(3))
    d1, d2 = np.diag(rng.standard_normal(3)), np.diag(rng.standard_normal(3))
    f, g = BimoduleHom(b, b, d1), BimoduleHom(b, b, d2)
    h = vertical_compose_homs(g, f)
    assert np.allclose(h.map, d2 @ d1) and check_hom(h)


def test_json_roundtrip():
    b = boundary_bimodules(matrix_algebra(2))[1]
    back = DaggerBimodule.from_json(b.to_json())
    assert np.array_equal(back.action, b.action) and check_bimodule(back)
