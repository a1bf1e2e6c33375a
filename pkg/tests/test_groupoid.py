import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import is_groupoid_table
from twocp.frobenius import FrobeniusAlgebra, check_frobenius, classical_structure
from twocp.groupoid import (
    FiniteGroupoid,
    GroupoidError,
    algebra_to_groupoid,
    cyclic_group,
    discrete_groupoid,
    disjoint_union,
    find_isomorphism,
    group_from_table,
    groupoid_to_algebra,
    is_commutative,
    pair_groupoid,
    validate_groupoid,
)

ZOO = [discrete_groupoid(1), discrete_groupoid(2), discrete_groupoid(3), cyclic_group(2),
       cyclic_group(3), disjoint_union(cyclic_group(2), discrete_groupoid(2)),
       disjoint_union(cyclic_group(2), cyclic_group(2)), cyclic_group(4),
       group_from_table([[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]),
       pair_groupoid(2), disjoint_union(cyclic_group(3), discrete_groupoid(1))]


def relabel(g, perm):
    """Same groupoid with morphism x renamed perm[x]."""
    n = g.n
    inv_perm = [0] * n
    for x, y in enumerate(perm):
        inv_perm[y] = x
    return FiniteGroupoid(
        g.objects,
        tuple(g.src[inv_perm[y]] for y in range(n)),
        tuple(g.tgt[inv_perm[y]] for y in range(n)),
        {(perm[a], perm[b]): perm[c] for (a, b), c in g.comp.items()},
        tuple(perm[e] for e in g.ids),
        tuple(perm[g.inv[inv_perm[y]]] for y in range(n)),
    )


@pytest.mark.parametrize("g", ZOO, ids=lambda g: f"{g.objects}obj-{g.n}arr")
def test_zoo_valid_and_matches_oracle(g):
    assert validate_groupoid(g)
    assert is_groupoid_table(g.objects, g.src, g.tgt, g.comp, g.ids, g.inv)


def test_corrupted_inverse_named():
    z = cyclic_group(2)
    bad = FiniteGroupoid(1, z.src, z.tgt, z.comp, z.ids, (0, 0))
    rep = validate_groupoid(bad)
    assert not rep and any("inv[1]" in v for v in rep.violations)


def test_broken_composition_detected():
    z = cyclic_group(3)
    comp = dict(z.comp)
    comp[(1, 1)] = 1
    assert not validate_groupoid(FiniteGroupoid(1, z.src, z.tgt, comp, z.ids, z.inv))


def test_point_is_classical_one():
    a = groupoid_to_algebra(discrete_groupoid(1))
    assert np.array_equal(a.mult, classical_structure(1).mult)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_discrete_is_classical(n):
    a = groupoid_to_algebra(discrete_groupoid(n))
    c = classical_structure(n)
    assert np.array_equal(a.mult, c.mult) and np.array_equal(a.unit, c.unit)
    back = algebra_to_groupoid(c)
    assert back.objects == n and find_isomorphism(back, discrete_groupoid(n)) is not None


def test_z2_table():
    a = groupoid_to_algebra(cyclic_group(2))
    ref = np.zeros((2, 4))
    e, g = 0, 1
    for k, (x, y) in [(e, (e, e)), (e, (g, g)), (g, (e, g)), (g, (g, e))]:
        ref[k, x * 2 + y] = 1
    assert np.array_equal(a.mult, ref)


def test_z2_roundtrip():
    back = algebra_to_groupoid(groupoid_to_algebra(cyclic_group(2)))
    assert back.objects == 1 and find_isomorphism(back, cyclic_group(2)) is not None


def test_half_entry_rejected():
    c = classical_structure(2)
    mult = c.mult.copy()
    mult[0, 1] = 0.5
    with pytest.raises(GroupoidError, match=r"mult\[0, 1\] = 0.5"):
        algebra_to_groupoid(FrobeniusAlgebra(2, mult, c.unit))


@pytest.mark.parametrize("g", ZOO, ids=lambda g: f"{g.objects}obj-{g.n}arr")
def test_roundtrip_laws(g):
    a = groupoid_to_algebra(g)
    assert set(np.unique(a.mult)) <= {0, 1} and set(np.unique(a.unit)) <= {0, 1}
    rep = check_frobenius(a)
    assert rep.associative and rep.unital and rep.frobenius
    assert bool(rep.commutative) == is_commutative(g)
    assert find_isomorphism(algebra_to_groupoid(a), g) is not None


def test_specialness_defect():
    # mult mult^dag is diagonal with entry |G_x| (arrows out of the target object)
    for g, defect in [(discrete_groupoid(3), 0), (cyclic_group(2), 1), (cyclic_group(3), 2),
                      (pair_groupoid(2), 1)]:
        a = groupoid_to_algebra(g)
        assert check_frobenius(a).special.deviation == defect


def test_specialness_matrix():
    a = groupoid_to_algebra(cyclic_group(2))
    assert np.array_equal(a.mult @ a.mult.T, 2 * np.eye(2))


@given(st.integers(0, 2**32 - 1), st.sampled_from(ZOO))
@settings(max_examples=40, deadline=None)
def test_isomorphism_finds_relabelling(seed, g):
    perm = [int(x) for x in np.random.default_rng(seed).permutation(g.n)]
    h = relabel(g, perm)
    assert validate_groupoid(h)
    phi = find_isomorphism(g, h)
    assert phi is not None
    for (a, b), c in g.comp.items():
        assert h.comp[(phi[a], phi[b])] == phi[c]


def test_non_isomorphic():
    assert find_isomorphism(cyclic_group(4), ZOO[8]) is None
    assert find_isomorphism(cyclic_group(2), discrete_groupoid(2)) is None


def test_exhaustive_small_groups():
    # every 0/1 table on {0,1,2} with identity 0 that is a group is Z3
    found = 0
    for rest in itertools.product(range(3), repeat=4):
        table = [[0, 1, 2], [1, rest[0], rest[1]], [2, rest[2], rest[3]]]
        try:
            g = group_from_table(table)
        except GroupoidError:
            continue
        if validate_groupoid(g):
            found += 1
            assert find_isomorphism(g, cyclic_group(3)) is not None
    assert found == 1


def test_json_roundtrip():
    g = disjoint_union(cyclic_group(2), discrete_groupoid(1))
    back = FiniteGroupoid.from_json(g.to_json())
    assert back == g


def test_invalid_groupoid_has_no_algebra():
    z = cyclic_group(2)
    with pytest.raises(GroupoidError):
        groupoid_to_algebra(FiniteGroupoid(1, z.src, z.tgt, z.comp, z.ids, (0, 0)))
