import random

import pytest

from reflekt.catalog import (
    load_group,
    make_cyclic,
    make_imprimitive,
    resolve_normal_subgroup,
)
from reflekt.cyclo import cyc_root
from reflekt.group import (
    NormalSubgroupHandle,
    NotNormal,
    ReflectionGroup,
    normal_reflection_subgroups,
)
from reflekt.linalg import mat, mat_mul


@pytest.fixture(scope="module")
def g12():
    return load_group("g12")


@pytest.fixture(scope="module")
def g15():
    return load_group("g15")


@pytest.fixture(scope="module")
def g422():
    return make_imprimitive(4, 2, 2)


def test_generate_orders(g12, g15, g422):
    assert make_cyclic(6).order == 6
    assert g12.order == 48
    assert g15.order == 288
    assert g422.order == 16
    assert make_imprimitive(2, 2, 2).order == 4


def test_product_oracle_matches_matrices(g422):
    rng = random.Random(1)
    for _ in range(50):
        i = rng.randrange(g422.order)
        j = rng.randrange(g422.order)
        k = g422.prod(i, j)
        assert g422.elements[k] == mat_mul(g422.elements[i], g422.elements[j])
    for i in range(g422.order):
        assert g422.prod(i, g422.inverse(i)) == 0


def test_reflections(g422):
    c6 = make_cyclic(6)
    assert len(c6.reflections()) == 5
    assert 0 not in c6.reflections()
    assert len(g422.reflections()) == 6


def test_reflection_classes_and_orbits(g422):
    c6 = make_cyclic(6)
    assert len(c6.hyperplane_orbits()) == 1
    assert len(c6.reflection_classes()) == 5  # abelian: singleton classes
    assert len(g422.reflection_classes()) == 3
    # conjugate reflections always share a hyperplane orbit
    orbits = g422.hyperplane_orbits()
    orbit_of = {i: oid for oid, orb in enumerate(orbits) for i in orb}
    for cls in g422.reflection_classes():
        assert len({orbit_of[i] for i in cls}) == 1


def test_normal_subgroups_cyclic():
    c6 = make_cyclic(6)
    handles = normal_reflection_subgroups(c6)
    assert sorted(h.order for h in handles) == [2, 3, 6]


def test_normal_subgroups_g422(g422):
    handles = normal_reflection_subgroups(g422)
    proper = [h for h in handles if h.order < g422.order]
    assert sorted(h.order for h in proper) == [4, 4, 4, 8, 8, 8]
    assert sorted(h.order for h in handles)[-1] == 16
    for h in handles:
        assert h.verify_normal_exhaustive()


def test_normal_subgroups_g15(g15, g12):
    handles = normal_reflection_subgroups(g15)
    proper = [h for h in handles if h.order < g15.order]
    assert sorted(h.order for h in proper) == [16, 48, 72, 96, 144, 144]
    g12_inside = resolve_normal_subgroup(g15, "g12")
    assert any(h.members == g12_inside.members for h in proper)


def test_quotients(g15):
    n = resolve_normal_subgroup(g15, "g12")
    assert n.quotient_order() == 6
    full = NormalSubgroupHandle.full(g15)
    assert full.quotient_order() == 1
    c6 = make_cyclic(6)
    c2 = resolve_normal_subgroup(c6, "C2")
    assert c2.quotient_order() == 3


def test_coset_tables(g15):
    n = resolve_normal_subgroup(g15, "g12")
    # representative is the least index in each coset
    for cid, rep in enumerate(n.coset_reps):
        elems = n.coset_elements(cid)
        assert min(elems) == rep
        assert all(n.coset_of[e] == cid for e in elems)
    # coset multiplication is a group of the right order
    seen = {n.coset_mul(1, b) for b in range(n.quotient_order())}
    assert len(seen) == n.quotient_order()


def test_non_normal_rejected(g422):
    # a single diagonal reflection generates a non-normal C2
    refl = g422.reflections()
    diag = next(i for i in refl
                if g422.elements[i][0][1] == g422.elements[i][1][0])
    with pytest.raises(NotNormal):
        NormalSubgroupHandle.from_generators(g422, [diag])


def test_generator_permutation_stability(g15):
    gens = list(g15.generators)
    permuted = ReflectionGroup([gens[2], gens[0], gens[1]], acts_on="V_dual")
    a = {h.member_key() for h in normal_reflection_subgroups(g15)}
    b = {h.member_key() for h in normal_reflection_subgroups(permuted)}
    assert a == b


def test_generated_by_all_reflections(g12, g422):
    for G in (g12, g422, make_cyclic(12)):
        assert len(G.subgroup_closure(G.reflections())) == G.order


def test_fix_is_class_function(g422):
    for cls in g422.conjugacy_classes():
        fixes = {g422.class_fix(g422.class_of(i)) for i in cls}
        assert len(fixes) == 1


def test_eigen_reconstruction_per_class(g12):
    from reflekt.linalg import char_poly_rev
    from reflekt.cyclo import rational
    from fractions import Fraction

    x = rational(Fraction(2, 5))
    for rep in g12.class_representatives():
        ms = g12.class_eigen(g12.class_of(rep))
        poly = char_poly_rev(g12.elements[rep])
        lhs = sum((c * x ** k for k, c in enumerate(poly)), rational(0))
        rhs = rational(1)
        for j, m in ms.multiplicities.items():
            rhs = rhs * (rational(1) - cyc_root(ms.order, j) * x) ** m
        assert lhs == rhs
        assert ms.total() == g12.rank


def test_exponent_and_sigma_range(g15):
    assert g15.working_conductor() == 24
    assert g15.valid_sigma_exponents() == [1, 5, 7, 11, 13, 17, 19, 23]
