import pytest

from reflekt.catalog import load_group, make_cyclic, make_imprimitive, resolve_normal_subgroup
from reflekt.group import NormalSubgroupHandle, normal_reflection_subgroups
from reflekt.series import BivarPoly, bivar_factor_check, expand_linear_factors
from reflekt.theorems import (
    coset_specialized_limit,
    product_side,
    sum_side,
    sum_side_coset_slice,
    verify_coset_identities,
    verify_derivative_recovery,
    verify_infinite_family,
    verify_main,
    verify_numerology,
    verify_orlik_solomon,
    verify_shephard_todd,
)


@pytest.fixture(scope="module")
def g15():
    return load_group("g15")


@pytest.fixture(scope="module")
def n12(g15):
    return resolve_normal_subgroup(g15, "g12")


def test_sum_side_cyclic_example():
    c6 = make_cyclic(6)
    n2 = resolve_normal_subgroup(c6, "C2")
    assert sum_side(c6, n2, 5) == BivarPoly({(1, 1): 1, (0, 1): 1})  # qt + t


def test_sum_side_trivial_subgroup_is_diagonal(g15):
    c6 = make_cyclic(6)
    triv = NormalSubgroupHandle.trivial(c6)
    got = sum_side(c6, triv, 1)
    # q^fix t^fix collapses to (qt)^fix: qt + 5 with exponent pairs (0, e_i)
    assert got == BivarPoly({(1, 1): 1, (0, 0): 5})
    pairs, rhs = product_side(c6, triv, 1)
    assert pairs == [(0, 5)]
    assert got == rhs


def test_main_table_rows(g15, n12):
    expected = {
        1: [(5, 6), (7, 16)],
        5: [(1, 6), (11, 8)],
        7: [(11, 6), (1, 16)],
        11: [(7, 6), (5, 8)],
        13: [(11, 0), (1, 22)],
        17: [(7, 0), (5, 14)],
        19: [(5, 0), (7, 22)],
        23: [(1, 0), (11, 14)],
    }
    for s, pairs in expected.items():
        report = verify_main(g15, n12, s)
        assert report.passed, f"s={s}: {report.lhs} != {report.rhs}"
        assert bivar_factor_check(sum_side(g15, n12, s), pairs), f"s={s}"


def test_orlik_solomon_and_shephard_todd(g15, n12):
    for s in (1, 5, 13):
        report = verify_orlik_solomon(g15, s, handle=n12)
        assert report.passed
    st = verify_shephard_todd(make_imprimitive(4, 2, 2))
    assert st.passed
    assert bivar_factor_check(
        sum_side(make_imprimitive(4, 2, 2),
                 NormalSubgroupHandle.trivial(make_imprimitive(4, 2, 2)),
                 1).eval_t(1),
        [(0, 3), (0, 3)])


def test_numerology_table_and_f4_style(g15, n12):
    row5 = verify_numerology(g15, n12, 5)
    assert row5.passed
    blocks = row5.extra["blocks"]
    assert [tuple(b["g_exponents"]) for b in blocks] == [(6,), (8,)]
    row13 = verify_numerology(g15, n12, 13)
    assert row13.passed


def test_coset_identities_cyclic_display():
    c6 = make_cyclic(6)
    n2 = resolve_normal_subgroup(c6, "C2")
    report = verify_coset_identities(c6, n2, 5)
    assert report.passed
    # the trivial coset carries qt + t, the others vanish
    slices = [sum_side_coset_slice(c6, n2, 5, cid).to_rational()
              for cid in range(3)]
    assert slices[0] == BivarPoly({(1, 1): 1, (0, 1): 1})
    assert slices[1].is_zero() and slices[2].is_zero()
    limit0 = coset_specialized_limit(c6, n2, 5, 0).to_rational()
    assert limit0 == BivarPoly({(1, 1): 1, (0, 1): 1})


def test_coset_identities_g15(g15, n12):
    for s in (1, 13):
        report = verify_coset_identities(g15, n12, s)
        assert report.passed, report.to_json()


def test_trivial_coset_contribution_shape(g15, n12):
    # t^r * prod (q + e_i^N) on the identity coset
    limit = coset_specialized_limit(g15, n12, 1, 0).to_rational()
    expected = (BivarPoly({(1, 0): 1, (0, 0): 5})
                * BivarPoly({(1, 0): 1, (0, 0): 7})
                * BivarPoly({(0, 2): 1}))
    assert limit == expected


def test_derivative_recovery(g15, n12):
    rep1 = verify_derivative_recovery(g15, n12, 1)
    assert rep1.passed
    assert rep1.extra["q1_recovers_quotient"]
    rep13 = verify_derivative_recovery(g15, n12, 13)
    assert rep13.passed
    assert "q1_slice" in rep13.extra
    # derivative recovery for row 1 gives (q+5)(q+7)
    derived = sum_side(g15, n12, 1).hasse_derivative_t(2)
    assert derived == BivarPoly({(2, 0): 1, (1, 0): 12, (0, 0): 35})


def test_infinite_family_g612():
    report = verify_infinite_family(6, 1, 2, 5)
    assert report.passed
    assert "exponents (1, 7)" in report.lhs


def test_infinite_family_g422_all_sigma():
    G = make_imprimitive(4, 2, 2)
    handles = normal_reflection_subgroups(G)
    for s in G.valid_sigma_exponents():
        if s % 2 == 0:
            continue
        report = verify_infinite_family(4, 2, 2, s, G=G, handles=handles)
        assert report.passed, report.to_json()


def test_main_theorem_g422_all_normals():
    G = make_imprimitive(4, 2, 2)
    for handle in normal_reflection_subgroups(G):
        report = verify_main(G, handle, 1)
        assert report.passed, report.to_json()


def test_classification_quotient_check():
    report = verify_infinite_family(6, 1, 2, 1)
    assert report.passed
    checks = report.extra["checks"]
    assert checks.get("quotient_iso_d2") is True
    assert checks.get("quotient_iso_d3") is True
    assert checks.get("quotient_iso_d6") is True
