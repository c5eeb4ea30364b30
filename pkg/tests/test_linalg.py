from fractions import Fraction

import pytest

from reflekt.cyclo import cyc_root, rational
from reflekt.linalg import (
    EigenMultiset,
    ExactnessError,
    char_poly_rev,
    conj_transpose,
    eigen_multiset,
    element_order,
    fix_dim,
    identity,
    is_monomial,
    is_reflection,
    is_unitary,
    kron,
    mat,
    mat_det,
    mat_inv,
    mat_mul,
    nullspace,
    rank,
    solve_in_span,
)

G12_GEN = mat([[0, cyc_root(8, 1)], [cyc_root(8, -1), 0]])


def diag(*entries):
    n = len(entries)
    return mat([[entries[i] if i == j else 0 for j in range(n)]
                for i in range(n)])


def test_det_examples():
    assert mat_det(identity(2)) == rational(1)
    assert mat_det(G12_GEN) == rational(-1)
    assert mat_det(diag(cyc_root(4, 1), cyc_root(4, 1))) == rational(-1)


def test_det_bareiss_matches_cofactor():
    rows = [[rational(Fraction((i * 7 + j * 3) % 5 - 2, 1 + (i + j) % 3))
             for j in range(6)] for i in range(6)]
    a = mat(rows)
    small = mat([r[:5] for r in rows[:5]])
    from reflekt.linalg import _det_bareiss, _det_cofactor
    assert _det_bareiss(small) == _det_cofactor(small)
    assert mat_det(a) == _det_cofactor(a)


def test_element_order():
    assert element_order(diag(cyc_root(6, 1))) == 6
    assert element_order(identity(3)) == 1
    assert element_order(G12_GEN) == 2


def test_eigen_multiset_examples():
    assert eigen_multiset(diag(cyc_root(6, -1))) == EigenMultiset(6, {5: 1})
    assert eigen_multiset(identity(3)) == EigenMultiset(1, {0: 3})
    assert eigen_multiset(G12_GEN) == EigenMultiset(2, {0: 1, 1: 1})


def test_eigen_multiset_char_poly_consistency():
    for g in (G12_GEN, diag(cyc_root(6, 1), cyc_root(6, 3)),
              mat_mul(G12_GEN, diag(cyc_root(4, 1), 1))):
        o = element_order(g)
        ms = eigen_multiset(g, order=o)
        poly = char_poly_rev(g)
        x = rational(Fraction(3, 7))
        lhs = sum((c * x ** k for k, c in enumerate(poly)), rational(0))
        rhs = rational(1)
        for j, m in ms.multiplicities.items():
            rhs = rhs * (rational(1) - cyc_root(o, j) * x) ** m
        assert lhs == rhs


def test_fix_dim_examples():
    assert fix_dim(identity(2)) == 2
    assert fix_dim(diag(cyc_root(4, 1), 1)) == 1
    assert fix_dim(G12_GEN) == 1


def test_is_reflection():
    assert not is_reflection(identity(2))
    assert is_reflection(diag(cyc_root(3, 1), 1))
    assert not is_reflection(diag(cyc_root(3, 1), cyc_root(3, 1)))
    assert is_reflection(G12_GEN)


def test_rank_and_nullspace():
    a = mat([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert rank(a) == 2
    ns = nullspace(a, 3)
    assert len(ns) == 1
    v = ns[0]
    for row in a:
        acc = rational(0)
        for x, y in zip(row, v):
            acc = acc + x * y
        assert acc == rational(0)


def test_inverse_and_unitary():
    inv = mat_inv(G12_GEN)
    assert mat_mul(inv, G12_GEN) == identity(2)
    assert is_unitary(G12_GEN)
    assert is_monomial(G12_GEN)
    u = mat([[1, 1], [1, -1]])
    assert not is_unitary(u)
    assert not is_monomial(u)


def test_conj_transpose_and_kron():
    g = diag(cyc_root(4, 1))
    assert conj_transpose(g) == diag(cyc_root(4, 3))
    k = kron(identity(2), G12_GEN)
    assert element_order(k) == 2
    assert fix_dim(k) == 2


def test_solve_in_span():
    basis = [(rational(1), rational(0), rational(1)),
             (rational(0), rational(1), rational(1))]
    target = (rational(2), rational(3), rational(5))
    coords = solve_in_span(basis, [target], 3)
    assert coords == [(rational(2), rational(3))]
    outside = (rational(1), rational(0), rational(0))
    assert solve_in_span(basis, [outside], 3) is None


def test_eigen_rejects_wrong_order():
    with pytest.raises(ExactnessError):
        eigen_multiset(diag(cyc_root(6, 1)), order=4)
