"""Explicit graded subspaces of symmetric powers: invariants of a normal
subgroup, the quotient module spanned by its fundamental invariants, and
the twisted Orlik-Solomon spaces.

Complements are taken with respect to the standard Hermitian form that
makes monomials orthogonal with multinomial weights (conjugation is the
Galois exponent -1).  All bundled generators are unitary for this form,
so those complements are stable under the whole parent group, and any
stable complement yields the same characters and gradings.

Monomial order: graded lex with x_1 > ... > x_r, fixed once.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .cyclo import Cyclotomic, rational
from .group import NormalSubgroupHandle
from .linalg import (
    ExactnessError,
    Matrix,
    eigen_multiset,
    is_monomial,
    nullspace,
    rref,
    solve_in_span,
)

_ZERO = rational(0)
_ONE = rational(1)


@lru_cache(maxsize=None)
def monomial_basis(r: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Exponent tuples of degree d, descending lexicographically."""
    if r == 1:
        return ((d,),)
    out = []
    for first in range(d, -1, -1):
        for rest in monomial_basis(r - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _basis_index(r: int, d: int) -> dict:
    return {m: i for i, m in enumerate(monomial_basis(r, d))}


@lru_cache(maxsize=None)
def monomial_weights(r: int, d: int) -> tuple[Fraction, ...]:
    """Hermitian weights <x^a, x^a> = prod a_i! on the degree-d monomials.

    These are the norms (up to the global 1/d!) of symmetrized tensors, the
    form for which a unitary change of variables stays unitary on every
    symmetric power.
    """
    out = []
    for m in monomial_basis(r, d):
        w = 1
        for e in m:
            w *= math.factorial(e)
        out.append(Fraction(w))
    return tuple(out)


def _poly_from_vec(vec, r: int, d: int) -> dict:
    basis = monomial_basis(r, d)
    return {basis[i]: c for i, c in enumerate(vec) if c}


def _vec_from_poly(poly: dict, r: int, d: int):
    index = _basis_index(r, d)
    out = [_ZERO] * len(index)
    for m, c in poly.items():
        out[index[m]] = c
    return tuple(out)


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            key = tuple(x + y for x, y in zip(ma, mb))
            cur = out.get(key)
            new = ca * cb if cur is None else cur + ca * cb
            if new:
                out[key] = new
            else:
                out.pop(key, None)
    return out


def apply_to_poly(g: Matrix, poly: dict) -> dict:
    """Image of a polynomial under the variable substitution given by g
    (column j of g is the image of the j-th variable)."""
    r = len(g)
    out: dict = {}
    for mono, coeff in poly.items():
        term = {(0,) * r: coeff}
        for j, e in enumerate(mono):
            if not e:
                continue
            col = {}
            for i in range(r):
                if g[i][j]:
                    key = tuple(1 if t == i else 0 for t in range(r))
                    col[key] = g[i][j]
            for _ in range(e):
                term = _poly_mul(term, col)
        for m, c in term.items():
            cur = out.get(m)
            new = c if cur is None else cur + c
            if new:
                out[m] = new
            else:
                out.pop(m, None)
    return out


def sym_power_action(g: Matrix, d: int) -> Matrix:
    """Matrix of g on the degree-d monomial basis (columns are images)."""
    r = len(g)
    basis = monomial_basis(r, d)
    index = _basis_index(r, d)
    cols = []
    for mono in basis:
        img = apply_to_poly(g, {mono: _ONE})
        col = [_ZERO] * len(basis)
        for m, c in img.items():
            col[index[m]] = c
        cols.append(col)
    return tuple(tuple(cols[j][i] for j in range(len(basis)))
                 for i in range(len(basis)))


def _sym_monomial_data(g: Matrix, d: int):
    """(target index, scalar) per basis monomial, for monomial g."""
    r = len(g)
    basis = monomial_basis(r, d)
    index = _basis_index(r, d)
    img_of_var = []
    for j in range(r):
        i = next(i for i in range(r) if g[i][j])
        img_of_var.append((i, g[i][j]))
    out = []
    for mono in basis:
        target = [0] * r
        scalar = _ONE
        for j, e in enumerate(mono):
            if e:
                i, c = img_of_var[j]
                target[i] += e
                scalar = scalar * c ** e
        out.append((index[tuple(target)], scalar))
    return out


# -- fixed spaces --------------------------------------------------------------


def _monomial_fixed_space(edge_lists, dim: int):
    """Joint fixed vectors of monomial operators given as edge lists
    [(target, scalar) per source index]."""
    val: list = [None] * dim
    comp: list = [-1] * dim
    basis = []
    for root in range(dim):
        if comp[root] >= 0:
            continue
        cid = len(basis)
        members = [root]
        comp[root] = cid
        val[root] = _ONE
        stack = [root]
        alive = True
        while stack:
            src = stack.pop()
            for edges in edge_lists:
                dst, scal = edges[src]
                want = scal * val[src]
                if comp[dst] < 0:
                    comp[dst] = cid
                    val[dst] = want
                    members.append(dst)
                    stack.append(dst)
                elif alive and val[dst] != want:
                    alive = False
        if alive:
            vec = [_ZERO] * dim
            for i in members:
                vec[i] = val[i]
            basis.append(tuple(vec))
        else:
            basis.append(None)
    return [v for v in basis if v is not None]


def _iterative_fixed_space(apply_fns, dim: int):
    """Joint fixed space of general operators, restricting step by step."""
    basis = None
    for apply_fn in apply_fns:
        if basis is None:
            rows = []
            images = [apply_fn(_unit(dim, i)) for i in range(dim)]
            for t in range(dim):
                rows.append([images[i][t] - (_ONE if i == t else _ZERO)
                             for i in range(dim)])
            coords = nullspace(rows, dim)
            basis = [tuple(v) for v in coords]
        else:
            k = len(basis)
            if not k:
                return []
            images = [apply_fn(v) for v in basis]
            diffs = [tuple(x - y for x, y in zip(img, v))
                     for img, v in zip(images, basis)]
            rows = [[diffs[i][t] for i in range(k)] for t in range(dim)]
            coords = nullspace(rows, k)
            basis = [_combine(basis, c, dim) for c in coords]
    if basis is None:
        basis = [_unit(dim, i) for i in range(dim)]
    return basis


def _unit(dim: int, i: int):
    return tuple(_ONE if t == i else _ZERO for t in range(dim))


def _combine(vectors, coords, dim: int):
    out = [_ZERO] * dim
    for c, v in zip(coords, vectors):
        if c:
            for t in range(dim):
                if v[t]:
                    out[t] = out[t] + c * v[t]
    return tuple(out)


def invariant_subspace(handle: NormalSubgroupHandle, d: int) -> list[tuple]:
    """Basis of the degree-d polynomials fixed by the subgroup.

    Fixed points of the generators are fixed points of the whole group, so
    only generator actions are intersected.  Results are cached on the
    handle and put in reduced echelon form for determinism.
    """
    key = ("inv", d)
    if key in handle.cache:
        return handle.cache[key]
    P = handle.parent
    r = P.rank
    gens = [P.elements[i] for i in handle.gen_indices]
    dim = len(monomial_basis(r, d))
    if all(is_monomial(g) for g in gens):
        edge_lists = [_sym_monomial_data(g, d) for g in gens]
        basis = _monomial_fixed_space(edge_lists, dim)
    else:
        fns = [_SymApplier(g, d) for g in gens]
        basis = _iterative_fixed_space(fns, dim)
    if basis:
        reduced, pivots = rref([list(v) for v in basis], dim)
        basis = [tuple(reduced[i]) for i in range(len(pivots))]
    handle.cache[key] = basis
    return basis


class _SymApplier:
    """Apply the degree-d symmetric-power action of g to coordinate vectors."""

    def __init__(self, g: Matrix, d: int):
        self.g = g
        self.d = d
        self.r = len(g)
        self._cols: dict[int, dict] = {}

    def __call__(self, vec):
        r, d = self.r, self.d
        basis = monomial_basis(r, d)
        index = _basis_index(r, d)
        out = [_ZERO] * len(basis)
        for i, c in enumerate(vec):
            if not c:
                continue
            col = self._cols.get(i)
            if col is None:
                col = apply_to_poly(self.g, {basis[i]: _ONE})
                self._cols[i] = col
            for m, v in col.items():
                t = index[m]
                out[t] = out[t] + c * v
        return tuple(out)


def invariant_ideal_span(handle: NormalSubgroupHandle, e: int) -> list[tuple]:
    """Spanning set (not reduced) of the degree-e slice of the ideal
    generated by positive-degree invariants of the subgroup."""
    key = ("ideal", e)
    if key in handle.cache:
        return handle.cache[key]
    r = handle.parent.rank
    out = []
    for k in range(1, e + 1):
        inv = invariant_subspace(handle, k)
        if not inv:
            continue
        for mono in monomial_basis(r, e - k):
            for w in inv:
                poly = _poly_from_vec(w, r, k)
                shifted = {tuple(a + b for a, b in zip(m, mono)): c
                           for m, c in poly.items()}
                out.append(_vec_from_poly(shifted, r, e))
    handle.cache[key] = out
    return out


def _orthogonal_constraint_rows(vectors, weights):
    """Rows whose kernel is the orthocomplement of the given vectors."""
    rows = []
    for w in vectors:
        rows.append([weights[t] * w[t].conjugate() for t in range(len(w))])
    return rows


def coinvariant_piece(handle: NormalSubgroupHandle, e: int,
                      degrees) -> list[tuple]:
    """Basis of the degree-e piece of the chosen coinvariant complement:
    the orthocomplement of the invariant ideal inside the symmetric power.

    The dimension is checked against the coefficient of q^e in
    prod (1 - q^d_i) / (1 - q)^rank, a hard failure on mismatch.
    """
    key = ("coinv", e)
    if key in handle.cache:
        return handle.cache[key]
    r = handle.parent.rank
    dim = len(monomial_basis(r, e))
    weights = monomial_weights(r, e)
    span = invariant_ideal_span(handle, e)
    if span:
        rows = _orthogonal_constraint_rows(span, weights)
        basis = nullspace(rows, dim)
    else:
        basis = [_unit(dim, i) for i in range(dim)]
    expected = coinvariant_hilbert_coefficient(degrees, r, e)
    if len(basis) != expected:
        raise ExactnessError(
            f"coinvariant piece at degree {e} has dimension {len(basis)}, "
            f"Hilbert series predicts {expected}")
    handle.cache[key] = basis
    return basis


def coinvariant_hilbert_coefficient(degrees, r: int, e: int) -> int:
    from .series import TruncSeries, geometric_series

    f = TruncSeries.one(e)
    for d in degrees:
        poly = [_ONE] + [_ZERO] * (e)
        if d <= e:
            poly[d] = -_ONE
        f = f * TruncSeries(e, poly)
    for _ in range(r):
        f = f * geometric_series(1, e)
    val = f.coeff(e).to_fraction()
    assert val.denominator == 1
    return int(val)


# -- graded spaces -------------------------------------------------------------


class GradedSpace:
    """Pieces of a graded space, each an explicit basis in ambient
    coordinates, with per-coset action matrices computed on demand."""

    def __init__(self, handle: NormalSubgroupHandle, pieces, kind: str,
                 sigma_exp: int = 1):
        self.handle = handle
        self.pieces = pieces  # list of (grade, basis list)
        self.kind = kind  # "quotient" or "os"
        self.sigma_exp = sigma_exp
        self._matrices: dict = {}

    def grades(self) -> list[int]:
        out = []
        for grade, basis in self.pieces:
            out.extend([grade] * len(basis))
        return sorted(out)

    def total_dim(self) -> int:
        return sum(len(b) for _, b in self.pieces)

    def _apply(self, grade: int, element_matrix: Matrix, vec):
        if self.kind == "quotient":
            return _SymApplier(element_matrix, grade)(vec)
        r = self.handle.parent.rank
        sym = _SymApplier(element_matrix, grade)
        twisted = tuple(tuple(x.galois(self.sigma_exp) if x else x
                              for x in row) for row in element_matrix)
        return _apply_tensor(sym, twisted, vec, r, grade)

    def coset_matrix(self, piece_idx: int, cid: int) -> Matrix:
        """Matrix of the coset action on one piece (columns are images)."""
        key = (piece_idx, cid)
        got = self._matrices.get(key)
        if got is None:
            grade, basis = self.pieces[piece_idx]
            P = self.handle.parent
            g = P.elements[self.handle.coset_reps[cid]]
            images = [self._apply(grade, g, v) for v in basis]
            dim = len(basis[0]) if basis else 0
            coords = solve_in_span(basis, images, dim)
            if coords is None:
                raise ExactnessError(
                    "piece is not stable under the coset action")
            got = tuple(tuple(coords[j][i] for j in range(len(basis)))
                        for i in range(len(basis)))
            self._matrices[key] = got
        return got

    def coset_trace(self, cid: int) -> Cyclotomic:
        total = _ZERO
        for pi in range(len(self.pieces)):
            m = self.coset_matrix(pi, cid)
            for i in range(len(m)):
                total = total + m[i][i]
        return total

    def piece_trace(self, piece_idx: int, cid: int) -> Cyclotomic:
        m = self.coset_matrix(piece_idx, cid)
        out = _ZERO
        for i in range(len(m)):
            out = out + m[i][i]
        return out

    def coset_fix(self, cid: int) -> int:
        from .linalg import fix_dim

        total = 0
        for pi in range(len(self.pieces)):
            m = self.coset_matrix(pi, cid)
            if m:
                total += fix_dim(m)
        return total

    def coset_eigen(self, cid: int):
        """(eigenvalue, grade) pairs over all pieces, exact roots of unity."""
        out = []
        for pi, (grade, basis) in enumerate(self.pieces):
            if not basis:
                continue
            m = self.coset_matrix(pi, cid)
            ms = eigen_multiset(m)
            for lam, mult in ms.pairs():
                out.extend([(lam, grade)] * mult)
        return out


def _apply_tensor(sym_applier, twist_matrix: Matrix, vec, r: int, grade: int):
    dim = len(monomial_basis(r, grade))
    out = [_ZERO] * (dim * r)
    for k in range(r):
        sub = vec[k::r]
        if not any(sub):
            continue
        moved = sym_applier(sub)
        for i in range(r):
            c = twist_matrix[i][k]
            if c:
                for t in range(dim):
                    if moved[t]:
                        out[t * r + i] = out[t * r + i] + c * moved[t]
    return tuple(out)


class QuotientModule(GradedSpace):
    """Span of the fundamental invariants of the subgroup, graded by their
    degree, with the quotient acting by coset representatives."""

    def __init__(self, handle, pieces, degrees):
        super().__init__(handle, pieces, kind="quotient")
        self.degrees = tuple(sorted(degrees))


class OSSpace(GradedSpace):
    """The twisted Orlik-Solomon space: subgroup-fixed vectors of
    (coinvariant piece) tensor (twisted dual), graded by exponent."""

    def __init__(self, handle, pieces, sigma_exp):
        super().__init__(handle, pieces, kind="os", sigma_exp=sigma_exp)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(self.grades())


def quotient_module(handle: NormalSubgroupHandle, degrees) -> QuotientModule:
    """Build the graded quotient module from the subgroup invariants.

    Each degree-d piece is the orthocomplement of the products of
    lower-degree invariants inside the degree-d invariants; its dimension
    must match the multiplicity of d among the degrees.
    """
    if "quotient_module" in handle.cache:
        return handle.cache["quotient_module"]
    r = handle.parent.rank
    mult: dict[int, int] = {}
    for d in degrees:
        mult[d] = mult.get(d, 0) + 1
    pieces = []
    for d in sorted(mult):
        inv = invariant_subspace(handle, d)
        dim = len(monomial_basis(r, d))
        weights = monomial_weights(r, d)
        products = []
        for j in range(1, d):
            left = invariant_subspace(handle, j)
            right = invariant_subspace(handle, d - j)
            for w1 in left:
                p1 = _poly_from_vec(w1, r, j)
                for w2 in right:
                    p2 = _poly_from_vec(w2, r, d - j)
                    products.append(_vec_from_poly(_poly_mul(p1, p2), r, d))
        if products:
            rows = _orthogonal_constraint_rows(products, weights)
            k = len(inv)
            cons = [[sum((row[t] * inv[j][t] for t in range(dim)
                          if inv[j][t] and row[t]), _ZERO)
                     for j in range(k)] for row in rows]
            coords = nullspace(cons, k)
            basis = [_combine(inv, c, dim) for c in coords]
        else:
            basis = list(inv)
        if len(basis) != mult[d]:
            raise ExactnessError(
                f"quotient piece at degree {d} has dimension {len(basis)}, "
                f"expected multiplicity {mult[d]}")
        pieces.append((d, basis))
    qm = QuotientModule(handle, pieces, degrees)
    handle.cache["quotient_module"] = qm
    return qm


def os_space(handle: NormalSubgroupHandle, sigma_exp: int,
             degrees) -> OSSpace:
    """Build the twisted Orlik-Solomon space for the subgroup.

    For e = 0, 1, 2, ... the subgroup-fixed part of
    (coinvariant piece at e) tensor (twisted dual space) is collected until
    the total dimension reaches the rank; the search is bounded by
    sum (d_i - 1), past which a shortfall is a hard failure.
    """
    eff = sigma_exp % handle.parent.conductor if handle.parent.conductor > 1 else 1
    key = ("os_space", eff)
    if key in handle.cache:
        return handle.cache[key]
    P = handle.parent
    r = P.rank
    bound = sum(d - 1 for d in degrees)
    pieces = []
    total = 0
    e = 0
    while total < r:
        if e > bound:
            raise ExactnessError(
                f"only {total} of {r} twisted fixed vectors found up to "
                f"degree {bound}")
        basis = _os_piece(handle, e, sigma_exp)
        if basis:
            pieces.append((e, basis))
            total += len(basis)
        e += 1
    if total != r:
        raise ExactnessError("twisted fixed space dimension overshot the rank")
    space = OSSpace(handle, pieces, sigma_exp)
    handle.cache[key] = space
    return space


def _os_piece(handle: NormalSubgroupHandle, e: int, sigma_exp: int):
    P = handle.parent
    r = P.rank
    gens = [P.elements[i] for i in handle.gen_indices]
    dim = len(monomial_basis(r, e))
    weights = monomial_weights(r, e)

    # fixed space of the subgroup on Sym^e tensor twisted-dual
    if gens and all(is_monomial(g) for g in gens):
        edge_lists = []
        for g in gens:
            sym_edges = _sym_monomial_data(g, e)
            img_of_var = []
            for j in range(r):
                i = next(i for i in range(r) if g[i][j])
                img_of_var.append((i, g[i][j].galois(sigma_exp)))
            edges = []
            for t in range(dim * r):
                mono_i, k = divmod(t, r)
                tgt_mono, s1 = sym_edges[mono_i]
                tgt_k, s2 = img_of_var[k]
                edges.append((tgt_mono * r + tgt_k, s1 * s2))
            edge_lists.append(edges)
        fixed = _monomial_fixed_space(edge_lists, dim * r)
    else:
        fns = []
        for g in gens:
            sym = _SymApplier(g, e)
            twisted = tuple(tuple(x.galois(sigma_exp) if x else x
                                  for x in row) for row in g)
            fns.append(lambda v, s=sym, t=twisted: _apply_tensor(s, t, v, r, e))
        fixed = _iterative_fixed_space(fns, dim * r)
    if not fixed:
        return []

    # intersect with (ideal slice tensor dual)^perp
    span = invariant_ideal_span(handle, e)
    if not span:
        basis = fixed
    else:
        rows = []
        for w in span:
            conj_row = [weights[t] * w[t].conjugate() for t in range(dim)]
            for k in range(r):
                rows.append([
                    sum((conj_row[t] * v[t * r + k] for t in range(dim)
                         if v[t * r + k] and conj_row[t]), _ZERO)
                    for v in fixed])
        coords = nullspace(rows, len(fixed))
        basis = [_combine(fixed, c, dim * r) for c in coords]
    if basis:
        reduced, pivots = rref([list(v) for v in basis], dim * r)
        basis = [tuple(reduced[i]) for i in range(len(pivots))]
    return basis
