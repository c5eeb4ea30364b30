"""Exact matrices over cyclotomic fields.

A matrix is a tuple of row tuples of Cyclotomic entries.  Everything here
is pure and side-effect free; matrices are shared freely.

Finite-order eigenstructure is extracted with the discrete-Fourier trace
formula rather than by factoring characteristic polynomials: for g of
order o, the multiplicity of zeta_o^j is (1/o) * sum_k tr(g^k) zeta_o^(-jk),
which must come out a nonnegative integer.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .cyclo import Cyclotomic, cyc_root, rational


class SizeMismatch(ValueError):
    pass


class OrderCapExceeded(RuntimeError):
    pass


class ExactnessError(RuntimeError):
    """An internal consistency check on exact arithmetic failed."""


_ZERO = rational(0)
_ONE = rational(1)

Matrix = tuple  # tuple of row tuples of Cyclotomic


def mat(rows) -> Matrix:
    return tuple(tuple(_as_cyc(x) for x in row) for row in rows)


def _as_cyc(x):
    return x if isinstance(x, Cyclotomic) else rational(x)


def identity(r: int) -> Matrix:
    return tuple(tuple(_ONE if i == j else _ZERO for j in range(r))
                 for i in range(r))


def mat_size(a: Matrix) -> int:
    return len(a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k = len(a), len(a[0])
    if len(b) != k:
        raise SizeMismatch(f"{n}x{k} times {len(b)}x{len(b[0])}")
    bt = tuple(zip(*b))
    out = []
    for row in a:
        out_row = []
        for col in bt:
            acc = _ZERO
            for x, y in zip(row, col):
                if x and y:
                    acc = acc + x * y
            out_row.append(acc)
        out.append(tuple(out_row))
    return tuple(out)


def mat_vec(a: Matrix, v) -> tuple:
    out = []
    for row in a:
        acc = _ZERO
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return tuple(out)


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(a: Matrix, c) -> Matrix:
    c = _as_cyc(c)
    return tuple(tuple(c * x for x in row) for row in a)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def conj_transpose(a: Matrix) -> Matrix:
    return tuple(tuple(x.conjugate() for x in col) for col in zip(*a))


def galois_matrix(a: Matrix, s: int) -> Matrix:
    return tuple(tuple(x.galois(s) for x in row) for row in a)


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product; basis ordered with the first factor outermost."""
    rows = []
    for ra in a:
        for rb in b:
            rows.append(tuple(x * y for x in ra for y in rb))
    return tuple(rows)


def entrywise_power(a: Matrix, n: int) -> Matrix:
    """Raise every nonzero entry to the n-th power (monomial matrices)."""
    return tuple(tuple(x ** n if x else x for x in row) for row in a)


def trace(a: Matrix) -> Cyclotomic:
    acc = _ZERO
    for i in range(len(a)):
        acc = acc + a[i][i]
    return acc


def is_unitary(a: Matrix) -> bool:
    return mat_mul(conj_transpose(a), a) == identity(len(a))


def is_monomial(a: Matrix) -> bool:
    """One nonzero entry per row and per column."""
    n = len(a)
    cols_seen = set()
    for row in a:
        nz = [j for j, x in enumerate(row) if x]
        if len(nz) != 1:
            return False
        cols_seen.add(nz[0])
    return len(cols_seen) == n


def mat_key(a: Matrix, conductor: int) -> tuple:
    """Hashable exact fingerprint of a matrix at a fixed conductor."""
    parts = []
    for row in a:
        for x in row:
            for q in x.lift(conductor).c:
                parts.append(q.numerator)
                parts.append(q.denominator)
    return tuple(parts)


# -- determinants and inverses ---------------------------------------------


def mat_det(a: Matrix) -> Cyclotomic:
    n = len(a)
    if any(len(row) != n for row in a):
        raise SizeMismatch("determinant of a non-square matrix")
    if n <= 5:
        return _det_cofactor(a)
    return _det_bareiss(a)


def _det_cofactor(a: Matrix) -> Cyclotomic:
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = _ZERO
    sign = 1
    for j in range(n):
        if a[0][j]:
            minor = tuple(tuple(row[k] for k in range(n) if k != j)
                          for row in a[1:])
            term = a[0][j] * _det_cofactor(minor)
            total = total + (term if sign > 0 else -term)
        sign = -sign
    return total


def _det_bareiss(a: Matrix) -> Cyclotomic:
    m = [list(row) for row in a]
    n = len(m)
    sign = 1
    prev = _ONE
    for k in range(n - 1):
        if not m[k][k]:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return _ZERO
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        prev_inv = prev.inv()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) * prev_inv
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def mat_inv(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + [_ONE if i == j else _ZERO for j in range(n)]
           for i, row in enumerate(a)]
    reduced, pivots = rref(aug, n)
    if len(pivots) != n:
        raise ExactnessError("matrix is singular")
    return tuple(tuple(reduced[i][n:]) for i in range(n))


# -- elimination -------------------------------------------------------------


def rref(rows, ncols: int):
    """Row-reduce in place over the cyclotomic field.

    Returns (rows, pivot_columns); columns past ncols ride along as
    right-hand sides.  Pivoting is first-nonzero, leftmost.
    """
    rows = [list(r) for r in rows]
    nrows = len(rows)
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, nrows) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inv()
        rows[rank] = [x * inv for x in rows[rank]]
        pr = rows[rank]
        for i in range(nrows):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], pr)]
        pivots.append(col)
        rank += 1
        if rank == nrows:
            break
    return rows, pivots


def rank(rows) -> int:
    """Matrix rank by fraction-free elimination (first-nonzero pivoting)."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    prev = _ONE
    rk = 0
    for col in range(ncols):
        piv = next((i for i in range(rk, nrows) if m[i][col]), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        prev_inv = prev.inv()
        pivot = m[rk][col]
        for i in range(rk + 1, nrows):
            if any(m[i][col:]):
                row = m[i]
                prow = m[rk]
                m[i] = [(row[j] * pivot - row[col] * prow[j]) * prev_inv
                        for j in range(ncols)]
        prev = pivot
        rk += 1
        if rk == nrows:
            break
    return rk


def nullspace(rows, ncols: int) -> list[tuple]:
    """Basis of the right kernel, with free coordinates set deterministically."""
    reduced, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    free = [j for j in range(ncols) if j not in pivot_set]
    basis = []
    for f in free:
        vec = [_ZERO] * ncols
        vec[f] = _ONE
        for i, col in enumerate(pivots):
            vec[col] = -reduced[i][f]
        basis.append(tuple(vec))
    return basis


def solve_in_span(basis_vectors, targets, ncols: int):
    """Coordinates of each target in the span of basis_vectors, or None.

    basis_vectors and targets are vectors of length ncols; returns a list of
    coordinate tuples (length len(basis_vectors)) aligned with targets.
    """
    k = len(basis_vectors)
    rows = [[basis_vectors[j][t] for j in range(k)] + [tg[t] for tg in targets]
            for t in range(ncols)]
    reduced, pivots = rref(rows, k)
    if len(pivots) != k:
        raise ExactnessError("basis vectors are linearly dependent")
    nrhs = len(targets)
    for i in range(k, len(reduced)):
        if any(reduced[i][k:]):
            return None
    out = []
    for t in range(nrhs):
        coords = [_ZERO] * k
        for i, col in enumerate(pivots):
            coords[col] = reduced[i][k + t]
        out.append(tuple(coords))
    return out


# -- finite order structure ---------------------------------------------------


def element_order(g: Matrix, cap: int = 10_000) -> int:
    ident = identity(len(g))
    power = g
    for o in range(1, cap + 1):
        if power == ident:
            return o
        power = mat_mul(power, g)
    raise OrderCapExceeded(f"no order found up to {cap}")


def power_traces(g: Matrix, o: int) -> list[Cyclotomic]:
    """Traces of g^0 .. g^(o-1)."""
    out = [rational(len(g))]
    power = g
    for _ in range(1, o):
        out.append(trace(power))
        power = mat_mul(power, g)
    return out


class EigenMultiset:
    """Eigenvalues of a finite-order matrix as residues modulo its order.

    multiplicities[j] is the multiplicity of zeta_order^j.
    """

    __slots__ = ("order", "multiplicities")

    def __init__(self, order: int, multiplicities: dict[int, int]):
        self.order = order
        self.multiplicities = {j % order: m for j, m in multiplicities.items() if m}

    def total(self) -> int:
        return sum(self.multiplicities.values())

    def fix(self) -> int:
        return self.multiplicities.get(0, 0)

    def inverse(self) -> "EigenMultiset":
        return EigenMultiset(
            self.order,
            {(-j) % self.order: m for j, m in self.multiplicities.items()})

    def pairs(self):
        """(eigenvalue, multiplicity) pairs, exact roots of unity."""
        return [(cyc_root(self.order, j), m)
                for j, m in sorted(self.multiplicities.items())]

    def __eq__(self, other):
        return (self.order == other.order
                and self.multiplicities == other.multiplicities)

    def __repr__(self):
        inner = ", ".join(f"z{self.order}^{j}:{m}"
                          for j, m in sorted(self.multiplicities.items()))
        return f"EigenMultiset({inner})"


def eigen_multiset(g: Matrix, order: int | None = None,
                   traces: list | None = None) -> EigenMultiset:
    o = element_order(g) if order is None else order
    if traces is None:
        traces = power_traces(g, o)
    r = len(g)
    mult = {}
    inv_o = Fraction(1, o)
    for j in range(o):
        acc = rational(0)
        for k, t in enumerate(traces):
            if t:
                acc = acc + t * cyc_root(o, (-j * k) % o)
        try:
            val = (acc * inv_o).to_fraction()
        except ValueError as exc:
            raise ExactnessError(f"irrational eigenvalue multiplicity: {exc}")
        if val.denominator != 1 or val < 0:
            raise ExactnessError(f"non-integer eigenvalue multiplicity {val}")
        if val:
            mult[j] = int(val)
    ms = EigenMultiset(o, mult)
    if ms.total() != r:
        raise ExactnessError("eigenvalue multiplicities do not sum to the size")
    return ms


def char_poly_rev(g: Matrix) -> list[Cyclotomic]:
    """Coefficients (low to high) of det(1 - x*g), via Newton's identities."""
    r = len(g)
    powers = [rational(r)]
    power = g
    for _ in range(r):
        powers.append(trace(power))
        power = mat_mul(power, g)
    elem = [rational(1)]
    for k in range(1, r + 1):
        acc = rational(0)
        sign = 1
        for i in range(1, k + 1):
            term = elem[k - i] * powers[i]
            acc = acc + (term if sign > 0 else -term)
            sign = -sign
        elem.append(acc * Fraction(1, k))
    return [elem[k] if k % 2 == 0 else -elem[k] for k in range(r + 1)]


def fix_dim(g: Matrix, order: int | None = None,
            traces: list | None = None) -> int:
    """dim ker(1 - g), computed two ways which must agree."""
    o = element_order(g) if order is None else order
    if traces is None:
        traces = power_traces(g, o)
    acc = rational(0)
    for t in traces:
        acc = acc + t
    avg = (acc * Fraction(1, o)).to_fraction()
    if avg.denominator != 1:
        raise ExactnessError("trace average is not an integer")
    by_trace = int(avg)
    diff = mat_sub(g, identity(len(g)))
    by_rank = len(g) - rank(diff)
    if by_trace != by_rank:
        raise ExactnessError(
            f"fixed-space dimension mismatch: {by_trace} vs {by_rank}")
    return by_trace


def is_reflection(g: Matrix, order: int | None = None) -> bool:
    r = len(g)
    if g == identity(r):
        return False
    return fix_dim(g, order=order) == r - 1
