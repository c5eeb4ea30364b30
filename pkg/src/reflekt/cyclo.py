"""Exact arithmetic in cyclotomic fields Q(zeta_m).

Elements are stored as coefficient vectors over the power basis
{zeta_m^0, ..., zeta_m^(phi(m)-1)}, reduced modulo the m-th cyclotomic
polynomial.  Equality is decided by lifting both operands to the lcm of
their conductors and comparing vectors, so it never depends on whether
an element has been compacted to its minimal conductor.

All values are immutable and all operations are pure.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache


class DivisionByZero(ArithmeticError):
    """Inversion of the zero element of a cyclotomic field."""


class GaloisDomainError(ValueError):
    """A Galois exponent that is not invertible at the needed conductor."""


def divisors(n: int) -> list[int]:
    ds = [d for d in range(1, n + 1) if n % d == 0]
    return ds


@lru_cache(maxsize=None)
def euler_phi(m: int) -> int:
    count = 0
    for k in range(1, m + 1):
        if math.gcd(k, m) == 1:
            count += 1
    return count


def _poly_div_exact(num: list[int], den: list[int]) -> list[int]:
    # Exact division of integer polynomials, den monic. Coefficients low->high.
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    assert all(c == 0 for c in num)
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the m-th cyclotomic polynomial."""
    if m == 1:
        return (-1, 1)
    poly = [-1] + [0] * (m - 1) + [1]
    for d in divisors(m)[:-1]:
        poly = _poly_div_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[int, ...], ...]:
    # x^k mod Phi_m for k = 0 .. max(m-1, 2*phi-2), as integer vectors of
    # length phi(m). Covers exponent reduction for products and lifts.
    phi = euler_phi(m)
    top = max(m - 1, 2 * phi - 2)
    mod = cyclotomic_polynomial(m)
    rows = []
    cur = [0] * phi
    cur[0] = 1
    rows.append(tuple(cur))
    for _ in range(top):
        nxt = [0] + cur[: phi - 1]
        lead = cur[phi - 1]
        if lead:
            for j in range(phi):
                nxt[j] -= lead * mod[j]
        rows.append(tuple(nxt))
        cur = nxt
    return tuple(rows)


_F0 = Fraction(0)
_F1 = Fraction(1)


class Cyclotomic:
    """An element of Q(zeta_m) in reduced power-basis form."""

    __slots__ = ("m", "c", "_h")

    def __init__(self, m: int, coeffs):
        self.m = m
        self.c = tuple(coeffs)
        self._h = None
        assert len(self.c) == euler_phi(m)

    # -- constructors ------------------------------------------------

    @staticmethod
    def from_rational(q) -> "Cyclotomic":
        return Cyclotomic(1, (Fraction(q),))

    @staticmethod
    def zero() -> "Cyclotomic":
        return _ZERO

    @staticmethod
    def one() -> "Cyclotomic":
        return _ONE

    # -- structure ---------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.c)

    def __bool__(self) -> bool:
        return any(self.c)

    def lift(self, big: int) -> "Cyclotomic":
        """Rewrite at conductor `big` (a multiple of the current one)."""
        if big == self.m:
            return self
        assert big % self.m == 0
        step = big // self.m
        table = _power_table(big)
        out = [_F0] * euler_phi(big)
        for k, a in enumerate(self.c):
            if a:
                for j, t in enumerate(table[k * step]):
                    if t:
                        out[j] += a * t
        return Cyclotomic(big, out)

    def _pair(self, other: "Cyclotomic"):
        if self.m == other.m:
            return self, other
        big = self.m * other.m // math.gcd(self.m, other.m)
        return self.lift(big), other.lift(big)

    # -- ring operations ----------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._pair(other)
        return Cyclotomic(a.m, tuple(x + y for x, y in zip(a.c, b.c)))

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.m, tuple(-x for x in self.c))

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._pair(other)
        if a.m == 1:
            return Cyclotomic(1, (a.c[0] * b.c[0],))
        table = _power_table(a.m)
        out = [_F0] * len(a.c)
        for i, x in enumerate(a.c):
            if not x:
                continue
            for j, y in enumerate(b.c):
                if not y:
                    continue
                xy = x * y
                row = table[i + j]
                for t, coef in enumerate(row):
                    if coef:
                        out[t] += xy * coef
        return Cyclotomic(a.m, out)

    __rmul__ = __mul__

    def inv(self) -> "Cyclotomic":
        """Multiplicative inverse, by solving a phi(m) x phi(m) system."""
        if self.is_zero():
            raise DivisionByZero("cannot invert 0")
        if self.m == 1:
            return Cyclotomic(1, (1 / self.c[0],))
        phi = euler_phi(self.m)
        cols = []
        for j in range(phi):
            basis = [_F0] * phi
            basis[j] = _F1
            cols.append((self * Cyclotomic(self.m, basis)).c)
        rows = [[cols[j][t] for j in range(phi)] + [_F1 if t == 0 else _F0]
                for t in range(phi)]
        sol = _solve_rational(rows, phi)
        if sol is None:
            raise DivisionByZero("element is not invertible (internal error)")
        return Cyclotomic(self.m, sol)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        out = _ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparisons ---------------------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._pair(other)
        return a.c == b.c

    def __hash__(self):
        if self._h is None:
            small = self.compact()
            self._h = hash((small.m, small.c))
        return self._h

    # -- Galois actions --------------------------------------------------

    def galois(self, s: int) -> "Cyclotomic":
        """Apply zeta_m -> zeta_m^s to this element."""
        if self.m == 1:
            return self
        if math.gcd(s, self.m) != 1:
            raise GaloisDomainError(
                f"exponent {s} is not invertible mod conductor {self.m}")
        s %= self.m
        table = _power_table(self.m)
        out = [_F0] * len(self.c)
        for k, a in enumerate(self.c):
            if a:
                for j, t in enumerate(table[(k * s) % self.m]):
                    if t:
                        out[j] += a * t
        return Cyclotomic(self.m, out)

    def conjugate(self) -> "Cyclotomic":
        return self.galois(self.m - 1) if self.m > 1 else self

    # -- conductor compaction ---------------------------------------------

    def compact(self) -> "Cyclotomic":
        """Equivalent element at the smallest conductor dividing this one."""
        elt = self
        changed = True
        while changed:
            changed = False
            m = elt.m
            for p in _prime_factors(m):
                d = m // p
                smaller = elt._try_conductor(d)
                if smaller is not None:
                    elt = smaller
                    changed = True
                    break
        return elt

    def _try_conductor(self, d: int):
        # Solve for coordinates over the power basis of zeta_d, if possible.
        m = self.m
        phi_d = euler_phi(d)
        table = _power_table(m)
        step = m // d
        rows = [[table[j * step][t] for j in range(phi_d)] + [self.c[t]]
                for t in range(euler_phi(m))]
        sol = _solve_rational(rows, phi_d)
        return None if sol is None else Cyclotomic(d, sol)

    # -- conversions ---------------------------------------------------

    def is_rational(self) -> bool:
        return self.compact().m == 1

    def to_fraction(self) -> Fraction:
        small = self.compact()
        if small.m != 1:
            raise ValueError(f"{self!r} is not rational")
        return small.c[0]

    def to_triples(self) -> list[list[int]]:
        """[exponent, numerator, denominator] triples of nonzero coefficients."""
        return [[k, a.numerator, a.denominator]
                for k, a in enumerate(self.c) if a]

    @staticmethod
    def from_triples(m: int, triples) -> "Cyclotomic":
        out = [_F0] * euler_phi(m)
        for k, num, den in triples:
            out[k] += Fraction(num, den)
        return Cyclotomic(m, out)

    def approx(self) -> complex:
        """Floating-point embedding via zeta_m -> exp(2*pi*i/m); debug only."""
        z = 0j
        for k, a in enumerate(self.c):
            if a:
                z += float(a) * complex(math.cos(2 * math.pi * k / self.m),
                                        math.sin(2 * math.pi * k / self.m))
        return z

    def __repr__(self):
        small = self.compact()
        if small.m == 1:
            return f"Cyc({small.c[0]})"
        terms = " + ".join(f"{a}*z{small.m}^{k}" for k, a in enumerate(small.c) if a)
        return f"Cyc({terms})"


def _coerce(x):
    if isinstance(x, Cyclotomic):
        return x
    if isinstance(x, (int, Fraction)):
        return Cyclotomic(1, (Fraction(x),))
    return NotImplemented


def _solve_rational(rows, ncols):
    """Gaussian elimination over Q for an augmented system; None if inconsistent.

    `rows` is a list of lists, each of length ncols + k (k >= 1 right-hand
    sides); returns the first-RHS solution with free variables set to 0.
    """
    rows = [list(r) for r in rows]
    nrows = len(rows)
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = None
        for i in range(rank, nrows):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        inv = 1 / Fraction(pr[col])
        rows[rank] = pr = [x * inv for x in pr]
        for i in range(nrows):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], pr)]
        pivots.append(col)
        rank += 1
        if rank == nrows:
            break
    for i in range(rank, nrows):
        if any(rows[i][ncols:]):
            return None
    sol = [_F0] * ncols
    for i, col in enumerate(pivots):
        sol[col] = rows[i][ncols]
    return tuple(sol)


@lru_cache(maxsize=None)
def _prime_factors(n: int) -> tuple[int, ...]:
    ps = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            ps.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        ps.append(n)
    return tuple(ps)


_ZERO = Cyclotomic(1, (_F0,))
_ONE = Cyclotomic(1, (_F1,))


def cyc_root(m: int, k: int) -> Cyclotomic:
    """Canonical form of zeta_m^k."""
    if m < 1:
        raise ValueError("conductor must be positive")
    k %= m
    table = _power_table(m)
    return Cyclotomic(m, tuple(Fraction(t) for t in table[k])).compact()


def rational(q) -> Cyclotomic:
    return Cyclotomic.from_rational(q)


class GaloisAuto:
    """The automorphism zeta_m -> zeta_m^s of Q(zeta_m), stored by exponent.

    The exponent determines the action on any root of unity whose order is
    invertible against it, so the automorphism is applied at whatever
    conductor arises; incompatible conductors raise GaloisDomainError.
    """

    __slots__ = ("m", "s")

    def __init__(self, m: int, s: int):
        if math.gcd(s, m) != 1:
            raise GaloisDomainError(f"gcd({s}, {m}) != 1")
        self.m = m
        self.s = s % m if m > 1 else 1

    def __call__(self, a: Cyclotomic) -> Cyclotomic:
        return a.galois(self.s)

    def compose(self, other: "GaloisAuto") -> "GaloisAuto":
        assert self.m == other.m
        return GaloisAuto(self.m, self.s * other.s % self.m)

    def is_identity(self) -> bool:
        return self.s == 1

    def __eq__(self, other):
        return (isinstance(other, GaloisAuto)
                and self.m == other.m and self.s == other.s)

    def __hash__(self):
        return hash((self.m, self.s))

    def __repr__(self):
        return f"GaloisAuto(m={self.m}, s={self.s})"


def galois_apply(sigma: GaloisAuto, a: Cyclotomic) -> Cyclotomic:
    return a.galois(sigma.s)


def geometric_ratio(lam: Cyclotomic, sigma: GaloisAuto) -> Cyclotomic:
    """(1 - sigma(lam)) / (1 - lam) for a root of unity lam != 1.

    Evaluated as the geometric sum 1 + lam + ... + lam^(s-1), which agrees
    with the quotient whenever lam^s = sigma(lam).
    """
    if lam == _ONE:
        raise ValueError("eigenvalue 1 must be excluded")
    s = sigma.s if sigma.s >= 1 else sigma.s + sigma.m
    total = _ZERO
    power = _ONE
    for _ in range(s):
        total = total + power
        power = power * lam
    return total
