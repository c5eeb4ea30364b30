"""Truncated power series in x, bivariate (q, t) polynomials, and the
graded determinant expansions used by coset-averaged Poincare sums.

Series coefficients are Cyclotomic so group averages can be accumulated
exactly; results that must be rational are converted with a hard check.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .cyclo import Cyclotomic, rational
from .linalg import ExactnessError

_ZERO = rational(0)
_ONE = rational(1)


class NonUnitInversion(ArithmeticError):
    pass


class MalformedMolienSeries(ValueError):
    """The series is not a product of factors 1/(1 - x^d)."""


class TruncationTooSmall(ValueError):
    """The requested operation needs a longer series to be certified."""


def _as_cyc(x):
    return x if isinstance(x, Cyclotomic) else rational(x)


class TruncSeries:
    """Power series in x, exact coefficients, truncated after degree T."""

    __slots__ = ("trunc", "coeffs")

    def __init__(self, trunc: int, coeffs=()):
        cs = [_as_cyc(c) for c in coeffs][: trunc + 1]
        cs += [_ZERO] * (trunc + 1 - len(cs))
        self.trunc = trunc
        self.coeffs = tuple(cs)

    @staticmethod
    def zero(trunc: int) -> "TruncSeries":
        return TruncSeries(trunc)

    @staticmethod
    def one(trunc: int) -> "TruncSeries":
        return TruncSeries(trunc, (_ONE,))

    @staticmethod
    def x_power(k: int, trunc: int) -> "TruncSeries":
        coeffs = [_ZERO] * (trunc + 1)
        if k <= trunc:
            coeffs[k] = _ONE
        return TruncSeries(trunc, coeffs)

    def coeff(self, k: int) -> Cyclotomic:
        return self.coeffs[k] if k <= self.trunc else _ZERO

    def __add__(self, other):
        T = min(self.trunc, other.trunc)
        return TruncSeries(T, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        T = min(self.trunc, other.trunc)
        return TruncSeries(T, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return TruncSeries(self.trunc, [-a for a in self.coeffs])

    def scale(self, c) -> "TruncSeries":
        c = _as_cyc(c)
        return TruncSeries(self.trunc, [c * a for a in self.coeffs])

    def __mul__(self, other):
        T = min(self.trunc, other.trunc)
        out = [_ZERO] * (T + 1)
        for i, a in enumerate(self.coeffs[: T + 1]):
            if not a:
                continue
            for j in range(T + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] = out[i + j] + a * b
        return TruncSeries(T, out)

    def inv(self) -> "TruncSeries":
        if not self.coeffs[0]:
            raise NonUnitInversion("constant term is zero")
        c0 = self.coeffs[0].inv()
        T = self.trunc
        out = [c0] + [_ZERO] * T
        for n in range(1, T + 1):
            acc = _ZERO
            for k in range(1, n + 1):
                a = self.coeffs[k] if k <= T else _ZERO
                if a and out[n - k]:
                    acc = acc + a * out[n - k]
            out[n] = -c0 * acc
        return TruncSeries(T, out)

    def shift(self, k: int) -> "TruncSeries":
        return TruncSeries(self.trunc, [_ZERO] * k + list(self.coeffs))

    def truncate(self, T: int) -> "TruncSeries":
        return TruncSeries(T, self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == _ONE and not any(self.coeffs[1:])

    def rational_coeffs(self) -> list[Fraction]:
        try:
            return [c.to_fraction() for c in self.coeffs]
        except ValueError as exc:
            raise ExactnessError(f"series coefficient is irrational: {exc}")

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        if self.trunc != other.trunc:
            raise ValueError("comparing series of different truncations")
        return self.coeffs == other.coeffs

    def __repr__(self):
        head = ", ".join(repr(c) for c in self.coeffs[:6])
        return f"TruncSeries(T={self.trunc}; {head}...)"


def geometric_series(d: int, trunc: int) -> TruncSeries:
    """1 / (1 - x^d), truncated."""
    coeffs = [_ZERO] * (trunc + 1)
    k = 0
    while k <= trunc:
        coeffs[k] = _ONE
        k += d
    return TruncSeries(trunc, coeffs)


def series_from_poly_rev(poly, trunc: int) -> TruncSeries:
    """Series 1 / p(x) for a polynomial given by low-to-high coefficients."""
    return TruncSeries(trunc, poly).inv()


def deconvolve_degrees(f: TruncSeries, r: int) -> tuple[int, ...]:
    """Recover {d_1, ..., d_r} with f = prod 1/(1 - x^d_i), sorted ascending.

    Greedy: p = 1/f is a polynomial; repeatedly take its lowest
    positive-degree term c*x^d, which must have c a negative integer, record
    d with multiplicity -c, and divide p by (1 - x^d)^(-c).
    """
    if f.coeff(0) != _ONE:
        raise MalformedMolienSeries("constant term is not 1")
    T = f.trunc
    p = f.inv()
    degrees: list[int] = []
    while len(degrees) < r:
        d = next((k for k in range(1, T + 1) if p.coeff(k)), None)
        if d is None:
            raise TruncationTooSmall(
                f"only {len(degrees)} of {r} degrees visible at truncation {T}")
        try:
            c = p.coeff(d).to_fraction()
        except ValueError:
            raise MalformedMolienSeries(f"irrational coefficient at degree {d}")
        if c.denominator != 1 or c >= 0:
            raise MalformedMolienSeries(
                f"lowest term {c}*x^{d} is not a negative integer")
        mult = -int(c)
        if len(degrees) + mult > r:
            raise MalformedMolienSeries("more factors than the declared rank")
        degrees.extend([d] * mult)
        g = geometric_series(d, T)
        for _ in range(mult):
            p = p * g
    if sum(degrees) > T:
        raise TruncationTooSmall(
            f"degree sum {sum(degrees)} exceeds truncation {T}")
    if not p.is_one():
        raise MalformedMolienSeries("residual series is not 1")
    return tuple(sorted(degrees))


# -- bivariate polynomials in (q, t) ---------------------------------------


class BivarPoly:
    """Finitely supported polynomial in q and t with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}

    @staticmethod
    def constant(c) -> "BivarPoly":
        return BivarPoly({(0, 0): Fraction(c)})

    @staticmethod
    def monomial(qe: int, te: int, c=1) -> "BivarPoly":
        return BivarPoly({(qe, te): Fraction(c)})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return BivarPoly(out)

    def __sub__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) - v
        return BivarPoly(out)

    def __mul__(self, other):
        out = {}
        for (a, b), u in self.terms.items():
            for (c, d), v in other.terms.items():
                key = (a + c, b + d)
                out[key] = out.get(key, Fraction(0)) + u * v
        return BivarPoly(out)

    def scale(self, c) -> "BivarPoly":
        c = Fraction(c)
        return BivarPoly({k: c * v for k, v in self.terms.items()})

    def hasse_derivative_t(self, k: int) -> "BivarPoly":
        """(1/k!) d^k/dt^k."""
        out = {}
        for (qe, te), v in self.terms.items():
            if te >= k:
                out[(qe, te - k)] = out.get((qe, te - k), Fraction(0)) \
                    + v * math.comb(te, k)
        return BivarPoly(out)

    def eval_t(self, t0) -> "BivarPoly":
        t0 = Fraction(t0)
        out = {}
        for (qe, te), v in self.terms.items():
            key = (qe, 0)
            out[key] = out.get(key, Fraction(0)) + v * t0 ** te
        return BivarPoly(out)

    def eval_q(self, q0) -> "BivarPoly":
        q0 = Fraction(q0)
        out = {}
        for (qe, te), v in self.terms.items():
            key = (0, te)
            out[key] = out.get(key, Fraction(0)) + v * q0 ** qe
        return BivarPoly(out)

    def swap_vars(self) -> "BivarPoly":
        return BivarPoly({(te, qe): v for (qe, te), v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, BivarPoly) and self.terms == other.terms

    def render(self, qname: str = "q", tname: str = "t") -> str:
        """Canonical text; terms sorted by (t-degree, q-degree) descending."""
        if not self.terms:
            return "0"
        parts = []
        for (qe, te) in sorted(self.terms,
                               key=lambda k: (k[1], k[0]), reverse=True):
            v = self.terms[(qe, te)]
            mono = ""
            if qe:
                mono += qname + (f"^{qe}" if qe > 1 else "")
            if te:
                mono += ("*" if mono else "") + tname + (f"^{te}" if te > 1 else "")
            mag = abs(v)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not parts:
                parts.append(body if v > 0 else f"-{body}")
            else:
                parts.append(("+ " if v > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"BivarPoly({self.render()})"


def expand_linear_factors(pairs) -> BivarPoly:
    """prod_i (q*t + a_i*t + b_i) for pairs (a_i, b_i)."""
    out = BivarPoly.constant(1)
    for a, b in pairs:
        out = out * BivarPoly({(1, 1): 1, (0, 1): a, (0, 0): b})
    return out


def bivar_factor_check(p: BivarPoly, pairs) -> bool:
    return p == expand_linear_factors(pairs)


class CycBivar:
    """(q, t) polynomial with cyclotomic coefficients, for exact group sums."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    def add_term(self, qe: int, te: int, c: Cyclotomic) -> None:
        key = (qe, te)
        cur = self.terms.get(key)
        new = c if cur is None else cur + c
        if new:
            self.terms[key] = new
        else:
            self.terms.pop(key, None)

    def __add__(self, other):
        out = CycBivar(dict(self.terms))
        for (qe, te), v in other.terms.items():
            out.add_term(qe, te, v)
        return out

    def scale(self, c) -> "CycBivar":
        c = _as_cyc(c)
        return CycBivar({k: c * v for k, v in self.terms.items()})

    def to_rational(self) -> BivarPoly:
        out = {}
        for k, v in self.terms.items():
            try:
                out[k] = v.to_fraction()
            except ValueError:
                raise ExactnessError(
                    f"coefficient of q^{k[0]} t^{k[1]} is irrational: {v!r}")
        return BivarPoly(out)

    def __eq__(self, other):
        return isinstance(other, CycBivar) and self.terms == other.terms

    def __repr__(self):
        return f"CycBivar({self.terms!r})"


# -- polynomials in u (and a grade marker y) over x-series -------------------


class USeries:
    """Polynomial in u and y whose coefficients are truncated x-series.

    Keys are (u-exponent, y-exponent).  The u-degree is bounded by the rank
    of the module being expanded; y marks the internal grade of each wedge
    factor so the diagonal specialization y -> x stays exact.
    """

    __slots__ = ("trunc", "parts")

    def __init__(self, trunc: int, parts=None):
        self.trunc = trunc
        self.parts = {k: v for k, v in (parts or {}).items()
                      if any(v.coeffs)}

    @staticmethod
    def from_scalar_poly(upoly: dict, series: TruncSeries) -> "USeries":
        """Scalar u-polynomial {(ue, ye): Cyclotomic} times an x-series."""
        return USeries(series.trunc,
                       {k: series.scale(c) for k, c in upoly.items()})

    def __add__(self, other):
        T = min(self.trunc, other.trunc)
        out = {k: v.truncate(T) for k, v in self.parts.items()}
        for k, v in other.parts.items():
            v = v.truncate(T)
            out[k] = out[k] + v if k in out else v
        return USeries(T, out)

    def scale(self, c) -> "USeries":
        return USeries(self.trunc, {k: v.scale(c) for k, v in self.parts.items()})

    def diagonal(self) -> dict[int, TruncSeries]:
        """Specialize y -> x; returns u-exponent -> x-series."""
        out: dict[int, TruncSeries] = {}
        for (ue, ye), v in self.parts.items():
            shifted = v.shift(ye)
            out[ue] = out[ue] + shifted if ue in out else shifted
        return {k: v for k, v in out.items()}

    def __eq__(self, other):
        if not isinstance(other, USeries):
            return NotImplemented
        if self.trunc != other.trunc:
            raise ValueError("comparing expansions of different truncations")
        keys = set(self.parts) | set(other.parts)
        zero = TruncSeries.zero(self.trunc)
        return all(self.parts.get(k, zero) == other.parts.get(k, zero)
                   for k in keys)

    def __repr__(self):
        return f"USeries(T={self.trunc}, keys={sorted(self.parts)})"


def upoly_mul(a: dict, b: dict) -> dict:
    """Convolution of scalar u-polynomials keyed by (u-exp, y-exp)."""
    out: dict = {}
    for (ua, ya), ca in a.items():
        for (ub, yb), cb in b.items():
            key = (ua + ub, ya + yb)
            cur = out.get(key)
            new = ca * cb if cur is None else cur + ca * cb
            if new:
                out[key] = new
            else:
                out.pop(key, None)
    return out
