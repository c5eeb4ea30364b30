"""Molien series, degrees, fake degrees and exponents, and the twisted
per-coset series attached to a normal reflection subgroup.

Conventions, pinned by the calibration tests in tests/test_invariants.py:
the fake degree of a module M is computed as

    f_M(q) = (1/|G|) sum_g  chi_{M*}(g) * prod_j (1 - q^(d_j)) / det(1 - q g|V*)

so every character is passed in *starred* form (the trace of the natural
matrices this package stores: dual-space actions), and no further
conjugation happens inside.  All sums run over conjugacy classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cyclo import Cyclotomic, GaloisAuto, cyc_root, geometric_ratio, rational
from .group import NormalSubgroupHandle, ReflectionGroup
from .linalg import (
    EigenMultiset,
    ExactnessError,
    char_poly_rev,
    element_order,
    power_traces,
    trace,
)
from .modspace import OSSpace, QuotientModule, os_space, quotient_module
from .series import (
    TruncSeries,
    TruncationTooSmall,
    USeries,
    deconvolve_degrees,
    geometric_series,
    upoly_mul,
)

_ZERO = rational(0)
_ONE = rational(1)


# -- eigen data on the right space ---------------------------------------------


def dual_eigen(G: ReflectionGroup, cid: int) -> EigenMultiset:
    """Eigenvalues of the class on the dual space V*."""
    ms = G.class_eigen(cid)
    return ms if G.acts_on == "V_dual" else ms.inverse()


def v_eigen(G: ReflectionGroup, cid: int) -> EigenMultiset:
    """Eigenvalues of the class on V."""
    ms = G.class_eigen(cid)
    return ms.inverse() if G.acts_on == "V_dual" else ms


def _poly_from_eigen(ms: EigenMultiset) -> list[Cyclotomic]:
    """det(1 - x g) as low-to-high coefficients, from the eigenvalues."""
    poly = [_ONE]
    for lam, mult in ms.pairs():
        for _ in range(mult):
            poly = [a - (lam * b if b else _ZERO)
                    for a, b in zip(poly + [_ZERO], [_ZERO] + poly)]
    return poly


def dual_charpoly(G: ReflectionGroup, cid: int) -> list[Cyclotomic]:
    key = ("dual_charpoly", cid)
    if key not in G.cache:
        G.cache[key] = _poly_from_eigen(dual_eigen(G, cid))
    return G.cache[key]


def dual_trace(G: ReflectionGroup, i: int) -> Cyclotomic:
    """Trace of element i on V*."""
    if G.acts_on == "V_dual":
        return trace(G.elements[i])
    return trace(G.elements[G.inverse(i)])


# -- Molien series and degrees ----------------------------------------------------


def molien(G: ReflectionGroup, trunc: int) -> TruncSeries:
    """Hilbert series of the invariant ring, averaged over classes."""
    total = TruncSeries.zero(trunc)
    for cid, cls in enumerate(G.conjugacy_classes()):
        inv = TruncSeries(trunc, dual_charpoly(G, cid)).inv()
        total = total + inv.scale(len(cls))
    return total.scale(Fraction(1, G.order))


def degrees(G: ReflectionGroup) -> tuple[int, ...]:
    """Degrees of the fundamental invariants; their product is |G|."""
    if "degrees" not in G.cache:
        G.cache["degrees"] = _degree_ladder(
            lambda T: molien(G, T), G.rank, G.order)
    return G.cache["degrees"]


def _degree_ladder(series_fn, r: int, order: int) -> tuple[int, ...]:
    T = 64
    cap = max(r * order, 64)
    while True:
        try:
            degs = deconvolve_degrees(series_fn(T), r)
        except TruncationTooSmall:
            if T >= cap:
                raise
            T = min(2 * T, cap)
            continue
        if math.prod(degs) != order:
            raise ExactnessError(
                f"degrees {degs} do not multiply to the group order {order}")
        return degs


def subgroup_molien(G: ReflectionGroup, handle: NormalSubgroupHandle,
                    trunc: int) -> TruncSeries:
    total = TruncSeries.zero(trunc)
    for i in sorted(handle.members):
        inv = TruncSeries(trunc, _poly_from_eigen(
            dual_eigen_of_element(G, i))).inv()
        total = total + inv
    return total.scale(Fraction(1, handle.order))


def dual_eigen_of_element(G: ReflectionGroup, i: int) -> EigenMultiset:
    # eigenvalues are a class invariant, so read them off the class
    return dual_eigen(G, G.class_of(i))


def subgroup_degrees(G: ReflectionGroup,
                     handle: NormalSubgroupHandle) -> tuple[int, ...]:
    if "degrees" not in handle.cache:
        handle.cache["degrees"] = _degree_ladder(
            lambda T: subgroup_molien(G, handle, T), G.rank, handle.order)
    return handle.cache["degrees"]


# -- characters -----------------------------------------------------------------


class CharacterTable:
    """A class function on a group, one exact value per conjugacy class."""

    def __init__(self, group: ReflectionGroup, by_class, label: str = ""):
        self.group = group
        self.by_class = tuple(by_class)
        self.label = label
        if len(self.by_class) != len(group.conjugacy_classes()):
            raise ValueError("one value per conjugacy class required")

    @classmethod
    def from_function(cls, group: ReflectionGroup, fn, label: str = ""):
        values = [fn(rep) for rep in group.class_representatives()]
        return cls(group, values, label)

    def value(self, element_index: int) -> Cyclotomic:
        return self.by_class[self.group.class_of(element_index)]

    def dim(self) -> int:
        return int(self.by_class[self.group.class_of(0)].to_fraction())

    def dual(self) -> "CharacterTable":
        G = self.group
        values = [self.by_class[G.class_of(G.inverse(rep))]
                  for rep in G.class_representatives()]
        return CharacterTable(G, values, label=self.label + "*")

    def twist(self, s: int) -> "CharacterTable":
        return CharacterTable(self.group,
                              [v.galois(s) for v in self.by_class],
                              label=f"{self.label}^({s})")

    def __add__(self, other):
        return CharacterTable(self.group,
                              [a + b for a, b in
                               zip(self.by_class, other.by_class)],
                              label=f"{self.label}+{other.label}")

    def __mul__(self, other):
        return CharacterTable(self.group,
                              [a * b for a, b in
                               zip(self.by_class, other.by_class)],
                              label=f"{self.label}*{other.label}")

    def power(self, n: int) -> "CharacterTable":
        out = CharacterTable(
            self.group, [rational(1)] * len(self.by_class), label="1")
        for _ in range(n):
            out = out * self
        return out


def character_v_dual(G: ReflectionGroup) -> CharacterTable:
    """Character of V* (the trace of the stored dual action)."""
    return CharacterTable.from_function(G, lambda i: dual_trace(G, i),
                                        label="V*")


def character_v(G: ReflectionGroup) -> CharacterTable:
    return character_v_dual(G).dual()


# -- fake degrees ------------------------------------------------------------------


def _coinvariant_kernel(G: ReflectionGroup, T: int) -> list[TruncSeries]:
    """Per class: prod_j (1 - q^d_j) / det(1 - q g|V*), a polynomial of
    degree sum(d_j - 1)."""
    key = ("coinvariant_kernel", T)
    if key not in G.cache:
        degs = degrees(G)
        numer = TruncSeries.one(T)
        for d in degs:
            poly = [_ONE] + [_ZERO] * T
            if d <= T:
                poly[d] = -_ONE
            numer = numer * TruncSeries(T, poly)
        out = []
        for cid in range(len(G.conjugacy_classes())):
            denom = TruncSeries(T, dual_charpoly(G, cid)).inv()
            out.append(numer * denom)
        G.cache[key] = out
    return G.cache[key]


def fake_exponents_starred(G: ReflectionGroup, starred_values,
                           dim: int | None = None) -> tuple[int, ...]:
    """Exponents of the module whose *dual* has the given per-class traces.

    The result is the sorted multiset of q-exponents of the fake degree;
    non-integer or negative graded multiplicities are a hard failure.
    """
    degs = degrees(G)
    T = sum(degs) - len(degs)
    kernel = _coinvariant_kernel(G, T)
    sizes = G.class_sizes()
    acc = [_ZERO] * (T + 1)
    for cid, chi in enumerate(starred_values):
        if not chi:
            continue
        w = chi * sizes[cid]
        for k, c in enumerate(kernel[cid].coeffs):
            if c:
                acc[k] = acc[k] + w * c
    inv_order = Fraction(1, G.order)
    exps = []
    for k, c in enumerate(acc):
        try:
            val = (c * inv_order).to_fraction()
        except ValueError:
            raise ExactnessError(
                f"fake degree coefficient at q^{k} is irrational")
        if val.denominator != 1 or val < 0:
            raise ExactnessError(
                f"fake degree coefficient {val} at q^{k} is not a "
                f"nonnegative integer")
        exps.extend([k] * int(val))
    if dim is not None and len(exps) != dim:
        raise ExactnessError(
            f"fake degree counts {len(exps)} exponents, expected {dim}")
    return tuple(exps)


def fake_degree(G: ReflectionGroup, chi: CharacterTable) -> tuple[int, ...]:
    """Exponents e_i(M) of the module with (unstarred) character chi."""
    return fake_exponents_starred(G, chi.dual().by_class, dim=chi.dim())


def character_v_sigma_starred(G: ReflectionGroup, s: int) -> list[Cyclotomic]:
    """Per-class traces of (V^sigma)* = sigma applied to the dual traces."""
    return [dual_trace(G, rep).galois(s) for rep in G.class_representatives()]


def exponents_v_sigma(G: ReflectionGroup, s: int) -> tuple[int, ...]:
    key = ("exponents_v_sigma", s % G.working_conductor())
    if key not in G.cache:
        G.cache[key] = fake_exponents_starred(
            G, character_v_sigma_starred(G, s), dim=G.rank)
    return G.cache[key]


# -- subgroup-side fake degrees ------------------------------------------------------


def _subgroup_kernel(G, handle, T: int) -> list[tuple[int, TruncSeries]]:
    key = ("subgroup_kernel", T)
    if key not in handle.cache:
        degs = subgroup_degrees(G, handle)
        numer = TruncSeries.one(T)
        for d in degs:
            poly = [_ONE] + [_ZERO] * T
            if d <= T:
                poly[d] = -_ONE
            numer = numer * TruncSeries(T, poly)
        out = []
        for i in sorted(handle.members):
            denom = TruncSeries(
                T, _poly_from_eigen(dual_eigen_of_element(G, i))).inv()
            out.append((i, numer * denom))
        handle.cache[key] = out
    return handle.cache[key]


def subgroup_fake_exponents(G, handle, starred_value_fn,
                            dim: int) -> tuple[int, ...]:
    """Fake-degree exponents over the subgroup, from starred traces."""
    degs = subgroup_degrees(G, handle)
    T = sum(degs) - len(degs)
    acc = [_ZERO] * (T + 1)
    for i, ser in _subgroup_kernel(G, handle, T):
        chi = starred_value_fn(i)
        if not chi:
            continue
        for k, c in enumerate(ser.coeffs):
            if c:
                acc[k] = acc[k] + chi * c
    inv_order = Fraction(1, handle.order)
    exps = []
    for k, c in enumerate(acc):
        try:
            val = (c * inv_order).to_fraction()
        except ValueError:
            raise ExactnessError(
                f"subgroup fake degree coefficient at q^{k} is irrational")
        if val.denominator != 1 or val < 0:
            raise ExactnessError(
                f"subgroup fake degree coefficient {val} at q^{k}")
        exps.extend([k] * int(val))
    if len(exps) != dim:
        raise ExactnessError(
            f"subgroup fake degree counts {len(exps)} exponents, "
            f"expected {dim}")
    return tuple(exps)


def twisted_exponents(G: ReflectionGroup, handle: NormalSubgroupHandle,
                      s: int) -> tuple[int, ...]:
    """Exponents of the twisted dual space over the subgroup.

    Computed two ways which must agree: the grading of the constructed
    Orlik-Solomon space, and the fake degree of the twist over the
    subgroup.
    """
    U = os_space_of(G, handle, s)
    graded = tuple(sorted(U.exponents))
    by_fake = tuple(sorted(subgroup_fake_exponents(
        G, handle, lambda i: dual_trace(G, i).galois(s), G.rank)))
    if graded != by_fake:
        raise ExactnessError(
            f"twisted exponent mismatch: grading {graded} vs fake degree "
            f"{by_fake}")
    return graded


# -- quotient and OS space wrappers ----------------------------------------------------


def quotient_module_of(G: ReflectionGroup,
                       handle: NormalSubgroupHandle) -> QuotientModule:
    return quotient_module(handle, subgroup_degrees(G, handle))


def os_space_of(G: ReflectionGroup, handle: NormalSubgroupHandle,
                s: int) -> OSSpace:
    return os_space(handle, s, subgroup_degrees(G, handle))


def fix_quotient(G, handle, i: int) -> int:
    """Fixed-space dimension of the element's coset on the quotient module."""
    E = quotient_module_of(G, handle)
    cid = handle.coset_of[i]
    key = ("fixq", cid)
    if key not in handle.cache:
        handle.cache[key] = E.coset_fix(cid)
    return handle.cache[key]


def fix_os(G, handle, s: int, i: int) -> int:
    U = os_space_of(G, handle, s)
    cid = handle.coset_of[i]
    key = ("fixu", U.sigma_exp, cid)
    if key not in handle.cache:
        handle.cache[key] = U.coset_fix(cid)
    return handle.cache[key]


@dataclass
class CosetSpectrum:
    """Eigenvalue/grade pairs of one coset on the quotient and OS spaces."""

    coset: int
    quotient_pairs: list  # (eigenvalue, degree)
    os_pairs: list  # (eigenvalue, exponent)

    def fix_quotient(self) -> int:
        return sum(1 for lam, _ in self.quotient_pairs if lam == _ONE)

    def fix_os(self) -> int:
        return sum(1 for lam, _ in self.os_pairs if lam == _ONE)


def coset_spectrum(G, handle, s: int, cid: int) -> CosetSpectrum:
    key = ("spectrum", s % max(G.conductor, 2), cid)
    if key not in handle.cache:
        E = quotient_module_of(G, handle)
        U = os_space_of(G, handle, s)
        handle.cache[key] = CosetSpectrum(
            cid, E.coset_eigen(cid), U.coset_eigen(cid))
    return handle.cache[key]


# -- twisted Poincare series ----------------------------------------------------------


def twisted_poincare(G, handle, s: int, cid: int, trunc: int) -> USeries:
    """(1/|N|) sum over the coset of
    prod_e det(1 + u y^e (ng)|U*_e) / det(1 - x (ng)|V*).

    The subgroup acts trivially on the OS space, so the numerator is
    constant along the coset.
    """
    U = os_space_of(G, handle, s)
    upoly = _os_det_upoly(U, cid)
    total = TruncSeries.zero(trunc)
    rep = handle.coset_reps[cid]
    for n in sorted(handle.members):
        i = G.prod(n, rep)
        denom = TruncSeries(
            trunc, _poly_from_eigen(dual_eigen_of_element(G, i))).inv()
        total = total + denom
    total = total.scale(Fraction(1, handle.order))
    return USeries.from_scalar_poly(upoly, total)


def _os_det_upoly(U: OSSpace, cid: int) -> dict:
    """prod_e det(1 + u y^e M_e) as a scalar (u, y) polynomial."""
    out = {(0, 0): _ONE}
    for pi, (e, basis) in enumerate(U.pieces):
        m = U.coset_matrix(pi, cid)
        neg = tuple(tuple(-x for x in row) for row in m)
        coeffs = char_poly_rev(neg)  # det(1 + x m)
        factor = {(p, e * p): c for p, c in enumerate(coeffs) if c}
        out = upoly_mul(out, factor)
    return out


def twisted_poincare_closed(G, handle, s: int, cid: int,
                            trunc: int) -> USeries:
    """prod_i (1 + eps_i(U) u y^(e_i)) / (1 - eps_i(E) x^(d_i))."""
    spec = coset_spectrum(G, handle, s, cid)
    numer = {(0, 0): _ONE}
    for lam, e in spec.os_pairs:
        numer = upoly_mul(numer, {(0, 0): _ONE, (1, e): lam})
    denom = TruncSeries.one(trunc)
    for lam, d in spec.quotient_pairs:
        poly = [_ONE] + [_ZERO] * trunc
        if d <= trunc:
            poly[d] = -lam
        denom = denom * TruncSeries(trunc, poly).inv()
    return USeries.from_scalar_poly(numer, denom)


def twisted_os_average(G, handle, s: int, cid: int,
                       trunc: int) -> dict[int, TruncSeries]:
    """(1/|N|) sum over the coset of det(1 + u (ng)|(V^sigma)*) /
    det(1 - x (ng)|V*), as u-exponent -> x-series."""
    rep = handle.coset_reps[cid]
    out: dict[int, TruncSeries] = {}
    for n in sorted(handle.members):
        i = G.prod(n, rep)
        dual = G.matrix(i, "V_dual")
        twisted = tuple(tuple(-x.galois(s) if x else x for x in row)
                        for row in dual)
        coeffs = char_poly_rev(twisted)  # det(1 + u sigma(g))
        denom = TruncSeries(
            trunc, _poly_from_eigen(dual_eigen_of_element(G, i))).inv()
        for p, c in enumerate(coeffs):
            if c:
                add = denom.scale(c)
                out[p] = out[p] + add if p in out else add
    return {p: v.scale(Fraction(1, handle.order)) for p, v in out.items()}


# -- quotient invariants (per graded block) ---------------------------------------------


@dataclass
class QuotientBlock:
    degree: int
    dim: int
    h_degrees: tuple[int, ...]
    h_exponents: tuple[int, ...]
    g_exponents: tuple[int, ...]


def quotient_invariants(G, handle, s: int = 1) -> list[QuotientBlock]:
    """Per degree-block data for the quotient action on the twisted
    quotient module: block degrees of the quotient group, its fake-degree
    exponents in the block grading, and the same module's exponents over
    the parent in the polynomial grading."""
    E = quotient_module_of(G, handle)
    ncosets = handle.quotient_order()
    # quotient-group degrees per block, by Molien + deconvolution
    block_h_degrees = []
    for pi, (d, basis) in enumerate(E.pieces):
        def block_molien(T, pi=pi):
            total = TruncSeries.zero(T)
            for cid in range(ncosets):
                m = E.coset_matrix(pi, cid)
                poly = char_poly_rev(m)
                total = total + TruncSeries(T, poly).inv()
            return total.scale(Fraction(1, ncosets))
        block_h_degrees.append(
            _degree_ladder_block(block_molien, len(basis), ncosets))
    h_degrees = tuple(sorted(d for block in block_h_degrees for d in block))
    # fake degrees over the quotient group, block grading
    T_H = sum(h_degrees) - len(h_degrees)
    kernel = _quotient_kernel(G, handle, E, h_degrees, T_H)
    blocks = []
    for pi, (d, basis) in enumerate(E.pieces):
        h_exps = _quotient_fake_exponents(
            E, kernel, ncosets,
            lambda cid: E.piece_trace(pi, cid).galois(s), len(basis), T_H)
        g_exps = fake_exponents_starred(
            G, [E.piece_trace(pi, handle.coset_of[rep]).galois(s)
                for rep in G.class_representatives()], dim=len(basis))
        blocks.append(QuotientBlock(
            degree=d, dim=len(basis),
            h_degrees=block_h_degrees[pi],
            h_exponents=tuple(sorted(h_exps)),
            g_exponents=tuple(sorted(g_exps))))
    return blocks


def _degree_ladder_block(series_fn, r: int, order: int) -> tuple[int, ...]:
    T = 64
    cap = max(64, r * order)
    while True:
        try:
            return deconvolve_degrees(series_fn(T), r)
        except TruncationTooSmall:
            if T >= cap:
                raise
            T = min(2 * T, cap)


def _quotient_kernel(G, handle, E: QuotientModule, h_degrees, T: int):
    key = ("quotient_kernel", T)
    if key not in handle.cache:
        numer = TruncSeries.one(T)
        for d in h_degrees:
            poly = [_ONE] + [_ZERO] * T
            if d <= T:
                poly[d] = -_ONE
            numer = numer * TruncSeries(T, poly)
        out = []
        for cid in range(handle.quotient_order()):
            denom = TruncSeries.one(T)
            for pi in range(len(E.pieces)):
                m = E.coset_matrix(pi, cid)
                denom = denom * TruncSeries(T, char_poly_rev(m)).inv()
            out.append(numer * denom)
        handle.cache[key] = out
    return handle.cache[key]


def _quotient_fake_exponents(E, kernel, ncosets, starred_fn, dim, T):
    acc = [_ZERO] * (T + 1)
    for cid in range(ncosets):
        chi = starred_fn(cid)
        if not chi:
            continue
        for k, c in enumerate(kernel[cid].coeffs):
            if c:
                acc[k] = acc[k] + chi * c
    inv_order = Fraction(1, ncosets)
    exps = []
    for k, c in enumerate(acc):
        val = (c * inv_order).to_fraction()
        if val.denominator != 1 or val < 0:
            raise ExactnessError(
                f"quotient fake degree coefficient {val} at q^{k}")
        exps.extend([k] * int(val))
    if len(exps) != dim:
        raise ExactnessError(
            f"quotient fake degree counts {len(exps)}, expected {dim}")
    return tuple(exps)


def os_block_pairs(G, handle, s: int) -> list[tuple[int, int]]:
    """Pairs (subgroup exponent, parent exponent of that OS graded piece),
    indexed block by block; within a block parent exponents are sorted."""
    U = os_space_of(G, handle, s)
    pairs = []
    for pi, (e, basis) in enumerate(U.pieces):
        starred = [U.piece_trace(pi, handle.coset_of[rep])
                   for rep in G.class_representatives()]
        g_exps = fake_exponents_starred(G, starred, dim=len(basis))
        pairs.extend((e, u) for u in sorted(g_exps))
    return pairs


# -- amenability ----------------------------------------------------------------------


def amenability_defect_starred(G, starred_values, starred_det_values,
                               dim: int) -> int:
    exps = fake_exponents_starred(G, starred_values, dim=dim)
    top = fake_exponents_starred(G, starred_det_values, dim=1)
    defect = sum(exps) - top[0]
    if defect < 0:
        raise ExactnessError(f"negative amenability defect {defect}")
    return defect


def amenability_defect(G, chi: CharacterTable,
                       chi_det: CharacterTable) -> int:
    """sum e_i(M) - e_1(top exterior power of M); always >= 0."""
    return amenability_defect_starred(
        G, chi.dual().by_class, chi_det.dual().by_class, chi.dim())


def subgroup_amenability_defect(G, handle, starred_fn, starred_det_fn,
                                dim: int) -> int:
    exps = subgroup_fake_exponents(G, handle, starred_fn, dim)
    top = subgroup_fake_exponents(G, handle, starred_det_fn, 1)
    defect = sum(exps) - top[0]
    if defect < 0:
        raise ExactnessError(f"negative amenability defect {defect}")
    return defect


# -- sigma twist helper -----------------------------------------------------------------


def sigma_for(G: ReflectionGroup, s: int) -> GaloisAuto:
    wc = G.working_conductor()
    return GaloisAuto(wc, s)


def class_twist_factor(G: ReflectionGroup, cid: int, s: int,
                       space: str = "V") -> Cyclotomic:
    """prod over eigenvalues != 1 of (1 - lam^sigma) / (1 - lam) for the
    class acting on the requested space."""
    key = ("twist", cid, s % G.working_conductor(), space)
    if key not in G.cache:
        ms = v_eigen(G, cid) if space == "V" else dual_eigen(G, cid)
        out = _ONE
        for j, mult in ms.multiplicities.items():
            if j % ms.order == 0:
                continue
            lam = cyc_root(ms.order, j)
            out = out * geometric_ratio(lam, GaloisAuto(ms.order, s)) ** mult
        G.cache[key] = out
    return G.cache[key]
