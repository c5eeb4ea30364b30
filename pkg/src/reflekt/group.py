"""Finite matrix groups generated by reflections.

Groups are enumerated by breadth-first closure with a deterministic element
order (identity first, then BFS layers in generator order).  Elements are
deduplicated by an exact fingerprint of their entries at the group
conductor.  Products of arbitrary element indices are resolved through the
Cayley edges recorded during the closure, so no full multiplication table
is ever materialized.

Construction is single threaded; afterwards a group is immutable and every
query is pure, so group-wide sums can be partitioned freely.
"""

from __future__ import annotations

import math

from . import linalg
from .cyclo import Cyclotomic
from .linalg import (
    EigenMultiset,
    ExactnessError,
    Matrix,
    eigen_multiset,
    fix_dim,
    identity,
    is_unitary,
    mat,
    mat_inv,
    mat_key,
    mat_mul,
    nullspace,
    power_traces,
    rref,
    transpose,
)


class GenerationCapExceeded(RuntimeError):
    pass


class NotNormal(ValueError):
    pass


class ReflectionGroup:
    """A finite reflection group with an indexed element table.

    `acts_on` records which space the stored matrices act on: "V_dual"
    (functions / the dual space, the convention of the bundled data) or
    "V".  Queries that care about the space ask for it explicitly.
    """

    def __init__(self, generators, cap: int = 200_000, acts_on: str = "V_dual",
                 name: str | None = None, check_reflection_group: bool = True):
        if not generators:
            raise ValueError("need at least one generator")
        if acts_on not in ("V", "V_dual"):
            raise ValueError(f"unknown space tag {acts_on!r}")
        gens = [mat(g) for g in generators]
        self.rank = len(gens[0])
        conductor = 1
        for g in gens:
            if len(g) != self.rank or any(len(row) != self.rank for row in g):
                raise ValueError("generators must be square of equal size")
            for row in g:
                for x in row:
                    conductor = math.lcm(conductor, x.compact().m)
        self.conductor = conductor
        self.acts_on = acts_on
        self.name = name
        for g in gens:
            if not is_unitary(g):
                raise ValueError("generator is not unitary under the standard "
                                 "Hermitian form")
            linalg.element_order(g, cap=cap)
        self.generators = tuple(gens)

        ident = identity(self.rank)
        self.elements: list[Matrix] = [ident]
        self._index: dict[tuple, int] = {mat_key(ident, conductor): 0}
        self._words: list[tuple[int, ...]] = [()]
        self._edges: dict[tuple[int, int], int] = {}
        frontier = [0]
        while frontier:
            nxt = []
            for cur in frontier:
                for gi, g in enumerate(self.generators):
                    prod = mat_mul(self.elements[cur], g)
                    key = mat_key(prod, conductor)
                    idx = self._index.get(key)
                    if idx is None:
                        idx = len(self.elements)
                        if idx >= cap:
                            raise GenerationCapExceeded(
                                f"more than {cap} elements")
                        self.elements.append(prod)
                        self._index[key] = idx
                        self._words.append(self._words[cur] + (gi,))
                        nxt.append(idx)
                    self._edges[(cur, gi)] = idx
            frontier = nxt

        self.order = len(self.elements)
        self._inverse: list[int | None] = [None] * self.order
        self._inverse[0] = 0
        self._orders: list[int | None] = [None] * self.order
        self._classes: list[tuple[int, ...]] | None = None
        self._class_of: list[int] | None = None
        self._reflections: tuple[int, ...] | None = None
        self._sym_cache: dict = {}
        self.cache: dict = {}

        if check_reflection_group:
            refl = self.reflections()
            if self.order > 1 and (
                    not refl or len(self.subgroup_closure(refl)) != self.order):
                raise ValueError("group is not generated by its reflections")

    # -- element access ------------------------------------------------

    def matrix(self, i: int, space: str = "V_dual") -> Matrix:
        """Matrix of element i acting on the requested space."""
        m = self.elements[i]
        if space == self.acts_on:
            return m
        return transpose(mat_inv(m))

    def index_of(self, m: Matrix) -> int | None:
        return self._index.get(mat_key(m, self.conductor))

    def prod(self, i: int, j: int) -> int:
        for gi in self._words[j]:
            i = self._edges[(i, gi)]
        return i

    def inverse(self, i: int) -> int:
        cached = self._inverse[i]
        if cached is None:
            cached = self.index_of(mat_inv(self.elements[i]))
            assert cached is not None
            self._inverse[i] = cached
        return cached

    def conj(self, g: int, x: int) -> int:
        """g * x * g^-1 by index."""
        return self.prod(self.prod(g, x), self.inverse(g))

    def element_order(self, i: int) -> int:
        cached = self._orders[i]
        if cached is None:
            o = 1
            j = i
            while j != 0:
                j = self.prod(j, i)
                o += 1
            self._orders[i] = cached = o
        return cached

    def exponent(self) -> int:
        out = 1
        for rep in self.class_representatives():
            out = math.lcm(out, self.element_order(rep))
        return out

    def working_conductor(self, extra: int = 1) -> int:
        return math.lcm(self.exponent(), self.conductor, extra)

    def valid_sigma_exponents(self) -> list[int]:
        wc = self.working_conductor()
        return [s for s in range(1, wc + 1) if math.gcd(s, wc) == 1]

    def is_monomial_group(self) -> bool:
        return all(linalg.is_monomial(g) for g in self.generators)

    # -- conjugacy -------------------------------------------------------

    def conjugacy_classes(self) -> list[tuple[int, ...]]:
        if self._classes is None:
            class_of = [-1] * self.order
            classes = []
            for seed in range(self.order):
                if class_of[seed] >= 0:
                    continue
                cid = len(classes)
                orbit = {seed}
                stack = [seed]
                class_of[seed] = cid
                while stack:
                    x = stack.pop()
                    for gi in range(len(self.generators)):
                        y = self.conj(self._gen_index(gi), x)
                        if class_of[y] < 0:
                            class_of[y] = cid
                            orbit.add(y)
                            stack.append(y)
                classes.append(tuple(sorted(orbit)))
            self._classes = classes
            self._class_of = class_of
        return self._classes

    def _gen_index(self, gi: int) -> int:
        return self._edges[(0, gi)]

    def class_of(self, i: int) -> int:
        self.conjugacy_classes()
        return self._class_of[i]

    def class_representatives(self) -> list[int]:
        return [cls[0] for cls in self.conjugacy_classes()]

    def class_sizes(self) -> list[int]:
        return [len(cls) for cls in self.conjugacy_classes()]

    # per-class eigen data of the stored matrices

    def class_eigen(self, cid: int) -> EigenMultiset:
        key = ("class_eigen", cid)
        if key not in self.cache:
            rep = self.conjugacy_classes()[cid][0]
            o = self.element_order(rep)
            tr = power_traces(self.elements[rep], o)
            self.cache[key] = eigen_multiset(self.elements[rep], order=o,
                                             traces=tr)
        return self.cache[key]

    def class_fix(self, cid: int) -> int:
        key = ("class_fix", cid)
        if key not in self.cache:
            rep = self.conjugacy_classes()[cid][0]
            self.cache[key] = fix_dim(self.elements[rep],
                                      order=self.element_order(rep))
        return self.cache[key]

    def fix_of(self, i: int) -> int:
        return self.class_fix(self.class_of(i))

    # -- reflections ------------------------------------------------------

    def reflections(self) -> tuple[int, ...]:
        if self._reflections is None:
            out = []
            for i in range(1, self.order):
                if fix_dim(self.elements[i],
                           order=self.element_order(i)) == self.rank - 1:
                    out.append(i)
            self._reflections = tuple(out)
        return self._reflections

    def reflection_classes(self) -> list[tuple[int, ...]]:
        """Conjugacy classes consisting of reflections, by class order."""
        refl = set(self.reflections())
        out = []
        for cls in self.conjugacy_classes():
            if cls[0] in refl:
                out.append(cls)
        return out

    def hyperplane_orbits(self) -> list[tuple[int, ...]]:
        """Reflections grouped by the orbit of their fixed hyperplane."""
        refl = self.reflections()
        key_of = {}
        for i in refl:
            basis = nullspace(
                linalg.mat_sub(self.elements[i], identity(self.rank)),
                self.rank)
            key_of[i] = self._subspace_key(basis)
        norbits = 0
        assigned: dict[tuple, int] = {}
        for i in refl:
            k = key_of[i]
            if k in assigned:
                continue
            oid = norbits
            norbits += 1
            orbit_keys = {k}
            stack = [self._subspace_basis(self.elements[i])]
            while stack:
                basis = stack.pop()
                for g in self.generators:
                    moved = [linalg.mat_vec(g, v) for v in basis]
                    mk = self._subspace_key(moved)
                    if mk not in orbit_keys:
                        orbit_keys.add(mk)
                        stack.append(moved)
            for k2 in orbit_keys:
                assigned[k2] = oid
        grouped: dict[int, list[int]] = {}
        for i in refl:
            grouped.setdefault(assigned[key_of[i]], []).append(i)
        return [tuple(sorted(v)) for _, v in sorted(grouped.items())]

    def _subspace_basis(self, element: Matrix):
        return nullspace(linalg.mat_sub(element, identity(self.rank)),
                         self.rank)

    def _subspace_key(self, basis) -> tuple:
        if not basis:
            return ()
        reduced, pivots = rref([list(v) for v in basis], self.rank)
        out = []
        for row in reduced[: len(pivots)]:
            for x in row:
                for q in x.lift(self.conductor).c:
                    out.append(q.numerator)
                    out.append(q.denominator)
        return tuple(out)

    # -- subgroups ---------------------------------------------------------

    def subgroup_closure(self, gen_indices) -> frozenset[int]:
        members = {0}
        frontier = [0]
        gen_list = [g for g in gen_indices]
        while frontier:
            nxt = []
            for cur in frontier:
                for g in gen_list:
                    new = self.prod(cur, g)
                    if new not in members:
                        members.add(new)
                        nxt.append(new)
            frontier = nxt
        return frozenset(members)

    def __repr__(self):
        label = self.name or "ReflectionGroup"
        return (f"<{label}: order {self.order}, rank {self.rank}, "
                f"conductor {self.conductor}>")


def generate(gens, cap: int = 200_000, acts_on: str = "V_dual",
             name: str | None = None) -> ReflectionGroup:
    return ReflectionGroup(gens, cap=cap, acts_on=acts_on, name=name)


class NormalSubgroupHandle:
    """A normal reflection subgroup of a parent group, with coset tables.

    Membership is tracked both as a frozenset of parent indices and as a
    bitmask.  Coset representatives are the least element index in each
    coset, so the identity coset always comes first.
    """

    def __init__(self, parent: ReflectionGroup, members: frozenset[int],
                 gen_indices, name: str | None = None, check: bool = True):
        self.parent = parent
        self.members = members
        self.mask = 0
        for i in members:
            self.mask |= 1 << i
        self.gen_indices = tuple(sorted(gen_indices))
        self.order = len(members)
        self.name = name
        self.cache: dict = {}
        if parent.order % self.order:
            raise NotNormal("subgroup order does not divide the group order")
        if check:
            self._check_normal()
            self._check_reflection_generated()
        reps = []
        coset_of = [-1] * parent.order
        for g in range(parent.order):
            if coset_of[g] >= 0:
                continue
            cid = len(reps)
            reps.append(g)
            for n in members:
                coset_of[parent.prod(n, g)] = cid
        self.coset_reps = tuple(reps)
        self.coset_of = tuple(coset_of)
        if len(reps) * self.order != parent.order:
            raise NotNormal("coset partition failed")

    @classmethod
    def from_generators(cls, parent: ReflectionGroup, gen_indices,
                        name: str | None = None, check: bool = True):
        members = parent.subgroup_closure(gen_indices)
        return cls(parent, members, gen_indices, name=name, check=check)

    @classmethod
    def trivial(cls, parent: ReflectionGroup):
        return cls(parent, frozenset({0}), (), name="trivial", check=False)

    @classmethod
    def full(cls, parent: ReflectionGroup):
        gens = [parent._gen_index(gi) for gi in range(len(parent.generators))]
        return cls(parent, frozenset(range(parent.order)), gens,
                   name="self", check=False)

    def _check_normal(self):
        P = self.parent
        for gi in range(len(P.generators)):
            g = P._gen_index(gi)
            for n in self.gen_indices:
                if P.conj(g, n) not in self.members:
                    raise NotNormal("subgroup is not normal in its parent")

    def _check_reflection_generated(self):
        P = self.parent
        inside = [i for i in P.reflections() if i in self.members]
        if P.subgroup_closure(inside) != self.members:
            raise NotNormal("subgroup is not generated by its reflections")

    def verify_normal_exhaustive(self) -> bool:
        P = self.parent
        return all(P.conj(g, n) in self.members
                   for g in range(P.order) for n in self.members)

    # -- cosets ------------------------------------------------------------

    def is_member(self, i: int) -> bool:
        return i in self.members

    def quotient_order(self) -> int:
        return len(self.coset_reps)

    def coset_elements(self, cid: int) -> list[int]:
        rep = self.coset_reps[cid]
        return [self.parent.prod(n, rep) for n in sorted(self.members)]

    def coset_mul(self, a: int, b: int) -> int:
        return self.coset_of[self.parent.prod(self.coset_reps[a],
                                              self.coset_reps[b])]

    def coset_inv(self, a: int) -> int:
        return self.coset_of[self.parent.inverse(self.coset_reps[a])]

    def member_key(self) -> frozenset:
        """Parent-independent fingerprint for deduplication across builds."""
        P = self.parent
        return frozenset(mat_key(P.elements[i], P.conductor)
                         for i in self.members)

    def generator_matrices(self) -> list[Matrix]:
        return [self.parent.elements[i] for i in self.gen_indices]

    def __repr__(self):
        label = self.name or "N"
        return (f"<{label} of order {self.order} inside "
                f"{self.parent!r}, {self.quotient_order()} cosets>")


def normal_reflection_subgroups(G: ReflectionGroup,
                                max_classes: int = 14,
                                ) -> list[NormalSubgroupHandle]:
    """All normal reflection subgroups of G, including G itself.

    Every normal reflection subgroup is generated by the reflections it
    contains, which form a union of reflection conjugacy classes, so
    closing each nonempty subset of classes is exhaustive.  The trivial
    subgroup is excluded by the nonempty-subset convention.
    """
    classes = G.reflection_classes()
    if len(classes) > max_classes:
        raise GenerationCapExceeded(
            f"{len(classes)} reflection classes exceed the enumeration cap")
    seen: dict[frozenset[int], NormalSubgroupHandle] = {}
    for subset_bits in range(1, 1 << len(classes)):
        gen_idxs = []
        for ci, cls in enumerate(classes):
            if subset_bits >> ci & 1:
                gen_idxs.extend(cls)
        members = G.subgroup_closure(gen_idxs)
        if members not in seen:
            seen[members] = NormalSubgroupHandle(G, members, gen_idxs)
    if G.order == 1:
        seen[frozenset({0})] = NormalSubgroupHandle.trivial(G)
    out = sorted(seen.values(), key=lambda h: (h.order, sorted(h.members)))
    return out
