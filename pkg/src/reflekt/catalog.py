"""Bundled group constructors, the exact JSON group-file format, and
normal-subgroup classification reports.

File format (bit-exact): a JSON object

    {"name": ..., "conductor": m, "rank": r, "acts_on": "V" | "V_dual",
     "generators": [[[ [k, num, den], ... ] per entry] per row] per matrix,
     "provenance": ...}

where every matrix entry is a list of [exponent, numerator, denominator]
triples over the power basis of zeta_m.
"""

from __future__ import annotations

import json
import math
import os
from collections import Counter
from pathlib import Path

from .cyclo import Cyclotomic, cyc_root, rational
from .group import NormalSubgroupHandle, ReflectionGroup, normal_reflection_subgroups
from .linalg import identity, mat

DATA_DIR_ENV = "REFLEKT_DATA_DIR"


def data_dir() -> Path:
    override = os.environ.get(DATA_DIR_ENV)
    if override:
        return Path(override)
    return Path(__file__).resolve().parent / "data"


# -- constructors -------------------------------------------------------------


def make_cyclic(a: int) -> ReflectionGroup:
    """C_a acting on C; the stored matrix (zeta_a) is the dual action."""
    if a < 1:
        raise ValueError("order must be positive")
    gen = mat([[cyc_root(a, 1)]]) if a > 1 else identity(1)
    return ReflectionGroup([gen], acts_on="V_dual", name=f"C{a}")


def make_imprimitive(ab: int, b: int, r: int) -> ReflectionGroup:
    """G(ab, b, r): monomial matrices with entries ab-th roots of unity
    whose nonzero entries multiply to an (ab/b)-th root of unity."""
    if ab < 1 or r < 1 or b < 1 or ab % b:
        raise ValueError("parameters must satisfy b | ab, all positive")
    a = ab // b
    if r == 1:
        g = make_cyclic(a)
        g.name = f"G({ab},{b},1)"
        return g
    one = rational(1)
    zero = rational(0)
    gens = []
    if a > 1:
        diag = [[cyc_root(a, 1) if i == j == 0 else (one if i == j else zero)
                 for j in range(r)] for i in range(r)]
        gens.append(mat(diag))
    twisted = [[zero] * r for _ in range(r)]
    twisted[0][1] = cyc_root(ab, 1)
    twisted[1][0] = cyc_root(ab, -1)
    for i in range(2, r):
        twisted[i][i] = one
    gens.append(mat(twisted))
    for k in range(r - 1):
        swap = [[one if (i == j and i not in (k, k + 1))
                 or (i, j) in ((k, k + 1), (k + 1, k)) else zero
                 for j in range(r)] for i in range(r)]
        gens.append(mat(swap))
    G = ReflectionGroup(gens, acts_on="V_dual", name=f"G({ab},{b},{r})")
    expected = ab ** r * math.factorial(r) // b
    if G.order != expected:
        raise RuntimeError(
            f"G({ab},{b},{r}) realized order {G.order}, expected {expected}")
    return G


# -- file IO -------------------------------------------------------------------


def serialize_group(G: ReflectionGroup, provenance: str = "") -> dict:
    return {
        "name": G.name,
        "conductor": G.conductor,
        "rank": G.rank,
        "acts_on": G.acts_on,
        "generators": [
            [[x.lift(G.conductor).to_triples() for x in row] for row in g]
            for g in G.generators
        ],
        "provenance": provenance,
    }


def load_group_dict(doc: dict, cap: int = 200_000) -> ReflectionGroup:
    m = doc["conductor"]
    gens = []
    for g in doc["generators"]:
        gens.append(mat([[Cyclotomic.from_triples(m, entry) for entry in row]
                         for row in g]))
    G = ReflectionGroup(gens, cap=cap, acts_on=doc["acts_on"],
                        name=doc.get("name"))
    if G.rank != doc["rank"]:
        raise ValueError(f"declared rank {doc['rank']} but realized {G.rank}")
    if doc["conductor"] % G.conductor:
        raise ValueError("declared conductor does not cover the entries")
    return G


def load_group(path_or_name, cap: int = 200_000) -> ReflectionGroup:
    path = Path(path_or_name)
    if not path.suffix:
        path = data_dir() / f"{path}.json"
    with open(path) as fh:
        doc = json.load(fh)
    return load_group_dict(doc, cap=cap)


def save_group(G: ReflectionGroup, path, provenance: str = "") -> None:
    with open(path, "w") as fh:
        json.dump(serialize_group(G, provenance), fh, indent=1)
        fh.write("\n")


def load_manifest() -> dict:
    with open(data_dir() / "manifest.json") as fh:
        return json.load(fh)


def bundled_group_names() -> list[str]:
    return sorted(load_manifest()["groups"])


# -- group spec resolution ------------------------------------------------------


def resolve_group(spec: str, cap: int = 200_000) -> ReflectionGroup:
    """Resolve "C6", "G(4,2,2)", or a bundled data-file name."""
    s = spec.strip()
    if s.upper().startswith("C") and s[1:].lstrip("_").isdigit():
        return make_cyclic(int(s[1:].lstrip("_")))
    if s.upper().startswith("G(") and s.endswith(")"):
        parts = [int(p) for p in s[2:-1].split(",")]
        if len(parts) != 3:
            raise ValueError(f"bad imprimitive spec {spec!r}")
        return make_imprimitive(*parts)
    return load_group(s, cap=cap)


def resolve_normal_subgroup(G: ReflectionGroup, selector: str,
                            ) -> NormalSubgroupHandle:
    """Resolve a named subgroup selector inside G.

    Forms: "trivial", "self", "classes:i,j" (reflection conjugacy class
    indices), a constructor spec ("C2", "G(4,4,2)", "(C_2)^2"), or a bundled
    file name whose generators must close up inside G.
    """
    s = selector.strip()
    if s == "trivial":
        return NormalSubgroupHandle.trivial(G)
    if s in ("self", "full"):
        return NormalSubgroupHandle.full(G)
    if s.startswith("classes:"):
        classes = G.reflection_classes()
        idxs = []
        for tok in s[len("classes:"):].split(","):
            ci = int(tok)
            if not 0 <= ci < len(classes):
                raise ValueError(f"class index {ci} out of range")
            idxs.extend(classes[ci])
        return NormalSubgroupHandle.from_generators(G, idxs, name=s)
    if s.startswith("(C_") and s.endswith(f")^{G.rank}"):
        d = int(s[3:s.index(")")])
        gen_idxs = _diagonal_subgroup_indices(G, d)
        return NormalSubgroupHandle.from_generators(G, gen_idxs, name=s)
    aliases = {"short-roots": "g28_short"}
    inner = resolve_group(aliases.get(s, s))
    gen_idxs = []
    for g in inner.generators:
        lifted = mat([[x for x in row] for row in g])
        if inner.acts_on != G.acts_on:
            raise ValueError("subgroup data uses a different space tag")
        idx = G.index_of(lifted)
        if idx is None:
            raise ValueError(f"generators of {s!r} do not lie in {G.name}")
        gen_idxs.append(idx)
    return NormalSubgroupHandle.from_generators(G, gen_idxs, name=s)


def _diagonal_subgroup_indices(G: ReflectionGroup, d: int) -> list[int]:
    one = rational(1)
    idxs = []
    for pos in range(G.rank):
        rows = [[(cyc_root(d, 1) if i == pos else one) if i == j else rational(0)
                 for j in range(G.rank)] for i in range(G.rank)]
        idx = G.index_of(mat(rows))
        if idx is None:
            raise ValueError(f"diag(zeta_{d}) at position {pos} is not in G")
        idxs.append(idx)
    return idxs


# -- classification reports ------------------------------------------------------


def _imprimitive_fingerprint(ab: int, b: int, r: int) -> tuple:
    order = ab ** r * math.factorial(r) // b
    degs = sorted([ab * i for i in range(1, r)] + [r * ab // b])
    return order, tuple(degs)


def expected_normal_fingerprints(ab: int, b: int, r: int) -> Counter:
    """Fingerprint multiset (order, degrees) of all normal reflection
    subgroups of G(ab, b, r), the full group included."""
    a = ab // b
    out: Counter = Counter()
    out[_imprimitive_fingerprint(ab, b, r)] += 1
    for d in range(2, a + 1):
        if a % d:
            continue
        out[(d ** r, (d,) * r)] += 1
        if r >= 2:
            out[_imprimitive_fingerprint(ab, d * b, r)] += 1
    if r == 2:
        if b == 2:
            ap = ab // 2
            for d in range(1, ap + 1):
                if ap % d == 0:
                    out[_imprimitive_fingerprint(ap, d, 2)] += 2
        elif b == ab and ab % 2 == 0:
            # dihedral coincidence: I2(n) contains two copies of I2(n/2)
            out[_imprimitive_fingerprint(ab // 2, ab // 2, 2)] += 2
    return out


def expected_cyclic_fingerprints(a: int) -> Counter:
    out: Counter = Counter()
    for d in range(2, a + 1):
        if a % d == 0:
            out[(d, (d,))] += 1
    if a == 1:
        out[(1, (1,))] += 1
    return out


def classify(G: ReflectionGroup) -> dict:
    """Enumerate normal reflection subgroups and fingerprint them.

    For constructor-built groups the found multiset is compared with the
    closed-form expectation; for data-file groups, with the manifest row
    when one exists.  Mismatches are reported, never raised.
    """
    from . import invariants

    handles = normal_reflection_subgroups(G)
    found = []
    for h in handles:
        degs = invariants.subgroup_degrees(G, h)
        nrefl = sum(1 for i in G.reflections() if i in h.members)
        found.append({"order": h.order, "degrees": list(degs),
                      "reflections": nrefl,
                      "proper": h.order < G.order,
                      "trivial": h.order == 1})
    found_counter = Counter((f["order"], tuple(f["degrees"])) for f in found)

    expected: Counter | None = None
    name = G.name or ""
    if name.startswith("C") and name[1:].isdigit():
        expected = expected_cyclic_fingerprints(int(name[1:]))
    elif name.startswith("G(") and name.endswith(")"):
        ab, b, r = (int(p) for p in name[2:-1].split(","))
        if r == 1:
            expected = expected_cyclic_fingerprints(ab // b)
        else:
            expected = expected_normal_fingerprints(ab, b, r)
    else:
        manifest = load_manifest()
        row = manifest.get("normal_subgroups", {}).get(name)
        if row is not None:
            expected = Counter()
            for item in row:
                key = (item["order"], tuple(item["degrees"]))
                expected[key] += item.get("count", 1)

    report = {
        "group": name,
        "order": G.order,
        "found": sorted(found, key=lambda f: (f["order"], f["degrees"])),
        "expected_known": expected is not None,
        "match": None,
    }
    if expected is not None:
        expected = +expected
        report["match"] = found_counter == expected
        report["expected"] = sorted(
            [{"order": o, "degrees": list(d), "count": c}
             for (o, d), c in expected.items()],
            key=lambda f: (f["order"], f["degrees"]))
    return report
