"""Regenerate the bundled group data files and manifest.

Run from the repository root:  python3 tools/build_data.py
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from reflekt.cyclo import cyc_root, rational
from reflekt.group import ReflectionGroup
from reflekt.linalg import identity, mat, mat_key
from reflekt.catalog import save_group

OUT = Path(__file__).resolve().parent.parent / "src" / "reflekt" / "data"

half = Fraction(1, 2)


def build_g15():
    z = lambda k: cyc_root(24, k)
    s = mat([[1, 0], [0, -1]])
    # (zeta_3 / 2) * [[-1-i, 1-i], [-1-i, -1+i]] over zeta_24
    t = mat([
        [(z(8) + z(14)).__neg__() * half, (z(8) - z(14)) * half],
        [(z(8) + z(14)).__neg__() * half, (z(14) - z(8)) * half],
    ])
    # (1/sqrt(2)) * [[1, -1], [-1, -1]]
    c = (z(3) + z(21)) * half
    u = mat([[c, -c], [-c, -c]])
    G = ReflectionGroup([s, t, u], acts_on="V_dual", name="g15")
    assert G.order == 288, G.order
    assert G.conductor == 24
    return G


def build_g12():
    z8 = lambda k: cyc_root(8, k)
    c = (z8(1) + z8(7)) * half
    u1 = mat([[c, -c], [-c, -c]])
    u2 = mat([[c, c], [c, -c]])
    u3 = mat([[0, z8(1)], [z8(-1), 0]])
    G = ReflectionGroup([u1, u2, u3], acts_on="V_dual", name="g12")
    assert G.order == 48, G.order
    assert G.conductor == 8
    return G


def reflection_in_root(signs):
    # I - 2 a a^T for a = (1/2) * signs, |a| = 1
    rows = []
    for i in range(4):
        row = []
        for j in range(4):
            v = Fraction(1 if i == j else 0) - half * signs[i] * signs[j]
            row.append(rational(v))
        rows.append(row)
    return mat(rows)


def coordinate_reflection(k):
    rows = [[rational(-1 if i == j == k else (1 if i == j else 0))
             for j in range(4)] for i in range(4)]
    return mat(rows)


def swap(i, j):
    rows = []
    for a in range(4):
        row = []
        for b in range(4):
            if a == b and a not in (i, j):
                row.append(rational(1))
            elif (a, b) in ((i, j), (j, i)):
                row.append(rational(1))
            else:
                row.append(rational(0))
        rows.append(row)
    return mat(rows)


def build_g28():
    # Simple reflections for the F4 root system: e2-e3, e3-e4, e4,
    # (e1-e2-e3-e4)/2.  Real orthogonal, so V and V* carry the same matrices.
    gens = [swap(1, 2), swap(2, 3), coordinate_reflection(3),
            reflection_in_root([1, -1, -1, -1])]
    G = ReflectionGroup(gens, acts_on="V", name="g28")
    assert G.order == 1152, G.order
    assert G.conductor == 1
    return G


def short_reflections(G):
    mats = [coordinate_reflection(k) for k in range(4)]
    for s2 in (1, -1):
        for s3 in (1, -1):
            for s4 in (1, -1):
                mats.append(reflection_in_root([1, s2, s3, s4]))
    idxs = []
    for m in mats:
        i = G.index_of(m)
        assert i is not None
        idxs.append(i)
    return mats, idxs


def build_g28_short(G28):
    mats, idxs = short_reflections(G28)
    closure = G28.subgroup_closure(idxs)
    assert len(closure) == 192, len(closure)
    # verify the closure contains exactly the 12 short reflections
    refl_inside = [i for i in G28.reflections() if i in closure]
    assert len(refl_inside) == 12
    assert set(refl_inside) == set(idxs)
    # greedy generating subset
    chosen = []
    chosen_idx = []
    have = frozenset({0})
    for m, i in zip(mats, idxs):
        if i in have:
            continue
        chosen.append(m)
        chosen_idx.append(i)
        have = G28.subgroup_closure(chosen_idx)
        if len(have) == 192:
            break
    assert len(have) == 192
    N = ReflectionGroup(chosen, acts_on="V", name="g28_short")
    assert N.order == 192, N.order
    print(f"g28_short: {len(chosen)} generators")
    return N


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    g15 = build_g15()
    save_group(g15, OUT / "g15.json",
               provenance="rank-2 exceptional group of order 288; matrices "
                          "act on the dual space; conductor 24")
    g12 = build_g12()
    save_group(g12, OUT / "g12.json",
               provenance="rank-2 exceptional group of order 48; matrices "
                          "act on the dual space; conductor 8")
    g28 = build_g28()
    save_group(g28, OUT / "g28.json",
               provenance="Weyl group of F4, order 1152, from the simple "
                          "roots e2-e3, e3-e4, e4, (e1-e2-e3-e4)/2")
    g28_short = build_g28_short(g28)
    save_group(g28_short, OUT / "g28_short.json",
               provenance="subgroup of W(F4) generated by reflections in the "
                          "short roots e_i and (e1+-e2+-e3+-e4)/2; order 192")

    # sanity: g12 generators embed into g15
    for g in g12.generators:
        assert g15.index_of(g) is not None

    manifest = {
        "schema": "manifest.v1",
        "groups": {
            "g12": {"order": 48, "rank": 2, "conductor": 8, "degrees": [6, 8]},
            "g15": {"order": 288, "rank": 2, "conductor": 24,
                    "degrees": [12, 24]},
            "g28": {"order": 1152, "rank": 4, "conductor": 1,
                    "degrees": [2, 6, 8, 12]},
            "g28_short": {"order": 192, "rank": 4, "conductor": 1},
        },
        "normal_subgroups": {
            "g15": [
                {"name": "G(4,2,2)", "order": 16, "count": 1},
                {"name": "G12", "order": 48, "count": 1},
                {"name": "G5", "order": 72, "count": 1},
                {"name": "G13", "order": 96, "count": 1},
                {"name": "G7", "order": 144, "count": 1},
                {"name": "G14", "order": 144, "count": 1},
                {"name": "G15", "order": 288, "count": 1},
            ],
            "g28": [
                {"name": "G(2,2,4)", "order": 192, "count": 2},
                {"name": "G28", "order": 1152, "count": 1},
            ],
        },
    }
    with open(OUT / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")
    print("data files written to", OUT)


if __name__ == "__main__":
    main()
