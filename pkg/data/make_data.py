"""Regenerate the example files in this directory: python3 data/make_data.py"""

import json
from pathlib import Path

from lattice_forge import files
from lattice_forge.gadgets import persp_gadget, phi_from_generators
from lattice_forge.measured import from_phi_table
from lattice_forge.order import build_poset, chain, chain_lattice, downset_lattice
from lattice_forge.partial import PartialLattice, augment_singletons, lattice_pl

HERE = Path(__file__).parent
D2 = chain_lattice(["0", "1"])


def save(name, obj):
    files.save(HERE / f"{name}.json", obj)


def main():
    g = persp_gadget(D2, "1", "1", "1", "1")
    save("persp_gadget", files.workspace_obj(M=g.ambient, D=D2))

    # the square with D = 2x2: Θ(0,a)=Θ(b,1) gets p, Θ(0,b)=Θ(a,1) gets q
    DB = downset_lattice(build_poset(["p", "q"]))
    sq = lattice_pl(build_poset(["0", "a", "b", "1"], [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]))
    save("square", files.workspace_obj(M=phi_from_generators(sq, DB, [([("a", "0")], "p"), ([("b", "0")], "q")]), D=DB))

    ac = augment_singletons(PartialLattice(build_poset(["a", "b"]), {}, {}))
    anti = files.workspace_obj(M=from_phi_table(ac, D2, {("a", "b"): "1", ("b", "a"): "1"}), D=D2)
    save("antichain2", anti)
    save("one_point", files.workspace_obj(M=from_phi_table(lattice_pl(chain(["o"])), D2, {}), D=D2))

    for name, mid in (("K2", None), ("P3", "p"), ("Q3", "q")):
        names = ["0", "1"] if mid is None else ["0", mid, "1"]
        phi = {(y, x): "1" for i, x in enumerate(names) for y in names[i + 1:]}
        save(f"chain3_{name}", files.workspace_obj(M=from_phi_table(lattice_pl(chain(names)), D2, phi), D=D2))

    bad = {"partial_lattice": {"elements": ["a", "b"], "le": [["a", "b"], ["b", "a"]]}}
    save("bad_cycle", bad)
    anti["phi"] = anti["phi"][:1]
    save("bad_missing_phi", anti)


if __name__ == "__main__":
    main()
