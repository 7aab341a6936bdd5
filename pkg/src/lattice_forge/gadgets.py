"""Finite gadgets for one-step lattice extensions, and a bounded saturation driver.

Values passed to the gadget builders are ids of ``D`` in the zero
convention: the value of a principal congruence ``Θ⁺(x, y)``.  The measured
structures built here use ``E = dualize(D)`` on the same ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Optional, Sequence

from .amalgam import TheoremBResult, _rename, theorem_b
from .errors import RelationViolation, VerificationFailed
from .measured import MeasuredPL, from_phi_table, phi_of
from .order import DistLattice, build_poset, chain, dualize
from .partial import (
    PLHom,
    PartialLattice,
    cong_closure,
    con_lattice,
    conc_map,
    lattice_pl,
    theta,
    theta_plus,
    validate_pl,
)
from .terms import join, meet


@dataclass
class Gadget:
    """A measured ``P`` with an embedding of a measured lattice ``K``.

    ``promise`` names the relations the gadget adds, as
    ``(op, left, right, result)`` over ids of ``P``.
    """

    name: str
    ambient: MeasuredPL
    base: MeasuredPL
    base_embedding: PLHom
    designated: dict = field(default_factory=dict)
    promise: list = field(default_factory=list)


def phi_from_generators(pl: PartialLattice, D: DistLattice, gens: Sequence[tuple]) -> MeasuredPL:
    """Measured structure whose ``φ`` is determined by values on generating congruences.

    ``gens`` holds ``(pairs, d)``: the congruence generated by ``pairs`` gets
    ``d``.  Each principal ``Θ⁺(x, y)`` receives the join of the ``d`` whose
    congruence it contains.  That is the right ``φ`` when the generators are
    the join-irreducible congruences; the result is validated anyway.
    """
    cons = [(cong_closure(pl, pairs), d) for pairs, d in gens]
    table = {}
    for x in pl.elements:
        for y in pl.elements:
            if pl.leq(x, y):
                continue
            th = theta_plus(pl, x, y)
            v = D.bot_id
            for c, d in cons:
                if c <= th:
                    v = D.join(v, d)
            table[(x, y)] = v
    return from_phi_table(pl, D, table)


def _sub(M: MeasuredPL, pl: PartialLattice) -> MeasuredPL:
    idx = M.index
    t = [[M.table[idx[x]][idx[y]] for y in pl.elements] for x in pl.elements]
    return MeasuredPL(pl, M.E, t)


def relcomp_gadget(D: DistLattice, alpha_ab, alpha_bc) -> Gadget:
    """Add a relative complement ``t`` of ``b`` in ``[a, c]``.

    ``P`` is the square ``a < b, t < c``; ``Θ(a, b) = Θ(t, c)`` gets
    ``alpha_ab`` and ``Θ(a, t) = Θ(b, c)`` gets ``alpha_bc``.
    """
    poset = build_poset("abtc", [("a", "b"), ("a", "t"), ("b", "c"), ("t", "c")])
    P = lattice_pl(poset)
    M = phi_from_generators(P, D, [([("b", "a")], alpha_ab), ([("t", "a")], alpha_bc)])
    K = lattice_pl(chain("abc"))
    return Gadget("relcomp", M, _sub(M, K), PLHom(K, P, {k: k for k in "abc"}),
                  {"t": "t"},
                  [("meet", "b", "t", "a"), ("join", "b", "t", "c")])


PERSP_K = ("0", "w", "u", "v", "s", "1")


def persp_base() -> PartialLattice:
    """The six-element ``K``: ``0 < w = u∧v < u, v < s = u∨v < 1``."""
    poset = build_poset(PERSP_K, [("0", "w"), ("w", "u"), ("w", "v"), ("u", "s"),
                                  ("v", "s"), ("s", "1")])
    return lattice_pl(poset, full=True)


def persp_pl() -> PartialLattice:
    """``K ∪ {x}`` with ``0 < x < 1``, ``x∨u = x∨v = 1`` and ``x∧u = x∧v = 0``."""
    K = persp_base()
    els = list(PERSP_K) + ["x"]
    poset = build_poset(els, list(K.poset.le) + [("0", "x"), ("x", "1")])
    joins = dict(K.joins)
    meets = dict(K.meets)
    joins[frozenset("x")] = meets[frozenset("x")] = "x"
    for e in ("u", "v"):
        joins[frozenset(("x", e))] = "1"
        meets[frozenset(("x", e))] = "0"
    return validate_pl(poset, joins, meets)


def persp_generators(P: PartialLattice) -> dict:
    """``ξ = Θ(0, w)``, ``η = Θ(s, 1)``, ``α = Θ⁺(u, v)``, ``β = Θ⁺(v, u)``."""
    return {"xi": theta(P, "0", "w"), "eta": theta(P, "s", "1"),
            "alpha": theta_plus(P, "u", "v"), "beta": theta_plus(P, "v", "u")}


def persp_values(MK: MeasuredPL) -> dict:
    """The four generator values read off a measured six-element ``K``."""
    return {"xi": phi_of(MK, [("w", "0")]), "eta": phi_of(MK, [("1", "s")]),
            "alpha": phi_of(MK, [("u", "v")]), "beta": phi_of(MK, [("v", "u")])}


def persp_gadget(D: DistLattice, xi, eta, alpha, beta) -> Gadget:
    """Make ``u`` and ``v`` perspective in ``[0, 1]`` through a new ``x``.

    Needs ``ξ∨α = ξ∨β`` and ``η∨α = η∨β`` in ``D``.
    """
    if D.join(xi, alpha) != D.join(xi, beta) or D.join(eta, alpha) != D.join(eta, beta):
        raise RelationViolation("need xi∨alpha = xi∨beta and eta∨alpha = eta∨beta in D")
    P = persp_pl()
    M = phi_from_generators(P, D, [([("w", "0")], xi), ([("1", "s")], eta),
                                   ([("u", "v")], alpha), ([("v", "u")], beta)])
    K = persp_base()
    return Gadget("persp", M, _sub(M, K), PLHom(K, P, {k: k for k in PERSP_K}),
                  {"x": "x"},
                  [("meet", "x", "u", "0"), ("meet", "x", "v", "0"),
                   ("join", "x", "u", "1"), ("join", "x", "v", "1")])


def chain3_gadget(D: DistLattice, alpha, beta) -> Gadget:
    """Split the interval ``o < i`` by a new ``x``: ``Θ(o, x)`` gets ``alpha``, ``Θ(x, i)`` gets ``beta``.

    Meant for ``alpha ≤ beta``, so that ``{o, i}`` keeps the value ``beta``.
    """
    P = lattice_pl(chain("oxi"))
    M = phi_from_generators(P, D, [([("x", "o")], alpha), ([("i", "x")], beta)])
    K = lattice_pl(chain("oi"))
    return Gadget("chain3", M, _sub(M, K), PLHom(K, P, {"o": "o", "i": "i"}),
                  {"x": "x"}, [])


# M3[K]

def m3_name(t) -> str:
    return "_".join(t)


def m3(K: PartialLattice):
    """Schmidt's ``M3[K]`` with its diagonal embedding.

    Carrier: triples with pairwise equal meets, named ``x_y_z``; the order
    is componentwise.  Returns ``(lattice, diagonal PLHom)``.
    """
    meet_of = lambda x, y: K.meet_of((x, y)) if x != y else x
    triples = [t for t in product(K.elements, repeat=3)
               if meet_of(t[0], t[1]) == meet_of(t[0], t[2]) == meet_of(t[1], t[2])]
    names = [m3_name(t) for t in triples]
    pairs = [(m3_name(s), m3_name(t)) for s in triples for t in triples
             if all(K.leq(a, b) for a, b in zip(s, t))]
    L = lattice_pl(build_poset(names, pairs))
    diag = PLHom(K, L, {x: m3_name((x, x, x)) for x in K.elements})
    return L, diag


def m3_gadget(MK: MeasuredPL) -> Gadget:
    """``M3[K]`` measured by ``μ = λ ∘ (Con j)⁻¹``, ``j`` the diagonal."""
    K = MK.pl
    L, diag = m3(K)
    conK = con_lattice(K)
    f = conc_map(diag)
    back = {f(c): c for c in conK.congruences}
    table = {}
    for x in L.elements:
        for y in L.elements:
            if not L.leq(x, y):
                c = back.get(theta_plus(L, x, y))
                if c is None:
                    raise VerificationFailed("the diagonal is not congruence-preserving")
                table[(x, y)] = phi_of(MK, [(a, b) for a, b in c.pairs])
    M = from_phi_table(L, dualize(MK.E), table, MK.E)
    return Gadget("m3", M, MK, diag, {}, [])


def decomp_elements(L: PartialLattice, diag: PLHom, o, i, a, b) -> dict:
    """``a0 = ⟨a,o,o⟩``, ``a1 = ⟨o,a,o⟩``, ``b0``, ``b1`` in ``M3[K]``, with the three conclusions checked.

    (i) ``j(a) = a0 ⊕ a1`` and ``j(b) = b0 ⊕ b1`` in ``[j(o), j(i)]``;
    (ii) ``Θ(j(o), a_l) = Θ(j(o), j(a))`` and the same for ``b``;
    (iii) ``Θ(a_l ∨ b_l, j(a∨b)) = Θ(j(o), j(a∨b))``.
    """
    K = diag.source
    if not all(K.leq(o, e) and K.leq(e, i) for e in (a, b)):
        raise ValueError("need o ≤ a, b ≤ i")
    d = diag
    out = {"a0": m3_name((a, o, o)), "a1": m3_name((o, a, o)),
           "b0": m3_name((b, o, o)), "b1": m3_name((o, b, o))}
    jo = d(o)

    def jn(x, y):
        return L.join_of((x, y))

    def mt(x, y):
        return L.meet_of((x, y))

    ab = K.join_of((a, b))
    checks = [
        ("a = a0 ⊕ a1", mt(out["a0"], out["a1"]) == jo and jn(out["a0"], out["a1"]) == d(a)),
        ("b = b0 ⊕ b1", mt(out["b0"], out["b1"]) == jo and jn(out["b0"], out["b1"]) == d(b)),
    ]
    for e in ("a", "b"):
        whole = theta(L, jo, d(a if e == "a" else b))
        for l in "01":
            checks.append((f"Θ(o,{e}{l}) = Θ(o,{e})", theta(L, jo, out[e + l]) == whole))
    target = theta(L, jo, d(ab))
    for l in "01":
        checks.append((f"Θ(a{l}∨b{l}, a∨b) = Θ(o, a∨b)",
                       theta(L, jn(out["a" + l], out["b" + l]), d(ab)) == target))
    for name, ok in checks:
        if not ok:
            raise VerificationFailed(f"decomposition fails: {name}")
    return out


# saturation

@dataclass
class StepResult:
    gadget: Gadget
    result: TheoremBResult
    witnesses: dict
    promise_ok: bool
    extension: Optional[MeasuredPL]


def _holds(res: TheoremBResult, ren: Mapping, op, x, y, z) -> bool:
    q = res.quotient
    rx, ry, rz = (q.reps[res.map_q[ren[e]]] for e in (x, y, z))
    t = join(rx, ry) if op == "join" else meet(rx, ry)
    return q.order.eq(t, rz) == q.base.E.top


def saturation_step(L: MeasuredPL, gadget: Gadget, f: Mapping,
                    height_cap: int = 4, size_cap: int = 20000) -> StepResult:
    """Amalgamate ``gadget.ambient`` with ``L`` over the gadget's base via ``f``.

    ``f`` maps the base ids into ``L``.  The gadget is first renamed into the
    ids of ``L`` (base elements take their images, the others get ``_g``
    suffixes on clashes), so elements of ``L`` keep their ids in the result.
    The promised relations are checked in the term quotient; ``extension`` is
    the quotient as a measured lattice when it closed, and ``witnesses`` maps
    designated names to class indices.
    """
    base_ids = set(gadget.base.elements)
    e = gadget.base_embedding.mapping
    inv = {p: k for k, p in e.items()}
    used = set(L.elements)
    ren = {}
    for p in gadget.ambient.elements:
        if p in inv:
            ren[p] = f[inv[p]]
            continue
        name = p
        while name in used:
            name += "_g"
        used.add(name)
        ren[p] = name
    K1 = _rename(gadget.base, {k: f[k] for k in base_ids})
    P1 = _rename(gadget.ambient, ren)
    ident = {f[k]: f[k] for k in base_ids}
    res = theorem_b(K1, L, P1, ident, ident, height_cap=height_cap, size_cap=size_cap)
    ok = all(_holds(res, ren, *rel) for rel in gadget.promise)
    witnesses = {k: res.map_q[ren[v]] for k, v in gadget.designated.items()}
    ext = res.quotient.as_measured() if res.closed else None
    return StepResult(gadget, res, witnesses, ok, ext)


def saturate(L: MeasuredPL, steps: Sequence[tuple], height_cap: int = 4,
             size_cap: int = 20000) -> list:
    """Run ``(gadget, f)`` steps in the given order, each on the previous extension.

    Leaves keep their ids in the extension, so later maps may name elements
    of the original ``L``.  Stops early if a step does not close.
    """
    out = []
    cur = L
    for gadget, f in steps:
        step = saturation_step(cur, gadget, f, height_cap, size_cap)
        out.append(step)
        if step.extension is None:
            break
        cur = step.extension
    return out
