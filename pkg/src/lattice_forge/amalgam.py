"""V-formations, pushouts over a finite lattice, sample transfer, Theorem B.

A V-formation is ``K → P`` and ``K → Q`` with ``K`` a lattice and both maps
embeddings.  It is *standard* when ``K ⊆ P``, ``K ⊆ Q``, ``P ∩ Q = K`` as id
sets and both maps are inclusions; :func:`standardize` renames to get there.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Optional, Union

from .errors import (
    IsometryViolation,
    NotAHomomorphism,
    NotALattice,
    ValidationError,
    ValueLatticeMismatch,
    VerificationFailed,
)
from .measured import (
    MeasuredPL,
    Sample,
    from_codes,
    is_isometry,
    kernel_projection,
    minimal_sample,
    quotient,
    verify_idj,
    verify_idm,
    verify_film,
    verify_filj,
)
from .order import bits, build_poset
from .partial import PartialLattice, PLHom, check_homomorphism, is_embedding, is_total_lattice
from .terms import TermQuotient, theorem_a

Structure = Union[PartialLattice, MeasuredPL]


def _pl(S: Structure) -> PartialLattice:
    return S.pl if isinstance(S, MeasuredPL) else S


@dataclass
class VFormation:
    K: Structure
    P: Structure
    Q: Structure
    f: dict
    g: dict

    @property
    def measured(self) -> bool:
        return isinstance(self.P, MeasuredPL)

    def is_standard(self) -> bool:
        K, P, Q = _pl(self.K), _pl(self.P), _pl(self.Q)
        ks = set(K.elements)
        return (all(self.f[k] == k for k in ks) and all(self.g[k] == k for k in ks)
                and set(P.elements) & set(Q.elements) == ks)


def check_formation(v: VFormation) -> None:
    K, P, Q = _pl(v.K), _pl(v.P), _pl(v.Q)
    if not is_total_lattice(K):
        raise NotALattice(message="K must be a lattice")
    for name, target, m in (("f", P, v.f), ("g", Q, v.g)):
        h = PLHom(K, target, m)
        check_homomorphism(h)
        if not is_embedding(h):
            raise NotAHomomorphism(f"{name} is not an embedding")
    if v.measured:
        if not (v.K.E == v.P.E == v.Q.E):
            raise ValueLatticeMismatch("K, P and Q must share the value lattice")
        for name, target, m in (("f", v.P, v.f), ("g", v.Q, v.g)):
            if not is_isometry(v.K, target, m):
                raise IsometryViolation(f"{name} is not an isometry")


def _rename_pl(P: PartialLattice, ren: dict) -> PartialLattice:
    names = [ren[x] for x in P.elements]
    poset = build_poset(names, [(ren[x], ren[y]) for x, y in P.poset.le])
    joins = {frozenset(ren[x] for x in X): ren[a] for X, a in P.joins.items()}
    meets = {frozenset(ren[x] for x in X): ren[a] for X, a in P.meets.items()}
    return PartialLattice(poset, joins, meets)


def _rename(S: Structure, ren: dict) -> Structure:
    if isinstance(S, MeasuredPL):
        return MeasuredPL(_rename_pl(S.pl, ren), S.E, S.table)
    return _rename_pl(S, ren)


def standardize(v: VFormation):
    """Rename so that ``K = P ∩ Q`` and both maps are inclusions.

    Images of ``K`` take the ``K`` ids; other ids that clash get the suffix
    ``_p`` (in ``P``) or ``_q`` (in ``Q``), repeated until unique.  Returns
    ``(standard formation, renaming of P, renaming of Q)``.
    """
    check_formation(v)
    K, P, Q = _pl(v.K), _pl(v.P), _pl(v.Q)
    kset = set(K.elements)
    inv_f = {p: k for k, p in v.f.items()}
    inv_g = {q: k for k, q in v.g.items()}
    q_rest = {q for q in Q.elements if q not in inv_g}
    used = set(kset)
    ren_p = {}
    for p in P.elements:
        if p in inv_f:
            ren_p[p] = inv_f[p]
            continue
        name = p
        while name in used or (name == p and p in q_rest):
            name += "_p"
        used.add(name)
        ren_p[p] = name
    ren_q = {}
    for q in Q.elements:
        if q in inv_g:
            ren_q[q] = inv_g[q]
            continue
        name = q
        while name in used:
            name += "_q"
        used.add(name)
        ren_q[q] = name
    ident = {k: k for k in K.elements}
    std = VFormation(v.K, _rename(v.P, ren_p), _rename(v.Q, ren_q), dict(ident), dict(ident))
    return std, ren_p, ren_q


def _require_standard(v: VFormation):
    if not v.is_standard():
        raise ValidationError("the V-formation is not standard; call standardize first")


def _pushout_parts(v: VFormation):
    K, P, Q = _pl(v.K), _pl(v.P), _pl(v.Q)
    ks = [k for k in K.elements]
    names = list(P.elements) + [q for q in Q.elements if q not in K.index]
    pairs = set(P.poset.le) | set(Q.poset.le)
    for x in P.elements:
        for y in Q.elements:
            if any(P.leq(x, z) and Q.leq(z, y) for z in ks):
                pairs.add((x, y))
            if any(Q.leq(y, z) and P.leq(z, x) for z in ks):
                pairs.add((y, x))
    poset = build_poset(names, pairs)
    joins = dict(P.joins)
    meets = dict(P.meets)
    for src, dst, kind in ((Q.joins, joins, "join"), (Q.meets, meets, "meet")):
        for X, a in src.items():
            if X in dst and dst[X] != a:
                raise ValidationError(f"{kind} of {sorted(X)} differs between P and Q")
            dst[X] = a
    return PartialLattice(poset, joins, meets)


def pushout_pl(v: VFormation):
    """``R = P ∪ Q`` with the pushout order and operations.

    Returns ``(R, inclusion of P, inclusion of Q)``.
    """
    _require_standard(v)
    check_formation(v)
    R = _pushout_parts(v)
    P, Q = _pl(v.P), _pl(v.Q)
    return R, PLHom(P, R, {x: x for x in P.elements}), PLHom(Q, R, {x: x for x in Q.elements})


def pushout_measured(v: VFormation):
    """Measured pushout; cross values go through ``K``:
    ``⟦x≤y⟧ = ⋁_{z∈K} ⟦x≤z⟧_P ∧ ⟦z≤y⟧_Q``.
    """
    _require_standard(v)
    if not v.measured:
        raise ValidationError("pushout_measured needs measured P, Q and K")
    check_formation(v)
    R = _pushout_parts(v)
    P, Q, K = v.P, v.Q, v.K
    ks = list(K.elements)
    table = []
    for x in R.elements:
        row = []
        for y in R.elements:
            if x in P.index and y in P.index:
                row.append(P.bv(x, y))
            elif x in Q.index and y in Q.index:
                row.append(Q.bv(x, y))
            elif x in P.index:
                row.append(_or(P.bv(x, z) & Q.bv(z, y) for z in ks))
            else:
                row.append(_or(Q.bv(x, z) & P.bv(z, y) for z in ks))
        table.append(row)
    MR = from_codes(R, P.E, table)
    incl_p = PLHom(P.pl, R, {x: x for x in P.elements})
    incl_q = PLHom(Q.pl, R, {x: x for x in Q.elements})
    return MR, incl_p, incl_q


def _or(vs) -> int:
    out = 0
    for v in vs:
        out |= v
    return out


def pushout(v: VFormation):
    """Standardize then build the (measured or plain) pushout.

    Returns ``(R, map from P, map from Q)`` with the maps as dicts on the
    original ids.
    """
    std, ren_p, ren_q = standardize(v)
    if std.measured:
        R, _, _ = pushout_measured(std)
    else:
        R, _, _ = pushout_pl(std)
    return R, ren_p, ren_q


def mediating_map(v: VFormation, R: PartialLattice, hp: Mapping, hq: Mapping, S: PartialLattice) -> Optional[PLHom]:
    """The map ``R → S`` induced by ``hp``/``hq``, or ``None`` if they disagree on ``K``."""
    K = _pl(v.K)
    if any(hp[k] != hq[k] for k in K.elements):
        return None
    m = dict(hp)
    m.update(hq)
    return PLHom(R, S, m)


# R/G against P/G ⨿ Q/G

def check_pushout_quotient(v: VFormation, R: MeasuredPL, G) -> bool:
    """Is ``R/G`` isomorphic to the pushout of ``P/G ← K/G → Q/G``?

    The comparison map sends ``cls(x, G)`` to the class of ``x`` on its own
    side; it must be well defined, bijective, and match order, joins and meets.
    """
    _require_standard(v)
    RG, pr = quotient(R, G)
    PG, pp = quotient(v.P, G)
    QG, pq = quotient(v.Q, G)
    KG, pk = quotient(v.K, G)
    fG = {pk(k): pp(k) for k in v.K.elements}
    gG = {pk(k): pq(k) for k in v.K.elements}
    try:
        std, ren_p, ren_q = standardize(VFormation(KG, PG, QG, fG, gG))
        S, _, _ = pushout_pl(std)
    except ValidationError:
        return False
    image = {}
    for x in R.elements:
        y = ren_p[pp(x)] if x in v.P.index else ren_q[pq(x)]
        c = pr(x)
        if image.setdefault(c, y) != y:
            return False
    if sorted(image.values()) != sorted(S.elements) or len(set(image.values())) != len(S):
        return False
    for a in RG.elements:
        for b in RG.elements:
            if RG.leq(a, b) != S.leq(image[a], image[b]):
                return False
    mj = {frozenset(image[x] for x in X): image[a] for X, a in RG.joins.items()}
    mm = {frozenset(image[x] for x in X): image[a] for X, a in RG.meets.items()}
    return mj == S.joins and mm == S.meets


# sample transfer

def k_height(K: PartialLattice) -> int:
    """Number of elements in a longest chain of ``K``."""
    P = K.poset
    memo = {}

    def longest(i):
        if i not in memo:
            above = P.up[i] & ~(1 << i)
            memo[i] = 1 + max((longest(j) for j in bits(above)), default=0)
        return memo[i]

    return max((longest(i) for i in range(len(P))), default=0)


def _fallback(R: MeasuredPL, kind, target, index=None, what=""):
    warnings.warn(f"transferred {kind} sample failed verification{what}; using the full carrier")
    return Sample(kind, frozenset(target), frozenset(R.elements), index)


def transfer_idm_sample(v: VFormation, R: MeasuredPL, a, b, kind: str = "idm",
                        fallback: bool = True) -> Sample:
    """(Id∧)-sample of ``{a, b}`` in the pushout, built from samples of the sides.

    Same side: that side's sample.  Across: ``W = U ∪ V`` where ``U`` is a
    common ``P``-sample of every ``{a, z}`` (``z ∈ K``) and ``V`` a common
    ``Q``-sample of every ``{b, z}``.  Samples on each side are unions of
    greedily minimized ones.  ``kind="film"`` gives the dual.
    """
    _require_standard(v)
    verify = verify_idm if kind == "idm" else verify_film
    P, Q = v.P, v.Q
    if a in P.index and b in P.index:
        W = set(minimal_sample(P, kind, (a, b)).members)
    elif a in Q.index and b in Q.index:
        W = set(minimal_sample(Q, kind, (a, b)).members)
    else:
        if a not in P.index:
            a, b = b, a
        W = set()
        for z in v.K.elements:
            W |= minimal_sample(P, kind, (a, z)).members
            W |= minimal_sample(Q, kind, (b, z)).members
    if verify(R, (a, b), W):
        return Sample(kind, frozenset((a, b)), frozenset(W))
    if not fallback:
        raise VerificationFailed(f"{kind} sample {sorted(W)} of {{{a}, {b}}}")
    return _fallback(R, kind, (a, b))


def _common_j_sample(S: MeasuredPL, targets, m: int, kind: str) -> set:
    """Greedy smallest ``U`` that is an (Id∨)-sample with index ``m`` for every target."""
    verify = verify_idj if kind == "idj" else verify_filj
    members = list(S.elements)
    for u in list(members):
        trial = [w for w in members if w != u]
        if trial and all(verify(S, X, trial, m) for X in targets):
            members = trial
    return set(members)


def transfer_idj_sample(v: VFormation, R: MeasuredPL, Z, kind: str = "idj",
                        fallback: bool = True) -> Sample:
    """(Id∨)-sample of ``Z`` in the pushout, with index ``(h+2)m+h+1``.

    ``h`` is the number of elements of a longest chain of ``K`` and ``m`` the
    common index of the side samples, taken as ``max(|P|, |Q|)``.
    ``kind="filj"`` gives the dual.
    """
    _require_standard(v)
    P, Q, K = v.P, v.Q, v.K
    Z = list(Z)
    X = [z for z in Z if z in P.index]
    Y = [z for z in Z if z in Q.index]
    m = max(len(P), len(Q))
    h = k_height(K.pl)
    k = (h + 2) * m + h + 1
    ks = list(K.elements)

    def subsets(base):
        base = list(dict.fromkeys(base))
        return [c for r in range(1, len(base) + 1) for c in combinations(base, r)]

    Xs = _common_j_sample(P, subsets(X + ks), m, kind)
    Ys = _common_j_sample(Q, subsets(Y + ks), m, kind)
    W = Xs | Ys
    verify = verify_idj if kind == "idj" else verify_filj
    if verify(R, Z, W, k):
        return Sample(kind, frozenset(Z), frozenset(W), k)
    if not fallback:
        raise VerificationFailed(f"{kind} sample {sorted(W)} of {sorted(Z)} with index {k}")
    return _fallback(R, kind, Z, len(R))


# Theorem B

@dataclass
class TheoremBResult:
    quotient: TermQuotient
    pushout: MeasuredPL
    formation: VFormation
    map_p: dict
    map_q: dict
    map_k: dict

    @property
    def closed(self) -> bool:
        return self.quotient.closed


def _check_measured_hom(K: MeasuredPL, S: MeasuredPL, f: Mapping, name: str):
    check_homomorphism(PLHom(K.pl, S.pl, f))
    for x in K.elements:
        for y in K.elements:
            if K.bv(x, y) != S.bv(f[x], f[y]):
                raise ValidationError(f"{name} does not preserve the value of ({x}, {y})")


def proper_violation(q: TermQuotient):
    """A pair of classes where ``psi = top`` disagrees with the lattice order.

    For a closed quotient the order is read off the join table
    (``i ≤ j`` iff ``i ∨ j = j``); otherwise only reflexivity is checked.
    """
    top = q.base.E.top
    n = len(q)
    for i in range(n):
        if q.psi(i, i) != top:
            return (i, i)
        if not q.closed:
            continue
        for j in range(n):
            if i != j and (q.psi(i, j) == top) != (q.joins[(i, j)] == j):
                return (i, j)
    return None


def theorem_b(K: MeasuredPL, P: MeasuredPL, Q: MeasuredPL, f: Mapping, g: Mapping,
              height_cap: int = 4, size_cap: int = 20000) -> TheoremBResult:
    """Amalgamate ``P ← K → Q`` into a proper measured lattice of term classes.

    Steps: kernel-project ``K``, ``P``, ``Q``; standardize; measured pushout;
    term quotient of the pushout.  ``map_p``/``map_q`` send elements of the
    inputs to class indices of the quotient.
    """
    if not is_total_lattice(K.pl):
        raise NotALattice(message="K must be a lattice")
    if not (K.E == P.E == Q.E):
        raise ValueLatticeMismatch("K, P and Q must share the value lattice")
    _check_measured_hom(K, P, f, "f")
    _check_measured_hom(K, Q, g, "g")
    K1, pk = kernel_projection(K)
    P1, pp = kernel_projection(P)
    Q1, pq = kernel_projection(Q)
    f1 = {pk(k): pp(f[k]) for k in K.elements}
    g1 = {pk(k): pq(g[k]) for k in K.elements}
    std, ren_p, ren_q = standardize(VFormation(K1, P1, Q1, f1, g1))
    R, _, _ = pushout_measured(std)
    q = theorem_a(R, height_cap=height_cap, size_cap=size_cap)
    map_p = {x: q.leaf_class(ren_p[pp(x)]) for x in P.elements}
    map_q = {x: q.leaf_class(ren_q[pq(x)]) for x in Q.elements}
    map_k = {k: map_p[f[k]] for k in K.elements}
    if any(map_q[g[k]] != map_k[k] for k in K.elements):
        raise VerificationFailed("the amalgamation square does not commute")
    bad = proper_violation(q)
    if bad is not None:
        raise VerificationFailed(f"term quotient is not proper at classes {bad}")
    return TheoremBResult(q, R, std, map_p, map_q, map_k)
