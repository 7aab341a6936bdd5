"""Seeded random structures for property checks and ``selfcheck``.

Every generator takes a ``random.Random`` instance, so runs are reproducible.
"""

from __future__ import annotations

import random
from itertools import combinations

from .errors import ValidationError
from .measured import MeasuredPL, from_codes
from .order import DistLattice, FinitePoset, bits, build_poset, downset_lattice
from .partial import PartialLattice, _close, augment_singletons, lattice_pl

NAMES = "abcdefghijklmnopqrstuvwxyz"


def random_poset(rng: random.Random, n: int, p: float = 0.4, names=None) -> FinitePoset:
    names = list(names or NAMES[:n])
    perm = list(range(n))
    rng.shuffle(perm)
    pairs = [(names[perm[i]], names[perm[j]])
             for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return build_poset(names, pairs)


def random_partial_lattice(rng: random.Random, n: int, p_order: float = 0.4,
                           p_op: float = 0.5, augment: bool = True) -> PartialLattice:
    """A random poset with a random selection of its existing sups and infs."""
    poset = random_poset(rng, n, p_order)
    els = poset.elements
    joins, meets = {}, {}
    for k in range(2, n + 1):
        for combo in combinations(range(n), k):
            m = sum(1 << i for i in combo)
            s = poset.sup_index(m)
            if s is not None and rng.random() < p_op:
                joins[frozenset(els[i] for i in combo)] = els[s]
            t = poset.inf_index(m)
            if t is not None and rng.random() < p_op:
                meets[frozenset(els[i] for i in combo)] = els[t]
    P = PartialLattice(poset, joins, meets)
    return augment_singletons(P) if augment else P


def random_dist_lattice(rng: random.Random, max_size: int = 6) -> DistLattice:
    """Down-set lattice of a random poset on one to three points."""
    while True:
        k = rng.randint(1, 3)
        J = random_poset(rng, k, 0.5, names=[f"p{i}" for i in range(k)])
        D = downset_lattice(J)
        if len(D) <= max_size:
            return D


def random_measured(rng: random.Random, P: PartialLattice, E: DistLattice,
                    seeds: int = 2) -> MeasuredPL:
    """A random valid table on ``P`` with values in ``E``.

    For each join-irreducible ``p`` of ``E`` a congruence ``θ_p`` is chosen
    so that ``p' ≤ p`` implies ``θ_p ⊆ θ_p'``; then ``⟦x≤y⟧`` is the join of
    the ``p`` with ``(x, y) ∈ θ_p``.  Every valid table arises this way.
    """
    n = len(P)
    irr = E.irreducibles
    order = sorted(range(len(irr)), key=lambda k: len(E.poset.upper_set([irr[k]])))
    thetas = {}
    for k in order:
        rows = [0] * n
        for k2 in range(len(irr)):
            if k2 != k and E.leq(irr[k], irr[k2]):
                rows = [a | b for a, b in zip(rows, thetas[k2])]
        for _ in range(rng.randint(0, seeds)):
            i, j = rng.randrange(n), rng.randrange(n)
            rows[i] |= 1 << j
        thetas[k] = _close(P, rows)
    table = [[0] * n for _ in range(n)]
    for k, rows in thetas.items():
        b = 1 << k
        for i in range(n):
            for j in bits(rows[i]):
                table[i][j] |= b
    return from_codes(P, E, table)


def random_measured_structure(rng: random.Random, max_p: int = 5, max_e: int = 6) -> MeasuredPL:
    n = rng.randint(1, max_p)
    P = random_partial_lattice(rng, n)
    E = random_dist_lattice(rng, max_e)
    return random_measured(rng, P, E)


def small_lattices() -> list:
    """All ten lattices with at most five elements, up to isomorphism, as ``(name, poset)``."""
    def poset(names, pairs):
        return build_poset(names, pairs)

    out = [(f"chain{n}", poset([str(i) for i in range(n)], [(str(i), str(i + 1)) for i in range(n - 1)]))
           for n in range(1, 6)]
    out.append(("square", poset("0ab1", [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])))
    out.append(("M3", poset("0abc1", [("0", x) for x in "abc"] + [(x, "1") for x in "abc"])))
    out.append(("N5", poset("0abc1", [("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")])))
    out.append(("square+top", poset("0abst", [("0", "a"), ("0", "b"), ("a", "s"), ("b", "s"), ("s", "t")])))
    out.append(("square+bottom", poset("z0ab1", [("z", "0"), ("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])))
    return out


def _extend(rng: random.Random, K: PartialLattice, extra: list, p_order: float, p_op: float):
    """``K`` plus ``extra`` points with random relations, or ``None`` if ``K`` stops embedding."""
    ks = list(K.elements)
    pairs = list(K.poset.le)
    for i, x in enumerate(extra):
        for y in extra[i + 1:]:
            if rng.random() < p_order:
                pairs.append((x, y))
        for k in ks:
            r = rng.random()
            if r < p_order / 2:
                pairs.append((x, k))
            elif r < p_order:
                pairs.append((k, x))
    try:
        poset = build_poset(ks + extra, pairs)
    except ValidationError:
        return None
    if any(poset.leq(a, b) != K.leq(a, b) for a in ks for b in ks):
        return None
    joins, meets = {}, {}
    els = poset.elements
    n = len(els)
    for k in range(2, n + 1):
        for combo in combinations(range(n), k):
            m = sum(1 << i for i in combo)
            X = frozenset(els[i] for i in combo)
            s = poset.sup_index(m)
            if s is not None and (X in K.joins or rng.random() < p_op):
                joins[X] = els[s]
            t = poset.inf_index(m)
            if t is not None and (X in K.meets or rng.random() < p_op):
                meets[X] = els[t]
    if any(joins.get(X) != a for X, a in K.joins.items() if len(X) > 1):
        return None
    if any(meets.get(X) != a for X, a in K.meets.items() if len(X) > 1):
        return None
    return augment_singletons(PartialLattice(poset, joins, meets))


def random_formation(rng: random.Random, max_extra: int = 2, measured: bool = True,
                     E: DistLattice = None, standard: bool = True,
                     p_order: float = 0.5, p_op: float = 0.5):
    """A random V-formation ``P ← K → Q`` with ``K`` a lattice of at most three elements.

    ``P`` and ``Q`` add up to ``max_extra`` points each.  Measured formations
    take their tables from one random table on the plain pushout, so both
    maps are isometries.  With ``standard`` false, ``Q`` is renamed so that
    ``K`` maps to fresh ids and its other ids clash with ``P``'s.
    """
    from .amalgam import VFormation, pushout_pl

    cat = dict(small_lattices())
    while True:
        K = lattice_pl(cat[rng.choice(["chain1", "chain2", "chain3", "square"])])
        P = _extend(rng, K, [f"p{i}" for i in range(rng.randint(0, max_extra))], p_order, p_op)
        Q = _extend(rng, K, [f"q{i}" for i in range(rng.randint(0, max_extra))], p_order, p_op)
        if P is None or Q is None:
            continue
        ident = {k: k for k in K.elements}
        v = VFormation(K, P, Q, dict(ident), dict(ident))
        try:
            R, _, _ = pushout_pl(v)
        except ValidationError:
            continue
        break
    if measured:
        MR = random_measured(rng, R, E or random_dist_lattice(rng))
        v = VFormation(_restrict(MR, K), _restrict(MR, P), _restrict(MR, Q), v.f, v.g)
    if not standard:
        ren = {x: (f"k{x}" if x in K.index else x.replace("q", "p")) for x in Q.elements}
        from .amalgam import _rename
        v = VFormation(v.K, v.P, _rename(v.Q, ren), v.f, {k: ren[k] for k in K.elements})
    return v


def _restrict(M: MeasuredPL, pl: PartialLattice) -> MeasuredPL:
    idx = M.index
    return MeasuredPL(pl, M.E, [[M.table[idx[x]][idx[y]] for y in pl.elements] for x in pl.elements])
