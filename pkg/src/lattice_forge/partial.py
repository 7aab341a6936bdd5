"""Finite partial lattices, their congruences, and ideal generation.

A congruence is a preorder containing the order and compatible with the
defined joins and meets; it is stored as one bitmask row per element
(``rows[i]`` holds every ``j`` with ``i ⪯ j``).
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Mapping

from .errors import EmptyKey, NotAHomomorphism, NotALattice, NotInf, NotSup, SizeLimit, UnknownElement
from .order import FinitePoset, bits, build_poset


def _norm_table(table) -> dict:
    """Accept a mapping ``{args: value}`` or an iterable of ``(args, value)``."""
    items = table.items() if isinstance(table, Mapping) else table
    out = {}
    for args, value in items:
        out[frozenset(args)] = value
    return out


class PartialLattice:
    """A poset with partial join and meet maps keyed by nonempty subsets.

    Use :func:`validate_pl` to build one from raw data; the constructor trusts
    its input.
    """

    def __init__(self, poset: FinitePoset, joins: dict, meets: dict):
        self.poset = poset
        self.joins = dict(joins)
        self.meets = dict(meets)
        idx = poset.index
        self._jl = tuple((poset.mask(X), idx[a]) for X, a in self.joins.items())
        self._ml = tuple((poset.mask(X), idx[a]) for X, a in self.meets.items())
        self._jmap = dict(self._jl)
        self._mmap = dict(self._ml)

    @property
    def elements(self):
        return self.poset.elements

    @property
    def index(self):
        return self.poset.index

    def __len__(self):
        return len(self.poset)

    def __repr__(self):
        return f"PartialLattice({list(self.elements)!r}, joins={len(self.joins)}, meets={len(self.meets)})"

    def __eq__(self, other):
        return (
            isinstance(other, PartialLattice)
            and self.poset == other.poset
            and self.joins == other.joins
            and self.meets == other.meets
        )

    def __hash__(self):
        return hash(self.poset)

    def leq(self, x, y) -> bool:
        return self.poset.leq(x, y)

    def join_of(self, X):
        """The declared join of ``X`` or ``None``."""
        return self.joins.get(frozenset(X))

    def meet_of(self, X):
        return self.meets.get(frozenset(X))

    @property
    def full(self) -> int:
        return (1 << len(self.poset)) - 1


def validate_pl(poset: FinitePoset, joins=(), meets=()) -> PartialLattice:
    joins = _norm_table(joins)
    meets = _norm_table(meets)
    for kind, table in (("join", joins), ("meet", meets)):
        for X, a in table.items():
            if not X:
                raise EmptyKey(kind)
            for x in list(X) + [a]:
                if x not in poset.index:
                    raise UnknownElement(x)
    els = poset.elements
    for X, a in joins.items():
        m = poset.mask(X)
        i = poset.index[a]
        ub = (1 << len(els)) - 1
        for x in bits(m):
            ub &= poset.up[x]
        if not ub >> i & 1:
            raise NotSup(a, X, None)
        bad = ub & ~poset.up[i]
        if bad:
            raise NotSup(a, X, els[next(bits(bad))])
    for X, a in meets.items():
        m = poset.mask(X)
        i = poset.index[a]
        lb = (1 << len(els)) - 1
        for x in bits(m):
            lb &= poset.down[x]
        if not lb >> i & 1:
            raise NotInf(a, X, None)
        bad = lb & ~poset.down[i]
        if bad:
            raise NotInf(a, X, els[next(bits(bad))])
    return PartialLattice(poset, joins, meets)


def augment_singletons(P: PartialLattice) -> PartialLattice:
    joins = dict(P.joins)
    meets = dict(P.meets)
    for a in P.elements:
        joins.setdefault(frozenset([a]), a)
        meets.setdefault(frozenset([a]), a)
    return PartialLattice(P.poset, joins, meets)


def lattice_pl(poset: FinitePoset, full: bool = False) -> PartialLattice:
    """View a finite lattice as a partial lattice.

    By default only singleton and two-element joins/meets are recorded: this
    gives the same congruences, homomorphisms into lattices and free lattice
    as the total structure while keeping the domains small.  ``full=True``
    records every nonempty subset.
    """
    n = len(poset)
    if n == 0:
        raise NotALattice(message="empty poset")
    els = poset.elements
    joins, meets = {}, {}
    sizes = range(1, n + 1) if full else (1, 2)
    for k in sizes:
        for combo in combinations(range(n), k):
            m = 0
            for i in combo:
                m |= 1 << i
            s = poset.sup_index(m)
            t = poset.inf_index(m)
            if s is None or t is None:
                raise NotALattice(els[combo[0]], els[combo[-1]])
            key = frozenset(els[i] for i in combo)
            joins[key] = els[s]
            meets[key] = els[t]
    return PartialLattice(poset, joins, meets)


def is_total_lattice(P: PartialLattice) -> bool:
    """True when the underlying poset is a lattice (whatever the domains)."""
    n = len(P)
    if n == 0:
        return False
    for i in range(n):
        for j in range(i + 1, n):
            m = (1 << i) | (1 << j)
            if P.poset.sup_index(m) is None or P.poset.inf_index(m) is None:
                return False
    return True


# congruences

class Congruence:
    __slots__ = ("pl", "rows", "_hash")

    def __init__(self, pl: PartialLattice, rows):
        self.pl = pl
        self.rows = tuple(rows)
        self._hash = hash(self.rows)

    def __eq__(self, other):
        return isinstance(other, Congruence) and self.rows == other.rows

    def __hash__(self):
        return self._hash

    def __le__(self, other):
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def __lt__(self, other):
        return self != other and self <= other

    def __repr__(self):
        return f"Congruence({sorted(self.pairs)!r})"

    def leq(self, x, y) -> bool:
        idx = self.pl.index
        return bool(self.rows[idx[x]] >> idx[y] & 1)

    @property
    def pairs(self) -> frozenset:
        els = self.pl.elements
        return frozenset((els[i], els[j]) for i, r in enumerate(self.rows) for j in bits(r))

    def size(self) -> int:
        return sum(bin(r).count("1") for r in self.rows)

    def classes(self) -> list:
        """Equivalence classes of ``⪯ ∩ ⪰`` as index masks, by least member."""
        n = len(self.rows)
        seen = 0
        out = []
        for i in range(n):
            if seen >> i & 1:
                continue
            cls = 0
            for j in bits(self.rows[i]):
                if self.rows[j] >> i & 1:
                    cls |= 1 << j
            seen |= cls
            out.append(cls)
        return out


def _close(pl: PartialLattice, rows) -> tuple:
    rows = list(rows)
    n = len(rows)
    for i in range(n):
        rows[i] |= pl.poset.up[i]
    jl, ml = pl._jl, pl._ml
    changed = True
    while changed:
        changed = False
        for k in range(n):
            bk = 1 << k
            rk = rows[k]
            for i in range(n):
                if rows[i] & bk and rk & ~rows[i]:
                    rows[i] |= rk
        for X, a in jl:
            common = -1
            for x in bits(X):
                common &= rows[x]
            if common & ~rows[a]:
                rows[a] |= common
                changed = True
        for X, a in ml:
            ba = 1 << a
            for b in range(n):
                if rows[b] & X == X and not rows[b] & ba:
                    rows[b] |= ba
                    changed = True
    return tuple(rows)


def cong_closure(P: PartialLattice, seed_pairs: Iterable[tuple] = ()) -> Congruence:
    idx = P.index
    rows = [0] * len(P)
    for x, y in seed_pairs:
        if x not in idx:
            raise UnknownElement(x)
        if y not in idx:
            raise UnknownElement(y)
        rows[idx[x]] |= 1 << idx[y]
    return Congruence(P, _close(P, rows))


def cong_join(a: Congruence, b: Congruence) -> Congruence:
    return Congruence(a.pl, _close(a.pl, [x | y for x, y in zip(a.rows, b.rows)]))


def cong_meet(a: Congruence, b: Congruence) -> Congruence:
    return Congruence(a.pl, [x & y for x, y in zip(a.rows, b.rows)])


def is_congruence(P: PartialLattice, rows) -> bool:
    return tuple(rows) == _close(P, rows)


def zero_cong(P: PartialLattice) -> Congruence:
    return Congruence(P, P.poset.up)


def one_cong(P: PartialLattice) -> Congruence:
    return Congruence(P, [P.full] * len(P))


def theta_plus(P: PartialLattice, a, b) -> Congruence:
    return cong_closure(P, [(a, b)])


def theta(P: PartialLattice, a, b) -> Congruence:
    return cong_closure(P, [(a, b), (b, a)])


class ConLattice:
    """All congruences of a finite partial lattice, ordered by inclusion.

    Congruences are listed by size, so index 0 is ``0_P`` and the last one is
    ``1_P``.  ``poset`` names them ``c0, c1, ...`` in that order.
    """

    def __init__(self, pl: PartialLattice, congruences):
        self.pl = pl
        self.congruences = list(congruences)
        self._pos = {c: i for i, c in enumerate(self.congruences)}
        names = [f"c{i}" for i in range(len(self.congruences))]
        pairs = [(names[i], names[j])
                 for i, a in enumerate(self.congruences)
                 for j, b in enumerate(self.congruences) if a <= b]
        self.poset = build_poset(names, pairs)
        self.zero = self._pos[zero_cong(pl)]
        self.one = self._pos[one_cong(pl)]

    def __len__(self):
        return len(self.congruences)

    def __getitem__(self, i) -> Congruence:
        return self.congruences[i]

    def index_of(self, c: Congruence) -> int:
        return self._pos[c]

    def join(self, i: int, j: int) -> int:
        return self._pos[cong_join(self.congruences[i], self.congruences[j])]

    def meet(self, i: int, j: int) -> int:
        return self._pos[cong_meet(self.congruences[i], self.congruences[j])]

    def principal(self, a, b) -> int:
        return self._pos[theta_plus(self.pl, a, b)]

    def hasse(self) -> list:
        """Cover pairs ``(i, j)`` with congruence ``i`` covered by ``j``."""
        idx = self.poset.index
        return [(idx[x], idx[y]) for x, y in self.poset.covers()]


def con_lattice(P: PartialLattice, cap: int = 4096) -> ConLattice:
    n = len(P)
    zero = zero_cong(P)
    found = {zero}
    principals = []
    for a in range(n):
        for b in range(n):
            if not P.poset.up[a] >> b & 1:
                rows = [0] * n
                rows[a] = 1 << b
                c = Congruence(P, _close(P, rows))
                if c not in found:
                    found.add(c)
                    principals.append(c)
                    if len(found) > cap:
                        raise SizeLimit(cap)
    # close under joins with principals: every congruence is a join of principals
    frontier = list(found)
    while frontier:
        nxt = []
        for c in frontier:
            for p in principals:
                if p <= c:
                    continue
                d = cong_join(c, p)
                if d not in found:
                    found.add(d)
                    nxt.append(d)
                    if len(found) > cap:
                        raise SizeLimit(cap)
        frontier = nxt
    ordered = sorted(found, key=lambda c: (c.size(), c.rows))
    return ConLattice(P, ordered)


# homomorphisms

class PLHom:
    """A map between partial lattices, given as a dict on element ids."""

    def __init__(self, source: PartialLattice, target: PartialLattice, mapping: Mapping):
        self.source = source
        self.target = target
        self.mapping = dict(mapping)

    def __call__(self, x):
        return self.mapping[x]

    def __repr__(self):
        return f"PLHom({self.mapping!r})"


def hom_violation(f: PLHom):
    """First reason ``f`` is not a homomorphism, or ``None``."""
    S, T, m = f.source, f.target, f.mapping
    for x in S.elements:
        if x not in m:
            return ("undefined", x)
        if m[x] not in T.index:
            return ("unknown-image", x)
    for x, y in S.poset.le:
        if not T.leq(m[x], m[y]):
            return ("order", (x, y))
    for X, a in S.joins.items():
        if T.joins.get(frozenset(m[x] for x in X)) != m[a]:
            return ("join", (a, X))
    for X, a in S.meets.items():
        if T.meets.get(frozenset(m[x] for x in X)) != m[a]:
            return ("meet", (a, X))
    return None


def is_homomorphism(f: PLHom) -> bool:
    return hom_violation(f) is None


def check_homomorphism(f: PLHom) -> None:
    v = hom_violation(f)
    if v is not None:
        raise NotAHomomorphism(f"not a homomorphism: {v[0]} at {v[1]!r}")


def is_embedding(f: PLHom) -> bool:
    if not is_homomorphism(f):
        return False
    m = f.mapping
    S = f.source
    return all(S.leq(x, y) for x in S.elements for y in S.elements if f.target.leq(m[x], m[y]))


class ConcMap:
    """The map on congruences induced by a homomorphism."""

    def __init__(self, f: PLHom):
        self.f = f

    def __call__(self, c: Congruence) -> Congruence:
        m = self.f.mapping
        pairs = [(m[x], m[y]) for x, y in c.pairs]
        return cong_closure(self.f.target, pairs)

    def table(self, source_cons: ConLattice = None, target_cons: ConLattice = None) -> list:
        """Index table between the two congruence lattices."""
        source_cons = source_cons or con_lattice(self.f.source)
        target_cons = target_cons or con_lattice(self.f.target)
        return [target_cons.index_of(self(c)) for c in source_cons.congruences]


def conc_map(f: PLHom) -> ConcMap:
    return ConcMap(f)


def quotient_by_cong(P: PartialLattice, c: Congruence):
    """Quotient by a congruence; returns ``(quotient, projection)``.

    Each class is named by its first member in input order.
    """
    els = P.elements
    reps = {}
    names = []
    for cls in c.classes():
        rep = els[next(bits(cls))]
        names.append(rep)
        for j in bits(cls):
            reps[els[j]] = rep
    pairs = [(reps[x], reps[y]) for x, y in c.pairs]
    poset = build_poset(names, pairs)
    joins = {frozenset(reps[x] for x in X): reps[a] for X, a in P.joins.items()}
    meets = {frozenset(reps[x] for x in X): reps[a] for X, a in P.meets.items()}
    Q = PartialLattice(poset, joins, meets)
    return Q, PLHom(P, Q, reps)


# ideals and filters

def _idn_mask(P: PartialLattice, X: int, U: int, n: int) -> int:
    cur = P.poset.down_mask(X)
    for _ in range(n):
        avail = U & cur
        new = cur
        for Z, a in P._jl:
            if Z & ~avail == 0:
                new |= P.poset.down[a]
        if new == cur:
            break
        cur = new
    return cur


def _filn_mask(P: PartialLattice, X: int, U: int, n: int) -> int:
    cur = P.poset.up_mask(X)
    for _ in range(n):
        avail = U & cur
        new = cur
        for Z, a in P._ml:
            if Z & ~avail == 0:
                new |= P.poset.up[a]
        if new == cur:
            break
        cur = new
    return cur


def _ideal_mask(P: PartialLattice, X: int) -> int:
    return _idn_mask(P, X, P.full, len(P) + 1)


def _filter_mask(P: PartialLattice, X: int) -> int:
    return _filn_mask(P, X, P.full, len(P) + 1)


def idn(P: PartialLattice, X, U, n: int) -> set:
    return set(P.poset.subset(_idn_mask(P, P.poset.mask(X), P.poset.mask(U), n)))


def filn(P: PartialLattice, X, U, n: int) -> set:
    return set(P.poset.subset(_filn_mask(P, P.poset.mask(X), P.poset.mask(U), n)))


def ideal_closure(P: PartialLattice, X) -> set:
    return set(P.poset.subset(_ideal_mask(P, P.poset.mask(X))))


def filter_closure(P: PartialLattice, X) -> set:
    return set(P.poset.subset(_filter_mask(P, P.poset.mask(X))))


def is_ideal(P: PartialLattice, S) -> bool:
    m = P.poset.mask(S)
    if P.poset.down_mask(m) != m:
        return False
    return all(m >> a & 1 for Z, a in P._jl if Z & ~m == 0)


def is_filter(P: PartialLattice, S) -> bool:
    m = P.poset.mask(S)
    if P.poset.up_mask(m) != m:
        return False
    return all(m >> a & 1 for Z, a in P._ml if Z & ~m == 0)
