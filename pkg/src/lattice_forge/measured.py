"""Measured partial lattices: Boolean values of order statements.

All values are Birkhoff codes of the value lattice ``E`` (see
:mod:`lattice_forge.order`), with ``⟦x≤x⟧ = E.top``.  The zero convention
(values in ``D``, the dual of ``E``) appears only in :func:`from_phi_table`
and :func:`phi_of`.

Functions taking element ids are the public surface.  The ``_vec`` helpers
compute a value for every element at once and are cached on the structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Optional

from .errors import (
    AxiomViolation,
    EmptyArgument,
    EmptyDomain,
    TableNotTotal,
    UnknownElement,
    ValueLatticeMismatch,
)
from .order import DistLattice, PrimeFilter, bits, chain_lattice, dualize, prime_filters
from .partial import (
    Congruence,
    PartialLattice,
    PLHom,
    _filn_mask,
    _idn_mask,
    cong_closure,
    is_embedding,
    quotient_by_cong,
)


def submasks(mask: int):
    """Nonempty submasks of ``mask``, in decreasing numeric order."""
    s = mask
    while s:
        yield s
        s = (s - 1) & mask


class MeasuredPL:
    """A partial lattice with a table ``⟦x≤y⟧`` of coded ``E`` values.

    Construct through :func:`from_phi_table` or :func:`from_bv_table`, which
    validate the axioms.  ``table[i][j]`` is the value for the elements of
    index ``i`` and ``j``.
    """

    def __init__(self, pl: PartialLattice, E: DistLattice, table):
        self.pl = pl
        self.E = E
        self.table = tuple(tuple(r) for r in table)
        n = len(pl)
        t = self.table
        self.eq = tuple(tuple(t[i][j] & t[j][i] for j in range(n)) for i in range(n))
        self._cache = {}

    @property
    def elements(self):
        return self.pl.elements

    @property
    def index(self):
        return self.pl.index

    def __len__(self):
        return len(self.pl)

    def __repr__(self):
        return f"MeasuredPL({list(self.elements)!r}, E={list(self.E.elements)!r})"

    def bv(self, x, y) -> int:
        idx = self.pl.index
        return self.table[idx[x]][idx[y]]

    def mask(self, xs) -> int:
        return self.pl.poset.mask(xs)

    def as_ids(self) -> dict:
        """The table as ``{(x, y): E-id}``."""
        els = self.elements
        dec = self.E.decode
        return {(els[i], els[j]): dec(v) for i, r in enumerate(self.table) for j, v in enumerate(r)}

    def memo(self, key, compute):
        c = self._cache
        if key not in c:
            c[key] = compute()
        return c[key]


def axiom_violation(pl: PartialLattice, E: DistLattice, t) -> Optional[tuple]:
    """First failing measured axiom as ``(clause, witness)``, else ``None``."""
    n = len(pl)
    els = pl.elements
    top = E.top
    for i in range(n):
        if t[i][i] != top:
            return ("reflexive", (els[i],))
    for i in range(n):
        for j in bits(pl.poset.up[i]):
            if t[i][j] != top:
                return ("order", (els[i], els[j]))
    for i in range(n):
        ti = t[i]
        for j in range(n):
            a = ti[j]
            tj = t[j]
            for k in range(n):
                if a & tj[k] & ~ti[k]:
                    return ("transitive", (els[i], els[j], els[k]))
    for X, a in pl._jl:
        xs = list(bits(X))
        for b in range(n):
            v = top
            for x in xs:
                v &= t[x][b]
            if v != t[a][b]:
                return ("join", (els[a], frozenset(els[x] for x in xs), els[b]))
    for X, a in pl._ml:
        xs = list(bits(X))
        for b in range(n):
            v = top
            for x in xs:
                v &= t[b][x]
            if v != t[b][a]:
                return ("meet", (els[a], frozenset(els[x] for x in xs), els[b]))
    return None


def from_codes(pl: PartialLattice, E: DistLattice, table, check: bool = True) -> MeasuredPL:
    if check:
        bad = axiom_violation(pl, E, table)
        if bad is not None:
            raise AxiomViolation(*bad)
    return MeasuredPL(pl, E, table)


def from_bv_table(pl: PartialLattice, E: DistLattice, values: Mapping) -> MeasuredPL:
    """Unit-convention input: ``values[(x, y)]`` is an ``E`` id.

    Pairs with ``x ≤ y`` may be omitted (they default to the top of ``E``).
    """
    els = pl.elements
    n = len(els)
    table = [[0] * n for _ in range(n)]
    for i, x in enumerate(els):
        for j, y in enumerate(els):
            if (x, y) in values:
                table[i][j] = E.encode(values[(x, y)])
            elif pl.poset.up[i] >> j & 1:
                table[i][j] = E.top
            else:
                raise TableNotTotal(x, y)
    for x, y in values:
        if x not in pl.index:
            raise UnknownElement(x)
        if y not in pl.index:
            raise UnknownElement(y)
    return from_codes(pl, E, table)


def from_order(pl: PartialLattice, E: DistLattice = None) -> MeasuredPL:
    """The classical reading: ``⟦x≤y⟧`` is top when ``x ≤ y`` and bottom otherwise.

    ``E`` defaults to the two-element chain ``0 < 1``.
    """
    if E is None:
        E = chain_lattice(["0", "1"])
    up = pl.poset.up
    n = len(pl)
    table = [[E.top if up[i] >> j & 1 else 0 for j in range(n)] for i in range(n)]
    return from_codes(pl, E, table)


def from_phi_table(pl: PartialLattice, D: DistLattice, t: Mapping, E: DistLattice = None) -> MeasuredPL:
    """Zero-convention input: ``t[(x, y)]`` is the ``D`` value of ``Θ⁺(x, y)``.

    Pairs with ``x ≤ y`` may be omitted (default: bottom of ``D``).  The
    value lattice of the result is ``E = dualize(D)``, on the same ids.
    """
    if E is None:
        E = dualize(D)
    els = pl.elements
    vals = {}
    for i, x in enumerate(els):
        for j, y in enumerate(els):
            if (x, y) in t:
                d = t[(x, y)]
                if d not in D.poset.index:
                    raise UnknownElement(d)
                vals[(x, y)] = d
            elif pl.poset.up[i] >> j & 1:
                vals[(x, y)] = D.bot_id
            else:
                raise TableNotTotal(x, y)
    return from_bv_table(pl, E, vals)


def phi_of(M: MeasuredPL, pairs: Iterable[tuple]) -> str:
    """``φ`` of the congruence generated by ``pairs``, as an id of ``D``."""
    v = M.E.top
    for x, y in pairs:
        v &= M.bv(x, y)
    return M.E.decode(v)


# set-level values

def bv_eq(M: MeasuredPL, a, b) -> int:
    idx = M.index
    return M.eq[idx[a]][idx[b]]


def _in_vec(M: MeasuredPL, Y: int) -> tuple:
    def compute():
        ys = list(bits(Y))
        out = []
        for row in M.eq:
            v = 0
            for y in ys:
                v |= row[y]
            out.append(v)
        return tuple(out)
    return M.memo(("in", Y), compute)


def _subset_mask(M: MeasuredPL, X: int, Y: int) -> int:
    vec = _in_vec(M, Y)
    v = M.E.top
    for x in bits(X):
        v &= vec[x]
    return v


def _seteq_mask(M: MeasuredPL, X: int, Y: int) -> int:
    key = ("seteq", X, Y) if X <= Y else ("seteq", Y, X)
    return M.memo(key, lambda: _subset_mask(M, X, Y) & _subset_mask(M, Y, X))


def bv_in(M: MeasuredPL, a, Y) -> int:
    Y = M.mask(Y)
    if not Y:
        raise EmptyArgument("Y")
    return _in_vec(M, Y)[M.index[a]]


def bv_subset(M: MeasuredPL, X, Y) -> int:
    X, Y = M.mask(X), M.mask(Y)
    if not X or not Y:
        raise EmptyArgument("X and Y")
    return _subset_mask(M, X, Y)


def bv_seteq(M: MeasuredPL, X, Y) -> int:
    X, Y = M.mask(X), M.mask(Y)
    if not X or not Y:
        raise EmptyArgument("X and Y")
    return _seteq_mask(M, X, Y)


# covers

@dataclass(frozen=True)
class Cover:
    kind: str
    target: frozenset
    members: tuple


def is_finitely_covering(M: MeasuredPL) -> bool:
    return bool(M.pl.joins) and bool(M.pl.meets)


def _domain(M: MeasuredPL, kind: str):
    if kind == "join":
        dom = M.pl._jl
    elif kind == "meet":
        dom = M.pl._ml
    else:
        raise ValueError(f"kind must be 'join' or 'meet', not {kind!r}")
    if not dom:
        raise EmptyDomain(kind)
    return dom


def covers(M: MeasuredPL, X, kind: str = "join") -> Cover:
    """The whole domain, which covers every ``X`` of a finite structure."""
    dom = _domain(M, kind)
    els = M.elements
    members = tuple(frozenset(els[i] for i in bits(Y)) for Y, _ in dom)
    return Cover(kind, frozenset(X), members)


def verify_cover(M: MeasuredPL, cover: Cover) -> bool:
    X = M.mask(cover.target)
    dom = _domain(M, cover.kind)
    got = 0
    for Z in cover.members:
        got |= _seteq_mask(M, X, M.mask(Z))
    return all(_seteq_mask(M, X, Y) & ~got == 0 for Y, _ in dom)


# ⟦a = ⋁X⟧ and ⟦a = ⋀X⟧

def _eq_vec(M: MeasuredPL, X: int, kind: str, restrict=None) -> tuple:
    def compute():
        dom = _domain(M, kind)
        if restrict is not None:
            dom = [(Y, b) for Y, b in dom if Y in restrict]
        acc = {}
        for Y, b in dom:
            s = _seteq_mask(M, X, Y)
            if s:
                acc[b] = acc.get(b, 0) | s
        out = []
        for row in M.eq:
            v = 0
            for b, s in acc.items():
                v |= row[b] & s
            out.append(v)
        return tuple(out)
    if restrict is not None:
        return compute()
    return M.memo((kind + "eq", X), compute)


def bv_join_eq(M: MeasuredPL, a, X, cover: Cover = None) -> int:
    Xm = M.mask(X)
    restrict = None if cover is None else {M.mask(Z) for Z in cover.members}
    return _eq_vec(M, Xm, "join", restrict)[M.index[a]]


def bv_meet_eq(M: MeasuredPL, a, X, cover: Cover = None) -> int:
    Xm = M.mask(X)
    restrict = None if cover is None else {M.mask(Z) for Z in cover.members}
    return _eq_vec(M, Xm, "meet", restrict)[M.index[a]]


@dataclass(frozen=True)
class Sample:
    kind: str
    target: frozenset
    members: frozenset
    index: Optional[int] = None


def _dom_values(M: MeasuredPL, kind: str) -> int:
    m = 0
    for _, b in _domain(M, kind):
        m |= 1 << b
    return m


def join_sample(M: MeasuredPL, X) -> Sample:
    els = M.elements
    return Sample("join", frozenset(X), frozenset(els[i] for i in bits(_dom_values(M, "join"))))


def meet_sample(M: MeasuredPL, X) -> Sample:
    els = M.elements
    return Sample("meet", frozenset(X), frozenset(els[i] for i in bits(_dom_values(M, "meet"))))


def verify_join_sample(M: MeasuredPL, X, U) -> bool:
    vec = _eq_vec(M, M.mask(X), "join")
    got = 0
    for u in bits(M.mask(U)):
        got |= vec[u]
    return all(v & ~got == 0 for v in vec)


def verify_meet_sample(M: MeasuredPL, X, U) -> bool:
    vec = _eq_vec(M, M.mask(X), "meet")
    got = 0
    for u in bits(M.mask(U)):
        got |= vec[u]
    return all(v & ~got == 0 for v in vec)


def _le_join_vec(M: MeasuredPL, X: int, U: int = None) -> tuple:
    """``⟦a ≤ ⋁X⟧`` for every ``a``, over the join sample ``U``."""
    def compute(U=U):
        if U is None:
            U = _dom_values(M, "join")
        je = _eq_vec(M, X, "join")
        us = [(u, je[u]) for u in bits(U) if je[u]]
        out = []
        for row in M.table:
            v = 0
            for u, w in us:
                v |= row[u] & w
            out.append(v)
        return tuple(out)
    if U is None:
        return M.memo(("lejoin", X), compute)
    return compute()


def _meet_le_vec(M: MeasuredPL, X: int, U: int = None) -> tuple:
    """``⟦⋀X ≤ a⟧`` for every ``a``, over the meet sample ``U``."""
    def compute(U=U):
        if U is None:
            U = _dom_values(M, "meet")
        me = _eq_vec(M, X, "meet")
        us = [(u, me[u]) for u in bits(U) if me[u]]
        t = M.table
        out = []
        for a in range(len(M)):
            v = 0
            for u, w in us:
                v |= t[u][a] & w
            out.append(v)
        return tuple(out)
    if U is None:
        return M.memo(("meetle", X), compute)
    return compute()


def bv_le_join(M: MeasuredPL, a, X, sample: Sample = None) -> int:
    U = None if sample is None else M.mask(sample.members)
    return _le_join_vec(M, M.mask(X), U)[M.index[a]]


def bv_meet_le(M: MeasuredPL, a, X, sample: Sample = None) -> int:
    """``⟦⋀X ≤ a⟧``."""
    U = None if sample is None else M.mask(sample.members)
    return _meet_le_vec(M, M.mask(X), U)[M.index[a]]


# (Id∧) and (Fil∧) samples

def idm_sample(M: MeasuredPL, X) -> Sample:
    return Sample("idm", frozenset(X), frozenset(M.elements))


def film_sample(M: MeasuredPL, X) -> Sample:
    return Sample("film", frozenset(X), frozenset(M.elements))


def verify_idm(M: MeasuredPL, X, U) -> bool:
    """``⋀_x⟦a≤x⟧ ≤ ⋁_u ⟦a≤u⟧∧⋀_x⟦u≤x⟧`` for every ``a``."""
    xs = [M.index[x] for x in X]
    us = [M.index[u] for u in U]
    t = M.table
    top = M.E.top
    low = []
    for r in t:
        v = top
        for x in xs:
            v &= r[x]
        low.append(v)
    for a in range(len(M)):
        rhs = 0
        for u in us:
            rhs |= t[a][u] & low[u]
        if low[a] & ~rhs:
            return False
    return True


def verify_film(M: MeasuredPL, X, U) -> bool:
    xs = [M.index[x] for x in X]
    us = [M.index[u] for u in U]
    t = M.table
    top = M.E.top
    n = len(M)
    high = []
    for a in range(n):
        v = top
        for x in xs:
            v &= t[x][a]
        high.append(v)
    for a in range(n):
        rhs = 0
        for u in us:
            rhs |= t[u][a] & high[u]
        if high[a] & ~rhs:
            return False
    return True


# ⟦a ∈ Id_n(X,U)⟧ and ⟦a ∈ Fil_n(X,U)⟧

def _steps(M: MeasuredPL, U: int, kind: str) -> tuple:
    """Nonempty ``Z ⊆ U`` with a nonzero ``⟦a ≤ ⋁Z⟧`` (or ``⟦⋀Z ≤ a⟧``) vector."""
    def compute():
        vecf = _le_join_vec if kind == "id" else _meet_le_vec
        out = []
        for Z in submasks(U):
            vec = vecf(M, Z)
            if any(vec):
                out.append((tuple(bits(Z)), vec))
        return tuple(out)
    return M.memo(("steps", kind, U), compute)


def _levels(M: MeasuredPL, X: int, U: int, n: int, kind: str) -> list:
    """Vectors of levels ``0..n``; stops computing once a level repeats."""
    t = M.table
    N = len(M)
    xs = list(bits(X))
    if kind == "id":
        base = []
        for r in t:
            v = 0
            for x in xs:
                v |= r[x]
            base.append(v)
    else:
        base = []
        for a in range(N):
            v = 0
            for x in xs:
                v |= t[x][a]
            base.append(v)
    levels = [tuple(base)]
    steps = _steps(M, U, kind)
    top = M.E.top
    while len(levels) <= n:
        cur = levels[-1]
        new = list(cur)
        for zs, vec in steps:
            c = top
            for z in zs:
                c &= cur[z]
                if not c:
                    break
            if c:
                for a in range(N):
                    new[a] |= vec[a] & c
        new = tuple(new)
        if new == cur:
            levels.extend([cur] * (n + 1 - len(levels)))
            break
        levels.append(new)
    return levels


def bv_in_idn(M: MeasuredPL, a, X, U, n: int) -> int:
    return _levels(M, M.mask(X), M.mask(U), n, "id")[n][M.index[a]]


def bv_in_filn(M: MeasuredPL, a, X, U, n: int) -> int:
    return _levels(M, M.mask(X), M.mask(U), n, "fil")[n][M.index[a]]


def idj_sample(M: MeasuredPL, X) -> Sample:
    return Sample("idj", frozenset(X), frozenset(M.elements), len(M))


def filj_sample(M: MeasuredPL, X) -> Sample:
    return Sample("filj", frozenset(X), frozenset(M.elements), len(M))


def _verify_j(M: MeasuredPL, X, U, n: int, kind: str) -> bool:
    Xm, Um = M.mask(X), M.mask(U)
    ref = _levels(M, Xm, Um, n, kind)[n]
    rest = M.pl.full & ~Um
    for extra in [0, *submasks(rest)]:
        if _levels(M, Xm, Um | extra, n + 1, kind)[n + 1] != ref:
            return False
    return True


def verify_idj(M: MeasuredPL, X, U, n: int) -> bool:
    """The defining equality of an (Id∨)-sample, for all ``Y ⊇ U`` in the carrier."""
    return _verify_j(M, X, U, n, "id")


def verify_filj(M: MeasuredPL, X, U, n: int) -> bool:
    return _verify_j(M, X, U, n, "fil")


def _id_vec(M: MeasuredPL, X: int) -> tuple:
    return M.memo(("idvec", X), lambda: _levels(M, X, M.pl.full, len(M), "id")[-1])


def _fil_vec(M: MeasuredPL, X: int) -> tuple:
    return M.memo(("filvec", X), lambda: _levels(M, X, M.pl.full, len(M), "fil")[-1])


def bv_in_id(M: MeasuredPL, a, X, sample: Sample = None) -> int:
    if sample is None:
        return _id_vec(M, M.mask(X))[M.index[a]]
    return bv_in_idn(M, a, X, sample.members, sample.index)


def bv_in_fil(M: MeasuredPL, a, X, sample: Sample = None) -> int:
    if sample is None:
        return _fil_vec(M, M.mask(X))[M.index[a]]
    return bv_in_filn(M, a, X, sample.members, sample.index)


def is_balanced(M: MeasuredPL) -> bool:
    if not is_finitely_covering(M):
        return False
    els = M.elements
    for x, y in combinations(els, 2):
        if not verify_idm(M, (x, y), els) or not verify_film(M, (x, y), els):
            return False
    n = len(M)
    for X in submasks(M.pl.full):
        xs = M.pl.poset.subset(X)
        if not verify_idj(M, xs, els, n) or not verify_filj(M, xs, els, n):
            return False
    return True


def minimal_sample(M: MeasuredPL, kind: str, X) -> Sample:
    """Greedy shrinking of the default sample, re-verifying after each removal."""
    X = frozenset(X)
    if kind == "join":
        start, ok = join_sample(M, X).members, lambda U: verify_join_sample(M, X, U)
    elif kind == "meet":
        start, ok = meet_sample(M, X).members, lambda U: verify_meet_sample(M, X, U)
    elif kind == "idm":
        start, ok = frozenset(M.elements), lambda U: verify_idm(M, X, U)
    elif kind == "film":
        start, ok = frozenset(M.elements), lambda U: verify_film(M, X, U)
    else:
        raise ValueError(f"no minimal search for {kind!r}")
    members = [u for u in M.elements if u in start]
    for u in list(members):
        trial = [w for w in members if w != u]
        if trial and ok(trial):
            members = trial
    return Sample(kind, X, frozenset(members))


# quotients at a prime filter

def _in_filter(G) -> int:
    if isinstance(G, PrimeFilter):
        return G.bit
    return int(G)


def quotient(M: MeasuredPL, G):
    """``P/G`` and the projection ``x ↦ cls(x, G)``.

    Classes are named by their first member in input order.
    """
    bit = _in_filter(G)
    n = len(M)
    rows = [0] * n
    for i, r in enumerate(M.table):
        m = 0
        for j, v in enumerate(r):
            if v >> bit & 1:
                m |= 1 << j
        rows[i] = m
    c = Congruence(M.pl, rows)
    return quotient_by_cong(M.pl, c)


@dataclass
class TruthReport:
    ok: bool
    checked: int
    counterexample: Optional[dict] = None

    def __bool__(self):
        return self.ok


def check_truth_lemmas(M: MeasuredPL, max_subset: int = None, u_family: str = "both") -> TruthReport:
    """Compare ``P/G`` with the Boolean values at every prime filter ``G``.

    Statements checked for each ``a`` and each nonempty ``X`` (of size at
    most ``max_subset``): ``a=⋁X``, ``a≤⋁X``, ``a=⋀X``, ``⋀X≤a``, membership
    in ``Id_n(X,U)``/``Fil_n(X,U)`` for ``n ≤ |P|+1`` and ``U`` the carrier
    and ``X`` itself, and membership in ``Id(X)``/``Fil(X)``.
    """
    from .partial import _filter_mask, _ideal_mask

    n = len(M)
    els = M.elements
    subsets = [X for X in submasks(M.pl.full)
               if max_subset is None or bin(X).count("1") <= max_subset]
    subsets.sort()
    checked = 0
    for G in prime_filters(M.E):
        bit = G.bit
        Q, proj = quotient(M, G)
        qi = Q.index
        cls = [qi[proj(x)] for x in els]

        def up(X):
            m = 0
            for i in bits(X):
                m |= 1 << cls[i]
            return m

        def fail(stmt, a, X, extra=None):
            return TruthReport(False, checked, {
                "filter": G.generator, "statement": stmt, "a": els[a],
                "X": sorted(els[i] for i in bits(X)), "extra": extra})

        for X in subsets:
            XG = up(X)
            jv = Q._jmap.get(XG)
            mv = Q._mmap.get(XG)
            je = _eq_vec(M, X, "join")
            me = _eq_vec(M, X, "meet")
            lj = _le_join_vec(M, X)
            ml = _meet_le_vec(M, X)
            for a in range(n):
                ca = cls[a]
                checks = (
                    ("a=joinX", jv == ca, je[a]),
                    ("a<=joinX", jv is not None and Q.poset.up[ca] >> jv & 1 == 1, lj[a]),
                    ("a=meetX", mv == ca, me[a]),
                    ("meetX<=a", mv is not None and Q.poset.up[mv] >> ca & 1 == 1, ml[a]),
                )
                for stmt, classical, value in checks:
                    checked += 1
                    if classical != bool(value >> bit & 1):
                        return fail(stmt, a, X)
            us = [M.pl.full] if u_family == "carrier" else [M.pl.full, X]
            if u_family == "both" and X == M.pl.full:
                us = [X]
            for U in us:
                UG = up(U)
                for kind, classical_fn in (("id", _idn_mask), ("fil", _filn_mask)):
                    levels = _levels(M, X, U, n + 1, kind)
                    for k, vec in enumerate(levels):
                        cm = classical_fn(Q, XG, UG, k)
                        for a in range(n):
                            checked += 1
                            if bool(cm >> cls[a] & 1) != bool(vec[a] >> bit & 1):
                                return fail(f"a in {kind}_{k}(X,U)", a, X, sorted(els[i] for i in bits(U)))
            idm_ = _ideal_mask(Q, XG)
            fim_ = _filter_mask(Q, XG)
            iv = _id_vec(M, X)
            fv = _fil_vec(M, X)
            for a in range(n):
                checked += 2
                if bool(idm_ >> cls[a] & 1) != bool(iv[a] >> bit & 1):
                    return fail("a in Id(X)", a, X)
                if bool(fim_ >> cls[a] & 1) != bool(fv[a] >> bit & 1):
                    return fail("a in Fil(X)", a, X)
    return TruthReport(True, checked)


def kernel_projection(M: MeasuredPL):
    """Collapse pairs with value top; returns ``(proper structure, projection)``."""
    top = M.E.top
    seed = [(M.elements[i], M.elements[j])
            for i, r in enumerate(M.table) for j, v in enumerate(r) if v == top]
    c = cong_closure(M.pl, seed)
    Q, proj = quotient_by_cong(M.pl, c)
    idx = M.index
    table = [[M.table[idx[x]][idx[y]] for y in Q.elements] for x in Q.elements]
    return from_codes(Q, M.E, table), proj


def is_proper(M: MeasuredPL) -> bool:
    top = M.E.top
    up = M.pl.poset.up
    return all((v == top) == bool(up[i] >> j & 1)
               for i, r in enumerate(M.table) for j, v in enumerate(r))


def restrict(M: MeasuredPL, pl: PartialLattice, mapping: Mapping = None) -> MeasuredPL:
    """Pull the table of ``M`` back along ``mapping`` (identity by default)."""
    mapping = mapping or {x: x for x in pl.elements}
    idx = M.index
    table = [[M.table[idx[mapping[x]]][idx[mapping[y]]] for y in pl.elements] for x in pl.elements]
    return from_codes(pl, M.E, table)


def _mapping(f):
    return f.mapping if isinstance(f, PLHom) else dict(f)


def is_uniform(M: MeasuredPL, N: MeasuredPL, f) -> bool:
    if M.E != N.E:
        raise ValueLatticeMismatch("the two structures use different value lattices")
    m = _mapping(f)
    for x in M.elements:
        for y in M.elements:
            if M.bv(x, y) & ~N.bv(m[x], m[y]):
                return False
    return True


def is_isometry(M: MeasuredPL, N: MeasuredPL, f) -> bool:
    if M.E != N.E:
        raise ValueLatticeMismatch("the two structures use different value lattices")
    m = _mapping(f)
    if not is_embedding(PLHom(M.pl, N.pl, m)):
        return False
    return all(M.bv(x, y) == N.bv(m[x], m[y]) for x in M.elements for y in M.elements)
