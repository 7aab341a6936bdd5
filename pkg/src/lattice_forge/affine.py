"""Affine lower and upper functions on a measured partial lattice.

A lower function ``f`` is given by terms ``(u_i, α_i)`` and evaluates to
``f(x) = ⋁_i ⟦x≤u_i⟧ ∧ α_i``; an upper one uses ``⟦u_i≤x⟧`` instead.
Coefficients are coded ``E`` values.  Equality is pointwise.

On a finite carrier every lower function equals its *carrier form*
``⋁_u ⟦x≤u⟧ ∧ f(u)``.  The closures and meets below return that form with
dominated terms dropped, so term lists never outgrow the carrier.
"""

from __future__ import annotations

from typing import Iterable

from .errors import TermBlowup
from .measured import MeasuredPL, _eq_vec, _fil_vec, _id_vec, _in_filter, quotient
from .order import bits

DEFAULT_TERM_CAP = 16


class AffineFn:
    __slots__ = ("M", "kind", "terms", "values", "_hash")

    def __init__(self, M: MeasuredPL, kind: str, terms: Iterable[tuple], values=None):
        if kind not in ("lower", "upper"):
            raise ValueError(f"kind must be 'lower' or 'upper', not {kind!r}")
        self.M = M
        self.kind = kind
        self.terms = tuple(terms)
        if values is None:
            values = _evaluate(M, kind, self.terms)
        self.values = tuple(values)
        self._hash = hash((kind, self.values))

    def __eq__(self, other):
        return isinstance(other, AffineFn) and self.kind == other.kind and self.values == other.values

    def __hash__(self):
        return self._hash

    def __call__(self, x) -> int:
        return self.values[self.M.index[x]]

    def __repr__(self):
        dec = self.M.E.decode
        return f"AffineFn({self.kind}, {[(u, dec(a)) for u, a in self.terms]!r})"

    def __le__(self, other):
        return all(a & ~b == 0 for a, b in zip(self.values, other.values))


def _evaluate(M: MeasuredPL, kind: str, terms) -> tuple:
    idx = M.index
    t = M.table
    n = len(M)
    out = [0] * n
    for u, alpha in terms:
        j = idx[u]
        if kind == "lower":
            for x in range(n):
                out[x] |= t[x][j] & alpha
        else:
            for x in range(n):
                out[x] |= t[j][x] & alpha
    return tuple(out)


def lower(M: MeasuredPL, terms) -> AffineFn:
    return AffineFn(M, "lower", terms)


def upper(M: MeasuredPL, terms) -> AffineFn:
    return AffineFn(M, "upper", terms)


def principal_lower(M: MeasuredPL, u, alpha: int = None) -> AffineFn:
    return lower(M, [(u, M.E.top if alpha is None else alpha)])


def principal_upper(M: MeasuredPL, u, alpha: int = None) -> AffineFn:
    return upper(M, [(u, M.E.top if alpha is None else alpha)])


def constant(M: MeasuredPL, kind: str, alpha: int) -> AffineFn:
    return AffineFn(M, kind, [(u, alpha) for u in M.elements])


def carrier_form(M: MeasuredPL, kind: str, values) -> AffineFn:
    """The affine function with anchors in the carrier and the given values.

    Terms dominated by another remaining term are dropped one at a time,
    which keeps the pointwise values unchanged.
    """
    els = M.elements
    t = M.table
    top = M.E.top
    terms = [(i, v) for i, v in enumerate(values) if v]
    k = 0
    while k < len(terms):
        i, a = terms[k]
        dominated = False
        for j, b in terms:
            if j == i:
                continue
            reach = t[i][j] if kind == "lower" else t[j][i]
            if reach == top and a & ~b == 0:
                dominated = True
                break
        if dominated:
            del terms[k]
        else:
            k += 1
    return AffineFn(M, kind, [(els[i], a) for i, a in terms], values)


def compact(f: AffineFn) -> AffineFn:
    return carrier_form(f.M, f.kind, f.values)


def eval_fn(f: AffineFn, x) -> int:
    return f(x)


def meet_lower(M: MeasuredPL, f: AffineFn, g: AffineFn) -> AffineFn:
    """Meet of two lower functions, anchored on the whole carrier."""
    idx = M.index
    t = M.table
    pairs = [(idx[u], a & b, idx[v]) for u, a in f.terms for v, b in g.terms if a & b]
    gamma = []
    for w in range(len(M)):
        tw = t[w]
        c = 0
        for i, ab, j in pairs:
            c |= tw[i] & tw[j] & ab
        gamma.append(c)
    h = AffineFn(M, "lower", [(x, c) for x, c in zip(M.elements, gamma) if c])
    return carrier_form(M, "lower", h.values)


def meet_upper(M: MeasuredPL, f: AffineFn, g: AffineFn) -> AffineFn:
    idx = M.index
    t = M.table
    pairs = [(idx[u], a & b, idx[v]) for u, a in f.terms for v, b in g.terms if a & b]
    gamma = []
    for w in range(len(M)):
        c = 0
        for i, ab, j in pairs:
            c |= t[i][w] & t[j][w] & ab
        gamma.append(c)
    h = AffineFn(M, "upper", [(x, c) for x, c in zip(M.elements, gamma) if c])
    return carrier_form(M, "upper", h.values)


def _closure(M: MeasuredPL, f: AffineFn, cap: int, kind: str) -> AffineFn:
    f = compact(f)
    key = ("closure", kind, f.values)
    if key in M._cache:
        return M._cache[key]
    n = len(f.terms)
    if n > cap:
        raise TermBlowup(n, cap)
    idx = M.index
    anchors = [(1 << idx[u], a) for u, a in f.terms]
    vecf = _id_vec if kind == "lower" else _fil_vec
    out = [0] * len(M)

    # subsets I of the terms, pruned when the coefficient meet vanishes
    def walk(start, mask, coeff):
        for k in range(start, n):
            m, a = anchors[k]
            c = coeff & a
            if not c:
                continue
            vec = vecf(M, mask | m)
            for x, v in enumerate(vec):
                out[x] |= v & c
            walk(k + 1, mask | m, c)

    walk(0, 0, M.E.top)
    res = carrier_form(M, kind, out)
    M._cache[key] = res
    return res


def id_closure(M: MeasuredPL, f: AffineFn, cap: int = DEFAULT_TERM_CAP) -> AffineFn:
    """``f^Id(a) = ⋁_{∅≠I} ⟦a∈Id(u^(I))⟧ ∧ α_(I)``."""
    return _closure(M, f, cap, "lower")


def fil_closure(M: MeasuredPL, f: AffineFn, cap: int = DEFAULT_TERM_CAP) -> AffineFn:
    return _closure(M, f, cap, "upper")


def join_id(M: MeasuredPL, f: AffineFn, g: AffineFn, cap: int = DEFAULT_TERM_CAP) -> AffineFn:
    return id_closure(M, AffineFn(M, "lower", f.terms + g.terms), cap)


def join_fil(M: MeasuredPL, f: AffineFn, g: AffineFn, cap: int = DEFAULT_TERM_CAP) -> AffineFn:
    return fil_closure(M, AffineFn(M, "upper", f.terms + g.terms), cap)


def is_lower(M: MeasuredPL, values) -> bool:
    t = M.table
    n = len(M)
    return all(values[y] & t[x][y] & ~values[x] == 0 for x in range(n) for y in range(n))


def is_upper(M: MeasuredPL, values) -> bool:
    t = M.table
    n = len(M)
    return all(values[x] & t[x][y] & ~values[y] == 0 for x in range(n) for y in range(n))


def ideal_violation(M: MeasuredPL, f: AffineFn):
    """A witness ``(a, X)`` breaking the ideal-function inequality, or ``None``."""
    els = M.elements
    if not is_lower(M, f.values):
        return ("lower", None)
    top = M.E.top
    for X, _ in M.pl._jl:
        c = top
        for x in bits(X):
            c &= f.values[x]
        if not c:
            continue
        vec = _eq_vec(M, X, "join")
        for a in range(len(M)):
            if vec[a] & c & ~f.values[a]:
                return (els[a], frozenset(els[x] for x in bits(X)))
    return None


def filter_violation(M: MeasuredPL, f: AffineFn):
    els = M.elements
    if not is_upper(M, f.values):
        return ("upper", None)
    top = M.E.top
    for X, _ in M.pl._ml:
        c = top
        for x in bits(X):
            c &= f.values[x]
        if not c:
            continue
        vec = _eq_vec(M, X, "meet")
        for a in range(len(M)):
            if vec[a] & c & ~f.values[a]:
                return (els[a], frozenset(els[x] for x in bits(X)))
    return None


def is_ideal_function(M: MeasuredPL, f: AffineFn) -> bool:
    return ideal_violation(M, f) is None


def is_filter_function(M: MeasuredPL, f: AffineFn) -> bool:
    return filter_violation(M, f) is None


def vbv_le(M: MeasuredPL, f: AffineFn, g: AffineFn) -> int:
    """``⟦f≤g⟧`` for ``f`` upper and ``g`` lower."""
    idx = M.index
    t = M.table
    out = 0
    for u, a in f.terms:
        tu = t[idx[u]]
        for v, b in g.terms:
            out |= a & b & tu[idx[v]]
    return out


def pi_g(M: MeasuredPL, f: AffineFn, G) -> frozenset:
    """``{cls(x, G) : f(x) ∈ G}``, as class names of ``P/G``."""
    bit = _in_filter(G)
    _, proj = quotient(M, G)
    return frozenset(proj(x) for x, v in zip(M.elements, f.values) if v >> bit & 1)
