"""Lattice terms over a carrier, their order, and the term quotient.

Grammar for textual terms: identifiers ``[A-Za-z0-9_]+``, ``&`` for meet,
``|`` for join; ``&`` binds tighter, both associate to the left, parentheses
group, whitespace is ignored.  ``a & b | c`` reads ``(a&b)|c``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Optional

from .affine import (
    DEFAULT_TERM_CAP,
    AffineFn,
    join_fil,
    join_id,
    meet_lower,
    meet_upper,
    principal_lower,
    principal_upper,
    vbv_le,
)
from .errors import CapExceeded, TermParseError
from .measured import MeasuredPL, from_codes
from .order import build_poset
from .partial import PartialLattice, _filter_mask, _ideal_mask, lattice_pl

LEAF, JOIN, MEET = "leaf", "join", "meet"


class Term:
    __slots__ = ("op", "left", "right", "atom", "height", "_hash")

    def __init__(self, op, left=None, right=None, atom=None):
        self.op = op
        self.left = left
        self.right = right
        self.atom = atom
        if op == LEAF:
            self.height = 0
            self._hash = hash(atom)
        else:
            self.height = left.height + right.height + 1
            self._hash = hash((op, left._hash, right._hash))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term) or self._hash != other._hash or self.op != other.op:
            return False
        if self.op == LEAF:
            return self.atom == other.atom
        return self.left == other.left and self.right == other.right

    def __or__(self, other):
        return Term(JOIN, self, other)

    def __and__(self, other):
        return Term(MEET, self, other)

    @property
    def is_leaf(self) -> bool:
        return self.op == LEAF

    def __str__(self):
        if self.op == LEAF:
            return str(self.atom)
        left, right = str(self.left), str(self.right)
        if self.op == JOIN:
            if self.right.op == JOIN:
                right = f"({right})"
            return f"{left}|{right}"
        if self.left.op == JOIN:
            left = f"({left})"
        if self.right.op != LEAF:
            right = f"({right})"
        return f"{left}&{right}"

    def __repr__(self):
        return f"Term({str(self)!r})"

    def leaves(self) -> set:
        if self.op == LEAF:
            return {self.atom}
        return self.left.leaves() | self.right.leaves()


def leaf(a) -> Term:
    return Term(LEAF, atom=a)


def join(x: Term, y: Term) -> Term:
    return Term(JOIN, x, y)


def meet(x: Term, y: Term) -> Term:
    return Term(MEET, x, y)


_TOKEN = re.compile(r"\s*(?:([A-Za-z0-9_]+)|(\S))")


def parse_term(text: str, elements=None) -> Term:
    """Parse ``text``; with ``elements`` given, identifiers must belong to it."""
    tokens = []
    for m in _TOKEN.finditer(text):
        if m.group(1):
            tokens.append(("id", m.group(1)))
        elif m.group(2):
            if m.group(2) not in "&|()":
                raise TermParseError(f"unexpected character {m.group(2)!r} in {text!r}")
            tokens.append((m.group(2), m.group(2)))
    pos = 0

    def peek():
        return tokens[pos][0] if pos < len(tokens) else None

    def take(kind):
        nonlocal pos
        if peek() != kind:
            got = tokens[pos][1] if pos < len(tokens) else "end of input"
            raise TermParseError(f"expected {kind!r}, got {got!r} in {text!r}")
        pos += 1
        return tokens[pos - 1][1]

    def atom():
        if peek() == "(":
            take("(")
            t = expr()
            take(")")
            return t
        name = take("id")
        if elements is not None and name not in elements:
            raise TermParseError(f"unknown element {name!r} in {text!r}")
        return leaf(name)

    def meets():
        t = atom()
        while peek() == "&":
            take("&")
            t = meet(t, atom())
        return t

    def expr():
        t = meets()
        while peek() == "|":
            take("|")
            t = join(t, meets())
        return t

    if not tokens:
        raise TermParseError("empty term")
    t = expr()
    if pos != len(tokens):
        raise TermParseError(f"trailing input {tokens[pos][1]!r} in {text!r}")
    return t


def terms_by_height(elements, max_height: int) -> list:
    """``out[h]`` lists every term of height exactly ``h``."""
    out = [[leaf(a) for a in elements]]
    for h in range(1, max_height + 1):
        layer = []
        for hl in range(h):
            hr = h - 1 - hl
            for x in out[hl]:
                for y in out[hr]:
                    layer.append(join(x, y))
                    layer.append(meet(x, y))
        out.append(layer)
    return out


def evaluate(t: Term, join_fn: Callable, meet_fn: Callable, valuation: Callable = None):
    if t.op == LEAF:
        return t.atom if valuation is None else valuation(t.atom)
    a = evaluate(t.left, join_fn, meet_fn, valuation)
    b = evaluate(t.right, join_fn, meet_fn, valuation)
    return join_fn(a, b) if t.op == JOIN else meet_fn(a, b)


# classical order on W(P)

class TermOrder:
    """``x⁻``, ``x⁺``, ``≪`` and ``⪯`` on terms over a partial lattice.

    Ideals and filters are bitmasks over ``P``; results are memoized per
    instance.
    """

    def __init__(self, P: PartialLattice):
        self.P = P
        self._lower = {}
        self._upper = {}
        self._peq = {}

    def lower_mask(self, x: Term) -> int:
        r = self._lower.get(x)
        if r is None:
            P = self.P
            if x.op == LEAF:
                r = P.poset.down[P.index[x.atom]]
            elif x.op == JOIN:
                r = _ideal_mask(P, self.lower_mask(x.left) | self.lower_mask(x.right))
            else:
                r = self.lower_mask(x.left) & self.lower_mask(x.right)
            self._lower[x] = r
        return r

    def upper_mask(self, x: Term) -> int:
        r = self._upper.get(x)
        if r is None:
            P = self.P
            if x.op == LEAF:
                r = P.poset.up[P.index[x.atom]]
            elif x.op == JOIN:
                r = self.upper_mask(x.left) & self.upper_mask(x.right)
            else:
                r = _filter_mask(P, self.upper_mask(x.left) | self.upper_mask(x.right))
            self._upper[x] = r
        return r

    def lower(self, x: Term) -> set:
        return set(self.P.poset.subset(self.lower_mask(x)))

    def upper(self, x: Term) -> set:
        return set(self.P.poset.subset(self.upper_mask(x)))

    def ll(self, x: Term, y: Term) -> bool:
        return bool(self.upper_mask(x) & self.lower_mask(y))

    def peq(self, x: Term, y: Term) -> bool:
        key = (x, y)
        r = self._peq.get(key)
        if r is not None:
            return r
        if x.op == LEAF or y.op == LEAF:
            r = self.ll(x, y)
        elif x.op == JOIN and y.op == MEET:
            r = (self.peq(x.left, y.left) and self.peq(x.left, y.right)
                 and self.peq(x.right, y.left) and self.peq(x.right, y.right))
        elif x.op == JOIN:
            r = self.peq(x.left, y) and self.peq(x.right, y)
        elif y.op == MEET:
            r = self.peq(x, y.left) and self.peq(x, y.right)
        else:
            r = (self.ll(x, y) or self.peq(x.left, y) or self.peq(x.right, y)
                 or self.peq(x, y.left) or self.peq(x, y.right))
        self._peq[key] = r
        return r


def term_lower(P: PartialLattice, x: Term) -> set:
    return TermOrder(P).lower(x)


def term_upper(P: PartialLattice, x: Term) -> set:
    return TermOrder(P).upper(x)


def term_ll(P: PartialLattice, x: Term, y: Term) -> bool:
    return TermOrder(P).ll(x, y)


def term_peq(P: PartialLattice, x: Term, y: Term) -> bool:
    return TermOrder(P).peq(x, y)


# Boolean-valued order on W(P)

class MeasuredTermOrder:
    """``x⁻``/``x⁺`` as affine functions and the value ``⟦x≤y⟧`` of terms."""

    def __init__(self, M: MeasuredPL, cap: int = DEFAULT_TERM_CAP):
        self.M = M
        self.cap = cap
        self._minus = {}
        self._plus = {}
        self._le = {}

    def minus(self, x: Term) -> AffineFn:
        r = self._minus.get(x)
        if r is None:
            M = self.M
            if x.op == LEAF:
                r = principal_lower(M, x.atom)
            elif x.op == MEET:
                r = meet_lower(M, self.minus(x.left), self.minus(x.right))
            else:
                r = join_id(M, self.minus(x.left), self.minus(x.right), self.cap)
            self._minus[x] = r
        return r

    def plus(self, x: Term) -> AffineFn:
        r = self._plus.get(x)
        if r is None:
            M = self.M
            if x.op == LEAF:
                r = principal_upper(M, x.atom)
            elif x.op == JOIN:
                r = meet_upper(M, self.plus(x.left), self.plus(x.right))
            else:
                r = join_fil(M, self.plus(x.left), self.plus(x.right), self.cap)
            self._plus[x] = r
        return r

    def ll(self, x: Term, y: Term) -> int:
        return vbv_le(self.M, self.plus(x), self.minus(y))

    def le(self, x: Term, y: Term) -> int:
        key = (x, y)
        r = self._le.get(key)
        if r is not None:
            return r
        if x.op == LEAF or y.op == LEAF:
            r = self.ll(x, y)
        elif x.op == JOIN and y.op == MEET:
            r = (self.le(x.left, y.left) & self.le(x.left, y.right)
                 & self.le(x.right, y.left) & self.le(x.right, y.right))
        elif x.op == JOIN:
            r = self.le(x.left, y) & self.le(x.right, y)
        elif y.op == MEET:
            r = self.le(x, y.left) & self.le(x, y.right)
        else:
            r = (self.ll(x, y) | self.le(x.left, y) | self.le(x.right, y)
                 | self.le(x, y.left) | self.le(x, y.right))
        self._le[key] = r
        return r

    def eq(self, x: Term, y: Term) -> int:
        return self.le(x, y) & self.le(y, x)


def term_minus(M: MeasuredPL, x: Term) -> AffineFn:
    return MeasuredTermOrder(M).minus(x)


def term_plus(M: MeasuredPL, x: Term) -> AffineFn:
    return MeasuredTermOrder(M).plus(x)


def bv_ll(M: MeasuredPL, x: Term, y: Term) -> int:
    return MeasuredTermOrder(M).ll(x, y)


def bv_le_terms(M: MeasuredPL, x: Term, y: Term) -> int:
    return MeasuredTermOrder(M).le(x, y)


# the term quotient

@dataclass
class TermQuotient:
    """Classes of terms under ``⟦x=y⟧ = top``.

    ``reps[i]`` is the first-enumerated term of class ``i``; ``joins`` and
    ``meets`` map index pairs to indices for every pair computed.  When
    ``closed`` is true the classes form a finite lattice.
    """

    base: MeasuredPL
    order: MeasuredTermOrder
    reps: list
    closed: bool
    joins: dict = field(default_factory=dict)
    meets: dict = field(default_factory=dict)
    _buckets: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.reps)

    @property
    def names(self) -> list:
        return [str(r) for r in self.reps]

    def signature(self, x: Term):
        return (self.order.minus(x).values, self.order.plus(x).values)

    def classify(self, x: Term) -> Optional[int]:
        top = self.base.E.top
        for r in self._buckets.get(self.signature(x), ()):
            if self.order.eq(x, self.reps[r]) == top:
                return r
        return None

    def _add(self, x: Term) -> int:
        self.reps.append(x)
        self._buckets.setdefault(self.signature(x), []).append(len(self.reps) - 1)
        return len(self.reps) - 1

    def leaf_class(self, a) -> int:
        return self.classify(leaf(a))

    def psi(self, i: int, j: int) -> int:
        return self.order.le(self.reps[i], self.reps[j])

    def le(self, i: int, j: int) -> bool:
        return self.psi(i, j) == self.base.E.top

    def as_measured(self) -> MeasuredPL:
        """The closed quotient as a measured lattice on the class names."""
        if not self.closed:
            raise ValueError("the term quotient is not closed")
        names = self.names
        n = len(names)
        pairs = [(names[i], names[j]) for i in range(n) for j in range(n) if self.le(i, j)]
        L = lattice_pl(build_poset(names, pairs))
        table = [[self.psi(i, j) for j in range(n)] for i in range(n)]
        return from_codes(L, self.base.E, table)


def theorem_a(M: MeasuredPL, height_cap: int = 4, size_cap: int = 20000,
              term_cap: int = DEFAULT_TERM_CAP) -> TermQuotient:
    """Enumerate term classes until closed under ``∨``/``∧`` or a cap stops it.

    Hitting ``height_cap`` returns a quotient with ``closed`` false; going past
    ``size_cap`` classes raises :class:`CapExceeded` carrying that partial
    quotient.
    """
    order = MeasuredTermOrder(M, term_cap)
    q = TermQuotient(M, order, [], closed=False)
    for a in M.elements:
        x = leaf(a)
        if q.classify(x) is None:
            q._add(x)
    fresh = set(range(len(q.reps)))
    capped = False
    while fresh:
        new = set()
        n = len(q.reps)
        for i in range(n):
            for j in range(i, n):
                if i not in fresh and j not in fresh:
                    continue
                if i == j:
                    q.joins[(i, i)] = q.meets[(i, i)] = i
                    continue
                for op, table in ((join, q.joins), (meet, q.meets)):
                    t = op(q.reps[i], q.reps[j])
                    if t.height > height_cap:
                        capped = True
                        continue
                    c = q.classify(t)
                    if c is None:
                        c = q._add(t)
                        new.add(c)
                        if len(q.reps) > size_cap:
                            raise CapExceeded(q, f"more than {size_cap} term classes")
                    table[(i, j)] = table[(j, i)] = c
        fresh = new
    q.closed = not capped
    return q
