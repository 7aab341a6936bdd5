"""Finite posets and finite distributive lattices.

Element ids are opaque strings and every output follows the input order.
Internally a subset of a carrier is an ``int`` bitmask over element indices.

Values of a ``DistLattice`` are handled through the Birkhoff encoding: an
element ``x`` is coded by the bitmask of join-irreducibles below it, so that
meet is ``&``, join is ``|``, bottom is ``0`` and ``x <= y`` is
``x & ~y == 0``.  ``DistLattice.encode``/``decode`` convert to and from ids.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _product
from typing import Iterable, Sequence

from .errors import (
    AntisymmetryViolation,
    DuplicateElement,
    NotALattice,
    NotDistributive,
    UnknownElement,
)


def bits(mask: int):
    """Yield the indices of the set bits of ``mask``, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FinitePoset:
    """A finite partial order.  Build it with :func:`build_poset`."""

    __slots__ = ("elements", "index", "up", "down")

    def __init__(self, elements: Sequence[str], up: Sequence[int], down: Sequence[int]):
        self.elements = tuple(elements)
        self.index = {x: i for i, x in enumerate(self.elements)}
        self.up = tuple(up)
        self.down = tuple(down)

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        return (
            isinstance(other, FinitePoset)
            and self.elements == other.elements
            and self.up == other.up
        )

    def __hash__(self):
        return hash((self.elements, self.up))

    def __repr__(self):
        return f"FinitePoset({list(self.elements)!r})"

    def leq(self, x, y) -> bool:
        return bool(self.up[self.index[x]] >> self.index[y] & 1)

    @property
    def le(self) -> frozenset:
        els = self.elements
        return frozenset((els[i], els[j]) for i in range(len(els)) for j in bits(self.up[i]))

    def mask(self, xs: Iterable[str]) -> int:
        m = 0
        for x in xs:
            try:
                m |= 1 << self.index[x]
            except KeyError:
                raise UnknownElement(x) from None
        return m

    def subset(self, mask: int) -> list:
        return [self.elements[i] for i in bits(mask)]

    def down_mask(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.down[i]
        return out

    def up_mask(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.up[i]
        return out

    def lower_set(self, xs: Iterable[str]) -> set:
        return set(self.subset(self.down_mask(self.mask(xs))))

    def upper_set(self, xs: Iterable[str]) -> set:
        return set(self.subset(self.up_mask(self.mask(xs))))

    def covers(self) -> list:
        """Hasse diagram: pairs ``(x, y)`` with ``x < y`` and nothing strictly between."""
        n = len(self.elements)
        out = []
        for i in range(n):
            strict = self.up[i] & ~(1 << i)
            for j in bits(strict):
                between = strict & self.down[j] & ~(1 << j)
                if not between:
                    out.append((self.elements[i], self.elements[j]))
        return out

    def dual(self) -> "FinitePoset":
        return FinitePoset(self.elements, self.down, self.up)

    def sup_index(self, mask: int):
        """Index of the least upper bound of the subset ``mask``, or ``None``."""
        ub = (1 << len(self.elements)) - 1
        for i in bits(mask):
            ub &= self.up[i]
        for j in bits(ub):
            if ub & ~self.up[j] == 0:
                return j
        return None

    def inf_index(self, mask: int):
        lb = (1 << len(self.elements)) - 1
        for i in bits(mask):
            lb &= self.down[i]
        for j in bits(lb):
            if lb & ~self.down[j] == 0:
                return j
        return None


def build_poset(elements: Iterable[str], pairs: Iterable[tuple] = ()) -> FinitePoset:
    """Reflexive-transitive closure of ``pairs`` on ``elements``."""
    elements = list(elements)
    index = {}
    for i, x in enumerate(elements):
        if x in index:
            raise DuplicateElement(x)
        index[x] = i
    n = len(elements)
    up = [1 << i for i in range(n)]
    for x, y in pairs:
        if x not in index:
            raise UnknownElement(x)
        if y not in index:
            raise UnknownElement(y)
        up[index[x]] |= 1 << index[y]
    # Warshall on bit rows
    for k in range(n):
        bk = 1 << k
        row_k = up[k]
        for i in range(n):
            if up[i] & bk:
                up[i] |= row_k
    down = [0] * n
    for i in range(n):
        for j in bits(up[i]):
            down[j] |= 1 << i
    for i in range(n):
        both = up[i] & down[i] & ~(1 << i)
        if both:
            j = next(bits(both))
            raise AntisymmetryViolation(elements[i], elements[j])
    return FinitePoset(elements, up, down)


@dataclass(frozen=True)
class PrimeFilter:
    """The prime filter ``↑generator`` of a finite distributive lattice.

    ``bit`` is the Birkhoff bit of the generator: a coded value ``v`` lies
    in the filter iff ``v >> bit & 1``.
    """

    members: frozenset
    generator: str
    bit: int

    def __contains__(self, value) -> bool:
        if isinstance(value, int):
            return bool(value >> self.bit & 1)
        return value in self.members


class DistLattice:
    """A finite distributive lattice with Birkhoff-coded values."""

    def __init__(self, poset: FinitePoset, join_table: dict, meet_table: dict,
                 bot: str, top: str, irreducibles: Sequence[str]):
        self.poset = poset
        self.join_table = join_table
        self.meet_table = meet_table
        self.bot_id = bot
        self.top_id = top
        self.irreducibles = tuple(irreducibles)
        self._code = {}
        for x in poset.elements:
            m = 0
            for k, p in enumerate(self.irreducibles):
                if poset.leq(p, x):
                    m |= 1 << k
            self._code[x] = m
        self._decode = {m: x for x, m in self._code.items()}
        self.bot = 0
        self.top = self._code[top]

    @property
    def elements(self):
        return self.poset.elements

    def __len__(self):
        return len(self.poset)

    def __eq__(self, other):
        return isinstance(other, DistLattice) and self.poset == other.poset

    def __hash__(self):
        return hash(self.poset)

    def __repr__(self):
        return f"DistLattice({list(self.elements)!r})"

    # ids <-> codes
    def encode(self, x: str) -> int:
        try:
            return self._code[x]
        except KeyError:
            raise UnknownElement(x) from None

    def decode(self, v: int) -> str:
        return self._decode[v]

    def values(self) -> list:
        """All coded values, in element order."""
        return [self._code[x] for x in self.elements]

    # id-level operations
    def join(self, x, y):
        return self.join_table[x][y]

    def meet(self, x, y):
        return self.meet_table[x][y]

    def leq(self, x, y) -> bool:
        return self.poset.leq(x, y)

    # code-level helpers
    @staticmethod
    def vleq(a: int, b: int) -> bool:
        return a & ~b == 0

    def vjoin_all(self, vs: Iterable[int]) -> int:
        out = 0
        for v in vs:
            out |= v
        return out

    def vmeet_all(self, vs: Iterable[int]) -> int:
        out = self.top
        for v in vs:
            out &= v
        return out


def as_dist_lattice(poset: FinitePoset) -> DistLattice:
    n = len(poset)
    if n == 0:
        raise NotALattice(message="empty poset")
    els = poset.elements
    join = {x: {} for x in els}
    meet = {x: {} for x in els}
    for i in range(n):
        for j in range(i, n):
            m = (1 << i) | (1 << j)
            s = poset.sup_index(m)
            t = poset.inf_index(m)
            if s is None or t is None:
                raise NotALattice(els[i], els[j])
            join[els[i]][els[j]] = join[els[j]][els[i]] = els[s]
            meet[els[i]][els[j]] = meet[els[j]][els[i]] = els[t]
    full = (1 << n) - 1
    bot = els[poset.inf_index(full)]
    top = els[poset.sup_index(full)]
    for x in els:
        for y in els:
            yz = join[y]
            for z in els:
                lhs = meet[x][yz[z]]
                rhs = join[meet[x][y]][meet[x][z]]
                if lhs != rhs:
                    raise NotDistributive((x, y, z))
    irr = []
    for i, p in enumerate(els):
        if p == bot:
            continue
        lower = poset.down[i] & ~(1 << i)
        # p is join-irreducible iff the strict down-set has a single maximal element
        maxima = [j for j in bits(lower) if lower & poset.up[j] == 1 << j]
        if len(maxima) == 1:
            irr.append(p)
    return DistLattice(poset, join, meet, bot, top, irr)


def prime_filters(D: DistLattice) -> list:
    """The prime filters ``↑p`` for ``p`` join-irreducible, in input order."""
    out = []
    for k, p in enumerate(D.irreducibles):
        members = frozenset(D.poset.upper_set([p]))
        out.append(PrimeFilter(members, p, k))
    return out


def dualize(D: DistLattice) -> DistLattice:
    return as_dist_lattice(D.poset.dual())


# small constructors

def chain(names: Sequence[str]) -> FinitePoset:
    names = list(names)
    return build_poset(names, zip(names, names[1:]))


def chain_lattice(names: Sequence[str]) -> DistLattice:
    return as_dist_lattice(chain(names))


def product_poset(P: FinitePoset, Q: FinitePoset, sep: str = "") -> FinitePoset:
    els = [f"{x}{sep}{y}" for x, y in _product(P.elements, Q.elements)]
    pairs = []
    for (x, y), name in zip(_product(P.elements, Q.elements), els):
        for (x2, y2), name2 in zip(_product(P.elements, Q.elements), els):
            if P.leq(x, x2) and Q.leq(y, y2):
                pairs.append((name, name2))
    return build_poset(els, pairs)


def downset_lattice(J: FinitePoset, names=None) -> DistLattice:
    """The lattice of down-sets of ``J`` (every finite distributive lattice arises so).

    Default names spell the generators of each down-set's maximal elements, or
    ``"0"`` for the empty one.
    """
    n = len(J)
    downsets = []
    for m in range(1 << n):
        if all(J.down[i] & ~m == 0 for i in bits(m)):
            downsets.append(m)
    downsets.sort(key=lambda m: (bin(m).count("1"), m))
    if names is None:
        names = []
        for m in downsets:
            maxima = [i for i in bits(m) if J.up[i] & m == 1 << i]
            names.append("0" if not m else "+".join(J.elements[i] for i in maxima))
    pairs = [(names[a], names[b]) for a, ma in enumerate(downsets)
             for b, mb in enumerate(downsets) if ma & ~mb == 0]
    return as_dist_lattice(build_poset(names, pairs))
