import random
from functools import lru_cache
from pathlib import Path

import pytest

from lattice_forge.generate import random_measured_structure
from lattice_forge.order import build_poset, chain_lattice, downset_lattice
from lattice_forge.terms import JOIN, LEAF, MEET

DATA = Path(__file__).resolve().parent.parent / "data"


def square_poset():
    return build_poset("0ab1", [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])


def whitman(P):
    """Free-lattice order over a poset with no recorded joins or meets.

    Generators are join- and meet-prime there, so Whitman's rules decide
    ``x ≤ y`` with leaves compared in ``P``.
    """
    @lru_cache(maxsize=None)
    def le(x, y):
        if x.op == LEAF and y.op == LEAF:
            return P.leq(x.atom, y.atom)
        if x.op == JOIN:
            return le(x.left, y) and le(x.right, y)
        if y.op == MEET:
            return le(x, y.left) and le(x, y.right)
        if x.op == LEAF:
            return le(x, y.left) or le(x, y.right)
        if y.op == LEAF:
            return le(x.left, y) or le(x.right, y)
        return le(x.left, y) or le(x.right, y) or le(x, y.left) or le(x, y.right)

    return le


def lattice_ops(L):
    """Total join/meet callables on a lattice viewed as a partial lattice."""
    def j(a, b):
        return a if a == b else L.join_of((a, b))

    def m(a, b):
        return a if a == b else L.meet_of((a, b))

    return j, m


@pytest.fixture
def E2():
    return chain_lattice(["0", "1"])


@pytest.fixture
def boolean4():
    return downset_lattice(build_poset(["p", "q"]))


@pytest.fixture(scope="session")
def random_structures():
    rng = random.Random(20240501)
    return [random_measured_structure(rng) for _ in range(60)]


def homs(A, S, fixed=None):
    """Every homomorphism ``A → S`` extending ``fixed``, by backtracking."""
    els = list(A.elements)
    fixed = dict(fixed or {})
    order = [x for x in els if x in fixed] + [x for x in els if x not in fixed]
    m = {}

    def ops_ok():
        for table, target in ((A.joins, S.joins), (A.meets, S.meets)):
            for X, a in table.items():
                if target.get(frozenset(m[x] for x in X)) != m[a]:
                    return False
        return True

    def go(i):
        if i == len(order):
            if ops_ok():
                yield dict(m)
            return
        x = order[i]
        choices = [fixed[x]] if x in fixed else S.elements
        for s in choices:
            if all(S.leq(s, m[y]) if A.leq(x, y) else True for y in m) and \
               all(S.leq(m[y], s) for y in m if A.leq(y, x)):
                m[x] = s
                yield from go(i + 1)
                del m[x]

    return go(0)


def small_posets(max_n=4):
    """Posets on at most ``max_n`` points, one per isomorphism class."""
    from itertools import permutations
    out = []
    for n in range(1, max_n + 1):
        names = [f"s{i}" for i in range(n)]
        slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
        seen = set()
        for k in range(1 << len(slots)):
            pairs = [slots[b] for b in range(len(slots)) if k >> b & 1]
            rel = set(pairs)
            if any((i, j) in rel and (j, l) in rel and (i, l) not in rel for i, j in rel for l in range(n)):
                continue
            canon = min(tuple(sorted((p[i], p[j]) for i, j in rel)) for p in permutations(range(n)))
            if canon in seen:
                continue
            seen.add(canon)
            out.append(build_poset(names, [(names[i], names[j]) for i, j in pairs]))
    return out
