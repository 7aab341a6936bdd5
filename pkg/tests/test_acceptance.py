"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with its timing and
coverage, straight to the terminal even when output is captured.
"""

import random
import time
from contextlib import contextmanager
from itertools import combinations, product


from lattice_forge.amalgam import (
    check_pushout_quotient,
    k_height,
    mediating_map,
    proper_violation,
    pushout_measured,
    pushout_pl,
    theorem_b,
    transfer_idj_sample,
    transfer_idm_sample,
)
from lattice_forge.errors import AxiomViolation
from lattice_forge.gadgets import (
    PERSP_K,
    chain3_gadget,
    m3,
    persp_gadget,
    persp_pl,
    relcomp_gadget,
    saturation_step,
)
from lattice_forge.generate import (
    random_dist_lattice,
    random_formation,
    random_measured,
    random_measured_structure,
    small_lattices,
)
from lattice_forge.measured import (
    bv_eq,
    bv_in,
    bv_in_id,
    bv_in_idn,
    bv_join_eq,
    bv_le_join,
    bv_meet_eq,
    bv_seteq,
    bv_subset,
    check_truth_lemmas,
    from_codes,
    from_order,
)
from lattice_forge.order import build_poset, chain, chain_lattice, downset_lattice, prime_filters
from lattice_forge.partial import (
    PartialLattice,
    augment_singletons,
    con_lattice,
    conc_map,
    ideal_closure,
    idn,
    is_homomorphism,
    lattice_pl,
)
from lattice_forge.terms import (
    MeasuredTermOrder,
    TermOrder,
    evaluate,
    leaf,
    terms_by_height,
    theorem_a,
)

from conftest import homs, lattice_ops, small_posets


@contextmanager
def criterion(number, title, limit, capsys):
    """Time the block and print one PASS/FAIL line; over ``limit`` seconds is a failure."""
    start = time.perf_counter()
    notes = []
    try:
        yield notes
    except BaseException as e:
        took = time.perf_counter() - start
        detail = "; ".join(notes + [f"{type(e).__name__}: {e}".splitlines()[0][:200]])
        with capsys.disabled():
            print(f"\nFAIL [{number}] {title} ({took:.2f}s) {detail}")
        raise
    took = time.perf_counter() - start
    ok = took < limit
    detail = "; ".join(notes + ([] if ok else [f"over the {limit}s limit"]))
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} [{number}] {title} ({took:.2f}s) {detail}")
    assert ok, f"took {took:.1f}s, limit {limit}s"


def flat(els, h):
    return [t for level in terms_by_height(els, h) for t in level]


def poset_isomorphic(A, B):
    """Brute-force order isomorphism, pruned by up/down-set sizes."""
    if len(A) != len(B):
        return False
    a, b = list(A.elements), list(B.elements)

    def sig(P, x):
        return (len(P.upper_set([x])), len(P.lower_set([x])))

    sa = {x: sig(A, x) for x in a}
    sb = {y: sig(B, y) for y in b}
    m = {}

    def go(i):
        if i == len(a):
            return True
        x = a[i]
        for y in b:
            if y in m.values() or sb[y] != sa[x]:
                continue
            if all(A.leq(x, z) == B.leq(y, m[z]) and A.leq(z, x) == B.leq(m[z], y) for z in m):
                m[x] = y
                if go(i + 1):
                    return True
                del m[x]
        return False

    return go(0)


# the congruence lattice of the perspectivity gadget, as drawn: 10 nodes, 15 covers
FIGURE = build_poset(
    ["0", "alpha", "beta", "xi", "eta", "ab", "xibar", "etabar", "xieta", "1"],
    [("0", "alpha"), ("0", "beta"), ("0", "xi"), ("0", "eta"), ("alpha", "ab"), ("beta", "ab"),
     ("ab", "xibar"), ("ab", "etabar"), ("xi", "xibar"), ("xi", "xieta"), ("eta", "etabar"),
     ("eta", "xieta"), ("xibar", "1"), ("etabar", "1"), ("xieta", "1")],
)


def test_1_perspectivity_congruence_lattice(capsys):
    with criterion(1, "perspectivity gadget has 10 congruences in the drawn shape", 1.0, capsys) as notes:
        C = con_lattice(persp_pl())
        assert len(C) == 10
        assert len(C.poset.covers()) == len(FIGURE.covers()) == 15
        assert poset_isomorphic(C.poset, FIGURE)
        notes.append("10 congruences, 15 covers, isomorphic to the figure")


def test_2_truth_lemma_suite(capsys):
    with criterion(2, "truth lemmas on 200 seeded structures", 120.0, capsys) as notes:
        rng = random.Random(2)
        checked = 0
        for i in range(200):
            M = random_measured_structure(rng, max_p=5, max_e=6)
            assert len(M) <= 5 and len(M.E) <= 6
            rep = check_truth_lemmas(M)
            assert rep.ok, (i, rep.counterexample)
            checked += rep.checked
        notes.append(f"200 structures, {checked} statements, 0 failures")


def test_3_term_order_oracle(capsys):
    """Every pair of terms of height at most 3, on every lattice of the catalog.

    Pairs are visited with all height-at-most-2 pairs first, then height-3
    pairs in rounds over the catalog, until done or out of time.
    """
    budget = 120.0
    with criterion(3, "term order matches evaluation on all height<=3 pairs", budget, capsys) as notes:
        start = time.perf_counter()
        rng = random.Random(3)
        setups = []
        total = 0
        for name, poset in small_lattices():
            L = lattice_pl(poset)
            M = random_measured(rng, L, random_dist_lattice(rng))
            j, m = lattice_ops(L)
            levels = terms_by_height(L.elements, 3)
            low = [t for lv in levels[:3] for t in lv]
            high = list(levels[3])
            rng.shuffle(high)
            ev = {t: evaluate(t, j, m) for lv in levels for t in lv}
            n_all = len(low) + len(high)
            total += n_all * n_all
            setups.append((name, L, M, low, high, ev))
        done = mismatches = 0

        def check(L, M, order, morder, ev, pairs):
            nonlocal done, mismatches
            for x, y in pairs:
                ex, ey = ev[x], ev[y]
                if order.peq(x, y) != L.leq(ex, ey) or morder.le(x, y) != M.bv(ex, ey):
                    mismatches += 1
                done += 1

        for name, L, M, low, high, ev in setups:
            check(L, M, TermOrder(L), MeasuredTermOrder(M), ev, product(low, low))
        low_done = done
        # height-3 rows in rounds: each round takes one new height-3 term per lattice
        cursors = [0] * len(setups)
        while time.perf_counter() - start < budget - 5 and any(
                c < len(s[4]) for c, s in zip(cursors, setups)):
            for k, (name, L, M, low, high, ev) in enumerate(setups):
                if cursors[k] >= len(high):
                    continue
                x = high[cursors[k]]
                seen = high[:cursors[k] + 1]
                order, morder = TermOrder(L), MeasuredTermOrder(M)
                check(L, M, order, morder, ev,
                      [(x, y) for y in low + seen] + [(y, x) for y in low + seen if y != x])
                cursors[k] += 1
        notes.append(f"{done} of {total} pairs checked ({low_done} with both heights <= 2), "
                     f"{mismatches} mismatches")
        assert mismatches == 0
        assert done == total, "time budget exhausted before covering every height-3 pair"


def test_4_free_lattice_on_two_generators(capsys):
    with criterion(4, "free lattice on the 2-antichain closes with 4 classes", 1.0, capsys) as notes:
        P = augment_singletons(PartialLattice(build_poset("ab"), {}, {}))
        q = theorem_a(from_order(P))
        assert q.closed and len(q) == 4
        notes.append("classes: " + ", ".join(q.names))


def _valid_tables(P, E):
    codes = list(range(E.top + 1))
    codes = [c for c in codes if c & ~E.top == 0]
    n = len(P)
    free = [(i, j) for i in range(n) for j in range(n) if i != j and not P.poset.up[i] >> j & 1]
    for vals in product(codes, repeat=len(free)):
        t = [[E.top] * n for _ in range(n)]
        for (i, j), v in zip(free, vals):
            t[i][j] = v
        try:
            yield from_codes(P, E, t)
        except AxiomViolation:
            continue


def _section4_identities(M):
    """The set-level inequalities for every element and nonempty subset."""
    els = M.elements
    subs = [c for r in range(1, len(els) + 1) for c in combinations(els, r)]
    top = M.E.top
    count = 0
    for x in els:
        assert bv_eq(M, x, x) == top
        for y in els:
            for z in els:
                assert M.bv(x, y) & M.bv(y, z) & ~M.bv(x, z) == 0
            for Z in subs:
                assert bv_eq(M, x, y) & bv_in(M, y, Z) & ~bv_in(M, x, Z) == 0
                count += 1
    for X in subs:
        for Y in subs:
            sub = bv_subset(M, X, Y)
            eq = bv_seteq(M, X, Y)
            for x in els:
                assert bv_in(M, x, X) & sub & ~bv_in(M, x, Y) == 0
            acc = 0
            for Z in subs:
                if set(Z) <= set(Y):
                    acc |= bv_seteq(M, X, Z)
            assert acc == sub
            for a in els:
                for le in (lambda u: M.bv(u, a), lambda u: M.bv(a, u)):
                    wy, wx = top, top
                    for y in Y:
                        wy &= le(y)
                    for x in X:
                        wx &= le(x)
                    assert sub & wy & ~wx == 0
                    assert eq & wy == eq & wx
            count += 1
            if len(els) <= 4:
                for Z in subs:
                    assert sub & bv_subset(M, Y, Z) & ~bv_subset(M, X, Z) == 0
                    assert eq & bv_seteq(M, Y, Z) & ~bv_seteq(M, X, Z) == 0
                    count += 2
    for X in subs:
        for a in els:
            for b in els:
                assert bv_join_eq(M, a, X) & bv_join_eq(M, b, X) & ~bv_eq(M, a, b) == 0
                assert bv_meet_eq(M, a, X) & bv_meet_eq(M, b, X) & ~bv_eq(M, a, b) == 0
    return count


def _section11_identities(M, rng, triples):
    order = MeasuredTermOrder(M)
    small = flat(M.elements, 1)
    count = 0
    for u in M.elements:
        lu = leaf(u)
        for x in small:
            assert order.ll(lu, x) == order.minus(x)(u)
            assert order.ll(x, lu) == order.plus(x)(u)
        for v in M.elements:
            assert order.le(lu, leaf(v)) == M.bv(u, v)
    for x in small:
        for y in small:
            assert order.ll(x, y) & ~order.le(x, y) == 0
            for z in small:
                assert order.le(x | y, z) == order.le(x, z) & order.le(y, z)
                assert order.le(z, x & y) == order.le(z, x) & order.le(z, y)
                count += 2
    pool = flat(M.elements, 2)
    for _ in range(triples):
        x, y, z = (rng.choice(pool) for _ in range(3))
        assert order.le(x, y) & order.le(y, z) & ~order.le(x, z) == 0
        count += 1
    return count


def test_5_boolean_value_identities(capsys):
    with criterion(5, "Boolean-value identities on small instances", 300.0, capsys) as notes:
        # every valid table on every poset with at most two points, for three value lattices
        Es = [chain_lattice(["0", "1"]), chain_lattice(["0", "m", "1"]), downset_lattice(build_poset(["p", "q"]))]
        instances = 0
        count = 0
        rng = random.Random(5)
        for poset in small_posets(2):
            for P in (lattice_pl(poset) if len(poset) == 1 else None,
                      augment_singletons(PartialLattice(poset, {}, {}))):
                if P is None:
                    continue
                for E in Es:
                    for M in _valid_tables(P, E):
                        count += _section4_identities(M) + _section11_identities(M, rng, 20)
                        instances += 1
        exhaustive = instances
        # seeded instances up to five points and six values
        triples = 0
        for i in range(40):
            M = random_measured_structure(rng, max_p=5, max_e=6)
            count += _section4_identities(M) + _section11_identities(M, rng, 40)
            triples += 40
            instances += 1
        triples += 20 * exhaustive
        assert triples >= 1000
        notes.append(f"{exhaustive} exhaustive and {instances - exhaustive} seeded instances, "
                     f"{count} checks incl. {triples} transitivity triples, 0 failures")


def test_6_pushout(capsys):
    with criterion(6, "pushout universal property and quotient commutation", 180.0, capsys) as notes:
        rng = random.Random(6)
        targets = []
        for p in small_posets(4):
            els = p.elements
            joins, meets = {}, {}
            for r in range(1, len(els) + 1):
                for combo in combinations(range(len(els)), r):
                    mask = sum(1 << i for i in combo)
                    X = frozenset(els[i] for i in combo)
                    s, t = p.sup_index(mask), p.inf_index(mask)
                    if s is not None:
                        joins[X] = els[s]
                    if t is not None:
                        meets[X] = els[t]
            targets.append(PartialLattice(p, joins, meets))
            targets.append(augment_singletons(PartialLattice(p, {}, {})))
        mediated = filters = 0
        for _ in range(20):
            v = random_formation(rng, max_extra=1)
            K, P, Q = v.K.pl, v.P.pl, v.Q.pl
            from lattice_forge.amalgam import VFormation
            plain = VFormation(K, P, Q, v.f, v.g)
            R, _, _ = pushout_pl(plain)
            for S in targets:
                pairs = 0
                for hp in homs(P, S):
                    for hq in homs(Q, S, {k: hp[k] for k in K.elements}):
                        h = mediating_map(plain, R, hp, hq, S)
                        assert h is not None and is_homomorphism(h)
                        pairs += 1
                # uniqueness: every map out of R is one of these
                assert pairs == sum(1 for _ in homs(R, S))
                mediated += pairs
            MR, _, _ = pushout_measured(v)
            for G in prime_filters(MR.E):
                assert check_pushout_quotient(v, MR, G)
                filters += 1
        notes.append(f"20 formations x {len(targets)} targets, {mediated} mediating maps, "
                     f"{filters} prime-filter quotients")


def test_7_sample_transfer(capsys):
    with criterion(7, "transferred samples verify, (Id∨) index is (h+2)m+h+1", 180.0, capsys) as notes:
        rng = random.Random(7)
        idm = idj = 0
        for _ in range(20):
            v = random_formation(rng, max_extra=1)
            R, _, _ = pushout_measured(v)
            els = list(R.elements)
            for a, b in combinations(els, 2):
                for kind in ("idm", "film"):
                    transfer_idm_sample(v, R, a, b, kind=kind, fallback=False)
                    idm += 1
            h, m = k_height(v.K.pl), max(len(v.P), len(v.Q))
            for Z in (c for r in (1, 2) for c in combinations(els, r)):
                for kind in ("idj", "filj"):
                    s = transfer_idj_sample(v, R, Z, kind=kind, fallback=False)
                    assert s.index == (h + 2) * m + h + 1
                    idj += 1
                    if kind != "idj":
                        continue
                    rest = [x for x in els if x not in s.members]
                    base = [bv_in_idn(R, a, Z, s.members, s.index) for a in els]
                    for r in range(len(rest) + 1):
                        for extra in combinations(rest, r):
                            Y = set(s.members) | set(extra)
                            assert [bv_in_idn(R, a, Z, Y, s.index) for a in els] == base
        notes.append(f"20 formations, {idm} (Id∧)/(Fil∧) and {idj} (Id∨)/(Fil∨) samples")


def test_8_theorem_b(capsys):
    with criterion(8, "Theorem B output is proper, commutes and restricts", 180.0, capsys) as notes:
        rng = random.Random(8)
        closed = total = 0
        while closed < 10:
            v = random_formation(rng, max_extra=1)
            res = theorem_b(v.K, v.P, v.Q, v.f, v.g, height_cap=4, size_cap=5000)
            q = res.quotient
            total += 1
            top = q.base.E.top
            assert proper_violation(q) is None
            for (i, j), k in q.joins.items():
                assert (q.psi(i, j) == top) == (k == j)
            assert all(res.map_p[v.f[k]] == res.map_q[v.g[k]] for k in v.K.elements)
            for S, mp in ((v.P, res.map_p), (v.Q, res.map_q)):
                for x in S.elements:
                    for y in S.elements:
                        assert q.psi(mp[x], mp[y]) == S.bv(x, y)
            closed += res.closed
            assert total < 60, "too few instances close"
        notes.append(f"{total} instances, {closed} closed lattices")


def test_9_gadget_promises(capsys):
    with criterion(9, "gadget promises hold after one saturation step", 60.0, capsys) as notes:
        SQ = downset_lattice(build_poset(["p", "q"]))
        L = chain3_gadget(SQ, "p", "q").ambient
        step = saturation_step(L, relcomp_gadget(SQ, "p", "q"), {"a": "o", "b": "x", "c": "i"})
        q = step.result.quotient
        t = step.witnesses["t"]
        a, b, c = (q.leaf_class(e) for e in ("o", "x", "i"))
        assert step.promise_ok and q.meets[(b, t)] == a and q.joins[(b, t)] == c
        G = persp_gadget(SQ, "p+q", "p+q", "p", "q")
        step = saturation_step(G.base, G, {k: k for k in PERSP_K}, height_cap=3)
        q = step.result.quotient
        x = step.witnesses["x"]
        cls = {k: q.leaf_class(k) for k in PERSP_K}
        for e in ("u", "v"):
            assert q.meets[(x, cls[e])] == cls["0"] and q.joins[(x, cls[e])] == cls["1"]
        K = lattice_pl(chain("01"))
        M3, diag = m3(K)
        assert len(M3) == 5
        f = conc_map(diag)
        CK, CM = con_lattice(K), con_lattice(M3)
        assert len(CK) == len(CM) and {f(c) for c in CK.congruences} == set(CM.congruences)
        notes.append("relcomp witness t, perspectivity witness x, |M3[2-chain]| = 5 with Con preserved")


def _all_partial_lattices(max_n):
    for poset in small_posets(max_n):
        els = poset.elements
        sups, infs = [], []
        for r in range(2, len(els) + 1):
            for combo in combinations(range(len(els)), r):
                mask = sum(1 << i for i in combo)
                X = frozenset(els[i] for i in combo)
                if poset.sup_index(mask) is not None:
                    sups.append((X, els[poset.sup_index(mask)]))
                if poset.inf_index(mask) is not None:
                    infs.append((X, els[poset.inf_index(mask)]))
        for js in product((0, 1), repeat=len(sups)):
            for ms in product((0, 1), repeat=len(infs)):
                joins = dict(s for s, k in zip(sups, js) if k)
                meets = dict(s for s, k in zip(infs, ms) if k)
                yield augment_singletons(PartialLattice(poset, joins, meets))


def test_10_two_chain_degeneration(capsys):
    with criterion(10, "E = 2-chain values agree with the classical notions", 300.0, capsys) as notes:
        instances = checks = 0
        for P in _all_partial_lattices(3):
            M = from_order(P)
            top = M.E.top
            els = P.elements
            subs = [c for r in range(1, len(els) + 1) for c in combinations(els, r)]
            for X in subs:
                s = P.join_of(X)
                ideal = ideal_closure(P, X)
                for a in els:
                    assert (bv_le_join(M, a, X) == top) == (s is not None and P.leq(a, s))
                    assert (bv_in_id(M, a, X) == top) == (a in ideal)
                    for U in subs:
                        for n in range(3):
                            assert (bv_in_idn(M, a, X, U, n) == top) == (a in idn(P, X, U, n))
                            checks += 1
            order, morder = TermOrder(P), MeasuredTermOrder(M)
            levels = terms_by_height(els, 2)
            for hx, hy in ((0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (2, 0)):
                for x in levels[hx]:
                    for y in levels[hy]:
                        assert (morder.ll(x, y) == top) == order.ll(x, y)
                        assert (morder.le(x, y) == top) == order.peq(x, y)
                        checks += 2
            instances += 1
        notes.append(f"{instances} partial lattices on at most 3 points, {checks} comparisons")
