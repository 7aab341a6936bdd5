import random
from itertools import combinations

import pytest

from lattice_forge.amalgam import (
    VFormation,
    check_formation,
    check_pushout_quotient,
    k_height,
    mediating_map,
    proper_violation,
    pushout,
    pushout_measured,
    pushout_pl,
    standardize,
    theorem_b,
    transfer_idj_sample,
    transfer_idm_sample,
)
from lattice_forge.errors import NotAHomomorphism, NotALattice, ValidationError
from lattice_forge.files import load
from lattice_forge.generate import random_formation, small_lattices
from lattice_forge.measured import bv_in_idn, from_order, is_balanced
from lattice_forge.order import build_poset, chain, prime_filters
from lattice_forge.partial import (
    PartialLattice,
    augment_singletons,
    is_homomorphism,
    lattice_pl,
    validate_pl,
)

from conftest import DATA, homs, small_posets


def full_pl(poset):
    """Every existing sup and inf recorded."""
    els = poset.elements
    joins, meets = {}, {}
    for k in range(1, len(els) + 1):
        for combo in combinations(range(len(els)), k):
            m = sum(1 << i for i in combo)
            X = frozenset(els[i] for i in combo)
            s, t = poset.sup_index(m), poset.inf_index(m)
            if s is not None:
                joins[X] = els[s]
            if t is not None:
                meets[X] = els[t]
    return PartialLattice(poset, joins, meets)


TARGETS = [T for p in small_posets(4) for T in (full_pl(p), augment_singletons(PartialLattice(p, {}, {})))]


def chain3_formation():
    return VFormation(*(load(DATA / f"chain3_{n}.json").measured for n in ("K2", "P3", "Q3")),
                      {"0": "0", "1": "1"}, {"0": "0", "1": "1"})


def formations(seed, count, **kw):
    rng = random.Random(seed)
    return [random_formation(rng, **kw) for _ in range(count)]


def test_chain3_pushout():
    v = chain3_formation()
    std, _, _ = standardize(v)
    R, ip, iq = pushout_pl(std)
    assert len(R) == 4
    assert is_homomorphism(ip) and is_homomorphism(iq)
    extras = [x for x in R.elements if x not in ("0", "1")]
    assert len(extras) == 2 and not R.leq(*extras) and not R.leq(*reversed(extras))
    assert R.join_of(extras) is None


def test_pushout_over_one_point():
    K = lattice_pl(chain("k"))
    P = lattice_pl(chain(["k", "a"]))
    Q = lattice_pl(chain(["b", "k"]))
    R, _, _ = pushout_pl(VFormation(K, P, Q, {"k": "k"}, {"k": "k"}))
    assert R.leq("b", "a") and len(R) == 3


def test_formation_errors():
    S = lattice_pl(build_poset("0ab1", [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]))
    V = augment_singletons(PartialLattice(build_poset("ab"), {}, {}))
    with pytest.raises(NotALattice):
        check_formation(VFormation(V, S, S, {"a": "a", "b": "b"}, {"a": "a", "b": "b"}))
    K = lattice_pl(chain("01"))
    with pytest.raises(NotAHomomorphism):
        check_formation(VFormation(K, S, S, {"0": "0", "1": "0"}, {"0": "0", "1": "1"}))
    with pytest.raises(ValidationError):
        pushout_pl(VFormation(K, S, S, {"0": "0", "1": "a"}, {"0": "0", "1": "1"}))


def test_standardize_renames_clashes():
    for v in formations(1, 20, standard=False):
        std, ren_p, ren_q = standardize(v)
        assert std.is_standard()
        assert all(ren_q[v.g[k]] == k for k in v.K.elements)
        assert len(set(ren_p.values()) | set(ren_q.values())) == len(v.P) + len(v.Q) - len(v.K)
        R, mp, mq = pushout(v)
        assert set(mp.values()) | set(mq.values()) == set(R.elements)


def test_pushout_is_valid_and_maps_embed():
    for v in formations(2, 40, measured=False):
        R, ip, iq = pushout_pl(v)
        validate_pl(R.poset, R.joins, R.meets)
        assert is_homomorphism(ip) and is_homomorphism(iq)
        for x in v.P.elements:
            for y in v.P.elements:
                assert R.leq(x, y) == v.P.leq(x, y)


def test_universal_property_against_small_targets():
    for v in formations(3, 20, measured=False, max_extra=1):
        R, _, _ = pushout_pl(v)
        for S in TARGETS:
            pairs = 0
            for hp in homs(v.P, S):
                fixed = {k: hp[k] for k in v.K.elements}
                for hq in homs(v.Q, S, fixed):
                    h = mediating_map(v, R, hp, hq, S)
                    assert h is not None and is_homomorphism(h)
                    pairs += 1
            assert pairs == sum(1 for _ in homs(R, S))


def test_mediating_map_disagreeing_on_k():
    v = chain3_formation()
    std, _, _ = standardize(v)
    R, _, _ = pushout_pl(std)
    one = lattice_pl(chain("z"))
    hp = {x: "z" for x in std.P.elements}
    assert mediating_map(std, R, hp, {x: "w" for x in std.Q.elements}, one) is None


def test_measured_pushout_values():
    for v in formations(4, 30):
        R, ip, iq = pushout_measured(v)
        for S, incl in ((v.P, ip), (v.Q, iq)):
            for x in S.elements:
                for y in S.elements:
                    assert R.bv(x, y) == S.bv(x, y)
        for x in v.P.elements:
            for y in v.Q.elements:
                want = 0
                for z in v.K.elements:
                    want |= v.P.bv(x, z) & v.Q.bv(z, y)
                assert R.bv(x, y) == want
        assert is_balanced(R)


def test_measured_pushout_classical():
    v = chain3_formation()
    std, _, _ = standardize(v)
    P, Q, K = (from_order(S.pl) for S in (std.P, std.Q, std.K))
    R, _, _ = pushout_measured(VFormation(K, P, Q, std.f, std.g))
    plain, _, _ = pushout_pl(std)
    top = R.E.top
    for x in R.elements:
        for y in R.elements:
            assert (R.bv(x, y) == top) == plain.leq(x, y)


def test_pushout_quotient_commutes():
    for v in formations(5, 25):
        R, _, _ = pushout_measured(v)
        for G in prime_filters(R.E):
            assert check_pushout_quotient(v, R, G)
    v = chain3_formation()
    std, _, _ = standardize(v)
    R, _, _ = pushout_measured(std)
    assert all(check_pushout_quotient(std, R, G) for G in prime_filters(R.E))


def test_k_height():
    for name, poset in small_lattices():
        n = {"chain1": 1, "chain2": 2, "chain3": 3, "chain4": 4, "chain5": 5}.get(name)
        if n:
            assert k_height(lattice_pl(poset)) == n
    assert k_height(lattice_pl(dict(small_lattices())["square"])) == 3


def test_transfer_idm_samples():
    for v in formations(6, 20):
        R, _, _ = pushout_measured(v)
        for a, b in combinations(R.elements, 2):
            s = transfer_idm_sample(v, R, a, b, fallback=False)
            assert s.members <= set(R.elements)
            t = transfer_idm_sample(v, R, a, b, kind="film", fallback=False)
            assert t.members <= set(R.elements)


def test_transfer_idj_index_and_stabilization():
    for v in formations(7, 12, max_extra=1):
        R, _, _ = pushout_measured(v)
        h = k_height(v.K.pl)
        m = max(len(v.P), len(v.Q))
        els = list(R.elements)
        for Z in [c for r in (1, 2) for c in combinations(els, r)]:
            s = transfer_idj_sample(v, R, Z, fallback=False)
            assert s.index == (h + 2) * m + h + 1
            rest = [x for x in els if x not in s.members]
            base = [bv_in_idn(R, a, Z, s.members, s.index) for a in els]
            for r in range(len(rest) + 1):
                for extra in combinations(rest, r):
                    Y = set(s.members) | set(extra)
                    assert [bv_in_idn(R, a, Z, Y, s.index) for a in els] == base


def test_transfer_index_on_chain3():
    v = chain3_formation()
    std, _, _ = standardize(v)
    R, _, _ = pushout_measured(std)
    s = transfer_idj_sample(std, R, [x for x in R.elements if x not in ("0", "1")], fallback=False)
    # h = 2 and m = 3
    assert s.index == 4 * 3 + 3


def test_theorem_b_chain3():
    v = chain3_formation()
    res = theorem_b(v.K, v.P, v.Q, v.f, v.g)
    assert res.closed and len(res.quotient) == 6
    assert proper_violation(res.quotient) is None
    q = res.quotient
    for S, mp in ((v.P, res.map_p), (v.Q, res.map_q)):
        for x in S.elements:
            for y in S.elements:
                assert q.psi(mp[x], mp[y]) == S.bv(x, y)
    assert all(res.map_p[v.f[k]] == res.map_q[v.g[k]] for k in v.K.elements)


def test_theorem_b_random():
    closed = 0
    for v in formations(9, 25, max_extra=1):
        res = theorem_b(v.K, v.P, v.Q, v.f, v.g, height_cap=3, size_cap=3000)
        q = res.quotient
        for S, mp in ((v.P, res.map_p), (v.Q, res.map_q)):
            for x in S.elements:
                for y in S.elements:
                    assert q.psi(mp[x], mp[y]) == S.bv(x, y)
        assert all(res.map_p[v.f[k]] == res.map_q[v.g[k]] for k in v.K.elements)
        closed += res.closed
    assert closed >= 10
