"""Command-line entry point: ``lattice-forge <command> [flags]``.

Exit codes: 0 ok, 1 validation failure, 2 a checker found a property
violation, 3 the input could not be parsed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import files
from .amalgam import VFormation, check_pushout_quotient, pushout, pushout_measured, theorem_b
from .errors import CapExceeded, ForgeError, TermParseError, ValidationError
from .files import FormatError
from .gadgets import chain3_gadget, m3, m3_gadget, persp_gadget, relcomp_gadget
from .generate import random_dist_lattice, random_formation, random_measured, random_measured_structure
from .measured import check_truth_lemmas, is_balanced, quotient
from .order import chain, chain_lattice, prime_filters
from .partial import con_lattice, lattice_pl
from .terms import MeasuredTermOrder, TermOrder, parse_term, terms_by_height, theorem_a

OK, INVALID, VIOLATION, PARSE = 0, 1, 2, 3


class Exit(Exception):
    def __init__(self, code, message=""):
        super().__init__(message)
        self.code = code


def _load(path) -> files.Workspace:
    try:
        return files.load(path)
    except FormatError as e:
        raise Exit(PARSE, f"{path}: {e}")
    except (KeyError, TypeError, ValueError) as e:
        raise Exit(PARSE, f"{path}: malformed file ({e})")
    except OSError as e:
        raise Exit(PARSE, f"{path}: {e}")


def _need(ws, what, path):
    if what == "pl" and ws.pl is None:
        raise Exit(PARSE, f"{path}: no partial_lattice section")
    if what == "measured" and ws.measured is None:
        raise Exit(PARSE, f"{path}: needs lattice_D, partial_lattice and phi")


def _emit(args, obj):
    text = files.dumps(obj)
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)


def _dot(args, poset, name, labels=None):
    if getattr(args, "dot", None):
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(files.hasse_dot(poset, name, labels))


def _term(text, ws):
    try:
        return parse_term(text, ws.pl.elements)
    except (TermParseError, ValidationError) as e:
        raise Exit(PARSE, f"term {text!r}: {e}")


# commands

def cmd_validate(args):
    ws = _load(args.file)
    parts = [name for name, v in (("lattice_D", ws.D), ("partial_lattice", ws.pl), ("phi", ws.measured)) if v]
    if ws.pl is not None:
        _dot(args, ws.pl.poset, "P")
    print("OK" + (f" ({', '.join(parts)})" if parts else ""))


def cmd_con(args):
    ws = _load(args.file)
    _need(ws, "pl", args.file)
    C = con_lattice(ws.pl, cap=args.size_cap or 4096)
    print(f"congruences: {len(C)}")
    for i, c in enumerate(C.congruences):
        pairs = sorted((x, y) for x, y in c.pairs if x != y and not ws.pl.leq(x, y))
        print(f"c{i}: " + (", ".join(f"{x}<={y}" for x, y in pairs) or "0"))
    print("covers: " + ", ".join(f"c{i}<c{j}" for i, j in C.hasse()))
    _dot(args, C.poset, "Con")


def _value_line(M, v):
    E = M.E
    name = E.decode(v)
    tag = " (top)" if v == E.top else " (bottom)" if v == 0 else ""
    return f"{name}{tag}"


def cmd_bval(args):
    ws = _load(args.file)
    _need(ws, "measured", args.file)
    M = ws.measured
    x, y = _term(args.term1, ws), _term(args.term2, ws)
    v = MeasuredTermOrder(M).le(x, y)
    d = M.E.decode(v)
    print(f"[[{x} <= {y}]] = {_value_line(M, v)} in E")
    dtag = " (zero)" if d == ws.D.bot_id else " (unit)" if d == ws.D.top_id else ""
    print(f"as a D value (zero convention): {d}{dtag}")


def cmd_freecmp(args):
    ws = _load(args.file)
    _need(ws, "pl", args.file)
    x, y = _term(args.term1, ws), _term(args.term2, ws)
    r = TermOrder(ws.pl).peq(x, y)
    print(f"{x} <= {y}: {'true' if r else 'false'}")


def _filter(ws, gen, path):
    for G in prime_filters(ws.measured.E):
        if G.generator == gen:
            return G
    gens = ", ".join(G.generator for G in prime_filters(ws.measured.E))
    raise Exit(INVALID, f"{path}: {gen!r} is not a join-irreducible of E (choose from {gens})")


def cmd_quotient(args):
    ws = _load(args.file)
    _need(ws, "measured", args.file)
    if args.filter is None:
        raise Exit(PARSE, "quotient needs --filter ELEM")
    G = _filter(ws, args.filter, args.file)
    Q, proj = quotient(ws.measured, G)
    _dot(args, Q.poset, "P/G")
    _emit(args, files.workspace_obj(Q))


def _values(D, vals, k, name):
    vals = vals or [D.top_id] * k
    if len(vals) != k:
        raise Exit(PARSE, f"gadget {name} takes {k} D values")
    for v in vals:
        if v not in D.poset.index:
            raise Exit(INVALID, f"{v!r} is not an element of D")
    return vals


def _k_lattice(spec):
    if spec.endswith("chain") and spec[:-5].isdigit():
        n = int(spec[:-5])
        return lattice_pl(chain([str(i) for i in range(n)])), None
    ws = _load(spec)
    _need(ws, "pl", spec)
    return ws.pl, ws.measured


def cmd_gadget(args):
    D = _load(args.lattice_d).D if args.lattice_d else chain_lattice(["0", "1"])
    if D is None:
        raise Exit(PARSE, f"{args.lattice_d}: no lattice_D section")
    name, rest = args.name, list(args.args)
    if name == "m3":
        if len(rest) != 1:
            raise Exit(PARSE, "usage: gadget m3 (Nchain | FILE)")
        K, MK = _k_lattice(rest[0])
        if MK is not None:
            g = m3_gadget(MK)
            obj = files.workspace_obj(M=g.ambient)
            L = g.ambient.pl
        else:
            L, _ = m3(K)
            obj = files.workspace_obj(L)
        print(f"M3[K]: {len(L)} elements", file=sys.stderr)
        _dot(args, L.poset, "M3")
        _emit(args, obj)
        return
    builders = {"relcomp": (relcomp_gadget, 2), "persp": (persp_gadget, 4), "chain3": (chain3_gadget, 2)}
    if name not in builders:
        raise Exit(PARSE, f"unknown gadget {name!r} (relcomp, persp, chain3, m3)")
    fn, k = builders[name]
    g = fn(D, *_values(D, rest, k, name))
    _dot(args, g.ambient.pl.poset, name)
    _emit(args, files.workspace_obj(M=g.ambient, D=D))


def _report_quotient(q):
    print(f"classes: {len(q)}")
    print(f"closed: {'true' if q.closed else 'false'}")
    for i, r in enumerate(q.reps):
        print(f"  [{i}] {r}")


def cmd_theorem_a(args):
    ws = _load(args.file)
    _need(ws, "measured", args.file)
    try:
        q = theorem_a(ws.measured, height_cap=args.height_cap, size_cap=args.size_cap)
    except CapExceeded as e:
        print(f"size cap hit: {e}")
        _report_quotient(e.partial)
        raise Exit(INVALID)
    _report_quotient(q)
    if q.closed:
        L = q.as_measured()
        _dot(args, L.pl.poset, "L")
        if args.output:
            _emit(args, files.workspace_obj(M=L, D=ws.D))


def _formation(args):
    wss = [_load(p) for p in (args.K, args.P, args.Q)]
    maps = {"f": None, "g": None}
    if args.maps:
        try:
            with open(args.maps, encoding="utf-8") as fh:
                maps.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as e:
            raise Exit(PARSE, f"{args.maps}: {e}")
    measured = all(w.measured is not None for w in wss)
    parts = [w.measured if measured else w.pl for w in wss]
    if any(p is None for p in parts):
        raise Exit(PARSE, "K, P and Q files each need a partial_lattice section")
    K = wss[0].pl
    f = maps["f"] or {k: k for k in K.elements}
    g = maps["g"] or {k: k for k in K.elements}
    return wss, parts, f, g, measured


def cmd_pushout(args):
    wss, (K, P, Q), f, g, measured = _formation(args)
    R, ren_p, ren_q = pushout(VFormation(K, P, Q, f, g))
    print(f"pushout: {len(R)} elements", file=sys.stderr)
    if measured:
        _dot(args, R.pl.poset, "R")
        _emit(args, files.workspace_obj(M=R, D=wss[1].D))
    else:
        _dot(args, R.poset, "R")
        _emit(args, files.workspace_obj(R))


def cmd_theorem_b(args):
    wss, (K, P, Q), f, g, measured = _formation(args)
    if not measured:
        raise Exit(PARSE, "theorem-b needs measured K, P and Q")
    try:
        res = theorem_b(K, P, Q, f, g, height_cap=args.height_cap, size_cap=args.size_cap)
    except CapExceeded as e:
        print(f"size cap hit: {e}")
        raise Exit(INVALID)
    _report_quotient(res.quotient)
    print("map from P: " + ", ".join(f"{x}->[{i}]" for x, i in res.map_p.items()))
    print("map from Q: " + ", ".join(f"{x}->[{i}]" for x, i in res.map_q.items()))
    if res.closed and args.output:
        _emit(args, files.workspace_obj(M=res.quotient.as_measured(), D=wss[0].D))


def _transitivity(M, rng, triples):
    els = M.elements
    terms = [t for level in terms_by_height(els, 2) for t in level][:400]
    order = MeasuredTermOrder(M)
    for _ in range(triples):
        x, y, z = (rng.choice(terms) for _ in range(3))
        if order.le(x, y) & order.le(y, z) & ~order.le(x, z):
            return (str(x), str(y), str(z))
    return None


def cmd_selfcheck(args):
    rng = random.Random(args.seed)
    structures = []
    if args.file:
        ws = _load(args.file)
        _need(ws, "pl", args.file)
        if ws.measured is not None:
            structures.append(("file", ws.measured))
        for i in range(min(args.cases, 10)):
            structures.append((f"file-table-{i}", random_measured(rng, ws.pl, random_dist_lattice(rng))))
    for i in range(args.cases):
        structures.append((f"random-{i}", random_measured_structure(rng)))
    failures = 0
    for name, M in structures:
        problems = []
        rep = check_truth_lemmas(M)
        if not rep.ok:
            problems.append(f"truth lemma: {rep.counterexample}")
        if not is_balanced(M):
            problems.append("not balanced")
        bad = _transitivity(M, rng, 20)
        if bad:
            problems.append(f"term transitivity fails at {bad}")
        if problems:
            failures += 1
            print(f"FAIL {name}: " + "; ".join(problems))
    for i in range(min(args.cases, 20)):
        v = random_formation(rng, max_extra=1)
        R, _, _ = pushout_measured(v)
        bad = [G.generator for G in prime_filters(R.E) if not check_pushout_quotient(v, R, G)]
        if bad:
            failures += 1
            print(f"FAIL formation-{i}: R/G differs from the pushout of the quotients at {bad}")
        structures.append((f"formation-{i}", R))
    print(f"selfcheck: {len(structures)} structures, {failures} failures")
    if failures:
        raise Exit(VIOLATION)


# parser

class _Parser(argparse.ArgumentParser):
    """Usage errors are parse errors (exit 3), not argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise Exit(PARSE, message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lattice-forge", description="Finite partial lattices with Boolean-valued order.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, dot=True, out=False, caps=False):
        if dot:
            sp.add_argument("--dot", metavar="PATH", help="write a Hasse diagram in DOT")
        if out:
            sp.add_argument("-o", "--output", metavar="PATH", help="output file (default: stdout)")
        if caps:
            sp.add_argument("--height-cap", type=int, default=4)
            sp.add_argument("--size-cap", type=int, default=20000)

    sp = sub.add_parser("validate", help="parse and validate a file")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("con", help="congruence lattice of the partial lattice")
    sp.add_argument("file")
    sp.add_argument("--size-cap", type=int, default=4096)
    common(sp)
    sp.set_defaults(fn=cmd_con)

    for name, fn, desc in (("bval", cmd_bval, "Boolean value of term1 <= term2"),
                           ("freecmp", cmd_freecmp, "term1 <= term2 in the free lattice")):
        sp = sub.add_parser(name, help=desc)
        sp.add_argument("file")
        sp.add_argument("--term1", required=True)
        sp.add_argument("--term2", required=True)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("quotient", help="quotient at a prime filter")
    sp.add_argument("file")
    sp.add_argument("--filter", metavar="ELEM", help="join-irreducible of E generating the filter")
    common(sp, out=True)
    sp.set_defaults(fn=cmd_quotient)

    sp = sub.add_parser("gadget", help="build relcomp, persp, chain3 or m3")
    sp.add_argument("name")
    sp.add_argument("args", nargs="*", help="D values, or Nchain / FILE for m3")
    sp.add_argument("--lattice-d", metavar="FILE", help="file whose lattice_D is used (default: 2-chain 0<1)")
    common(sp, out=True)
    sp.set_defaults(fn=cmd_gadget)

    sp = sub.add_parser("theorem-a", help="term quotient of a measured partial lattice")
    sp.add_argument("file")
    common(sp, out=True, caps=True)
    sp.set_defaults(fn=cmd_theorem_a)

    for name, fn, desc in (("pushout", cmd_pushout, "pushout of P <- K -> Q"),
                           ("theorem-b", cmd_theorem_b, "amalgamate P <- K -> Q into a measured lattice")):
        sp = sub.add_parser(name, help=desc)
        sp.add_argument("K")
        sp.add_argument("P")
        sp.add_argument("Q")
        sp.add_argument("--maps", metavar="FILE", help='JSON {"f": {k: p}, "g": {k: q}}; default identity')
        common(sp, dot=(name == "pushout"), out=True, caps=(name == "theorem-b"))
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("selfcheck", help="seeded invariant suites")
    sp.add_argument("file", nargs="?")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cases", type=int, default=50)
    sp.set_defaults(fn=cmd_selfcheck)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.fn(args)
    except Exit as e:
        if str(e):
            print(f"error: {e}", file=sys.stderr)
        return e.code
    except ValidationError as e:
        print(f"invalid: {e}", file=sys.stderr)
        return INVALID
    except FormatError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return PARSE
    except ForgeError as e:
        print(f"error: {e}", file=sys.stderr)
        return INVALID
    return OK


if __name__ == "__main__":
    sys.exit(main())
