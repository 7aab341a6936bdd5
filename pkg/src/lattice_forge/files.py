"""JSON file format and DOT export.

A file is a UTF-8 JSON object with up to three keys::

    {"lattice_D": {"elements": [...], "le": [[x, y], ...]},
     "partial_lattice": {"elements": [...], "le": [[x, y], ...],
                         "joins": [{"args": [...], "value": v}, ...],
                         "meets": [...]},
     "phi": [[x, y, d], ...]}

``le`` lists generating pairs (closure is taken).  ``phi`` is in the zero
convention: ``d`` is the ``D`` value of ``Θ⁺(x, y)``; pairs with ``x ≤ y``
may be left out, every other pair is required.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .errors import ForgeError
from .measured import MeasuredPL, from_phi_table
from .order import DistLattice, FinitePoset, as_dist_lattice, build_poset, dualize
from .partial import PartialLattice, validate_pl


class FormatError(ForgeError):
    """The file is not valid JSON or does not have the expected shape."""


@dataclass
class Workspace:
    D: Optional[DistLattice]
    pl: Optional[PartialLattice]
    measured: Optional[MeasuredPL]


def _expect(cond, msg):
    if not cond:
        raise FormatError(msg)


def _ids(v, what):
    _expect(isinstance(v, list) and all(isinstance(x, str) for x in v), f"{what} must be a list of strings")
    return v


def _pairs(v, what, width=2):
    _expect(isinstance(v, list), f"{what} must be a list")
    for p in v:
        _expect(isinstance(p, list) and len(p) == width and all(isinstance(x, str) for x in p),
                f"each entry of {what} must be a list of {width} strings")
    return [tuple(p) for p in v]


def _ops(v, what):
    _expect(isinstance(v, list), f"{what} must be a list")
    out = []
    for e in v:
        _expect(isinstance(e, dict) and "args" in e and "value" in e,
                f"each entry of {what} needs 'args' and 'value'")
        out.append((_ids(e["args"], f"{what} args"), e["value"]))
        _expect(isinstance(e["value"], str), f"{what} value must be a string")
    return out


def parse_poset(obj, what) -> FinitePoset:
    _expect(isinstance(obj, dict), f"{what} must be an object")
    els = _ids(obj.get("elements"), f"{what}.elements")
    return build_poset(els, _pairs(obj.get("le", []), f"{what}.le"))


def parse_pl(obj) -> PartialLattice:
    poset = parse_poset(obj, "partial_lattice")
    joins = _ops(obj.get("joins", []), "joins")
    meets = _ops(obj.get("meets", []), "meets")
    return validate_pl(poset, joins, meets)


def parse_workspace(obj) -> Workspace:
    """Build and validate everything present in an already-decoded file."""
    _expect(isinstance(obj, dict), "top level must be an object")
    D = as_dist_lattice(parse_poset(obj["lattice_D"], "lattice_D")) if "lattice_D" in obj else None
    pl = parse_pl(obj["partial_lattice"]) if "partial_lattice" in obj else None
    M = None
    if "phi" in obj:
        _expect(D is not None and pl is not None, "phi needs lattice_D and partial_lattice")
        table = {(x, y): d for x, y, d in _pairs(obj["phi"], "phi", 3)}
        M = from_phi_table(pl, D, table)
    return Workspace(D, pl, M)


def decode(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e}") from None


def load(path) -> Workspace:
    with open(path, encoding="utf-8") as fh:
        return parse_workspace(decode(fh.read()))


# writing

def poset_obj(P: FinitePoset) -> dict:
    return {"elements": list(P.elements), "le": [list(c) for c in P.covers()]}


def pl_obj(P: PartialLattice) -> dict:
    def ops(table):
        idx = P.index
        rows = [(sorted(X, key=idx.__getitem__), a) for X, a in table.items()]
        rows.sort(key=lambda r: (len(r[0]), [idx[x] for x in r[0]]))
        return [{"args": X, "value": a} for X, a in rows]

    out = poset_obj(P.poset)
    out["joins"] = ops(P.joins)
    out["meets"] = ops(P.meets)
    return out


def workspace_obj(pl: PartialLattice = None, M: MeasuredPL = None, D: DistLattice = None) -> dict:
    """File object for a partial lattice, optionally measured.

    For measured input ``D`` defaults to the dual of the value lattice, which
    keeps the ids.
    """
    out = {}
    if M is not None:
        pl = M.pl
        if D is None:
            D = dualize(M.E)
    if D is not None:
        out["lattice_D"] = poset_obj(D.poset)
    if pl is not None:
        out["partial_lattice"] = pl_obj(pl)
    if M is not None:
        els = M.elements
        out["phi"] = [[x, y, M.E.decode(M.table[i][j])]
                      for i, x in enumerate(els) for j, y in enumerate(els)
                      if not M.pl.poset.up[i] >> j & 1]
    return out


def _fmt(obj, indent: int) -> str:
    # containers holding only scalars or flat lists stay on one line
    flat = lambda v: not isinstance(v, (dict, list)) or (
        isinstance(v, list) and all(not isinstance(w, (dict, list)) for w in v))
    pad = "  " * (indent + 1)
    if isinstance(obj, dict):
        if all(flat(v) for v in obj.values()) and len(obj) <= 2:
            return json.dumps(obj, ensure_ascii=False)
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_fmt(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        items = [pad + _fmt(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]" if obj else "[]"
    return json.dumps(obj, ensure_ascii=False)


def dumps(obj) -> str:
    return _fmt(obj, 0) + "\n"


def save(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


# DOT

def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def hasse_dot(P: FinitePoset, name: str = "P", labels: dict = None) -> str:
    """Hasse diagram only (covers), bottom to top."""
    labels = labels or {}
    lines = [f"digraph {_q(name)} {{", "  rankdir=BT;", "  node [shape=circle];"]
    for x in P.elements:
        lab = labels.get(x)
        lines.append(f"  {_q(x)}" + (f" [label={_q(lab)}]" if lab else "") + ";")
    for x, y in P.covers():
        lines.append(f"  {_q(x)} -> {_q(y)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
