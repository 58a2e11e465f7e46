"""MINLP-JSON serialization of flattened subproblems.

Schema (``"format": 1``)::

    {
      "format": 1,
      "vars": [{"name": "x1", "lo": n, "hi": n, "kind": "integer"}, ...],
      "objective": {"sense": "max"|"min"|"feasibility", "expr": E},
      "constraints": [{"expr": E, "sense": s, "eps": f}, ...]
    }

where an expression E is one of::

    {"kind": "const",  "value": n}
    {"kind": "var",    "name": str}
    {"kind": "add",    "args": [E, ...]}
    {"kind": "mul",    "args": [E, ...]}
    {"kind": "div",    "num": E, "den": E}
    {"kind": "square", "arg": E}
    {"kind": "dot",    "coeffs": [n, ...], "names": [str, ...]}

and a number n is either a JSON double or an exact rational
``{"num": int, "den": int}``.  Doubles are printed with 17 significant
digits, which is enough for every IEEE-754 double to survive the text
round-trip bit-exactly; stdlib json.dump offers no control over float
formatting, hence the small hand-rolled emitter.  Rationals stay exact
by construction.

The parser is plain ``json.load`` plus a typed decode: JSON numbers
become Python floats, ``{"num","den"}`` objects become Fractions.
Because the writer preserves argument order and the evaluators fold
n-ary nodes strictly left to right, export → parse → evaluate is
bit-exact against evaluating the original tree.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import InputError
from .exprs import (
    Add,
    Const,
    Constraint,
    Div,
    Dot,
    EQ,
    Expr,
    LE_ZERO,
    Mul,
    NON_NEG,
    STRICT_NEG,
    Square,
    Var,
)
from .solve import FlatProblem, FlatVar

FORMAT_VERSION = 1

_SENSES = (STRICT_NEG, NON_NEG, EQ, LE_ZERO)

Number = Union[Fraction, float, int]


# ---------------------------------------------------------------------------
# writer


def _emit_number(v: Number, out: list[str]) -> None:
    if isinstance(v, Fraction):
        out.append('{"num":%d,"den":%d}' % (v.numerator, v.denominator))
    elif isinstance(v, float):
        if not math.isfinite(v):
            raise InputError(f"cannot serialize non-finite double {v!r}")
        out.append(format(v, ".17g"))
    elif isinstance(v, int):
        out.append(str(v))
    else:
        raise InputError(f"cannot serialize number of type {type(v).__name__}")


def _emit_expr(e: Expr, out: list[str]) -> None:
    if isinstance(e, Const):
        out.append('{"kind":"const","value":')
        _emit_number(e.value, out)
        out.append("}")
    elif isinstance(e, Var):
        out.append('{"kind":"var","name":%s}' % json.dumps(e.name))
    elif isinstance(e, (Add, Mul)):
        out.append('{"kind":%s,"args":[' % ('"add"' if isinstance(e, Add) else '"mul"'))
        for i, a in enumerate(e.args):
            if i:
                out.append(",")
            _emit_expr(a, out)
        out.append("]}")
    elif isinstance(e, Div):
        out.append('{"kind":"div","num":')
        _emit_expr(e.num, out)
        out.append(',"den":')
        _emit_expr(e.den, out)
        out.append("}")
    elif isinstance(e, Square):
        out.append('{"kind":"square","arg":')
        _emit_expr(e.arg, out)
        out.append("}")
    elif isinstance(e, Dot):
        out.append('{"kind":"dot","coeffs":[')
        for i, c in enumerate(e.coeffs):
            if i:
                out.append(",")
            _emit_number(c, out)
        out.append('],"names":[')
        out.append(",".join(json.dumps(n) for n in e.names))
        out.append("]}")
    else:
        raise InputError(f"cannot serialize expression node {type(e).__name__}")


def _objective_expr(flat: FlatProblem) -> Expr:
    coeffs = []
    names = []
    for v in flat.variables:
        c = flat.objective.get(v.name)
        if c:
            coeffs.append(c)
            names.append(v.name)
    if not coeffs:
        return Const(Fraction(0))
    return Dot(tuple(coeffs), tuple(names))


def dumps_problem(flat: FlatProblem) -> str:
    out: list[str] = ['{"format":%d,\n"vars":[\n' % FORMAT_VERSION]
    for i, v in enumerate(flat.variables):
        if i:
            out.append(",\n")
        out.append('{"name":%s,"lo":' % json.dumps(v.name))
        _emit_number(v.lo, out) if v.lo is not None else out.append("null")
        out.append(',"hi":')
        _emit_number(v.hi, out) if v.hi is not None else out.append("null")
        out.append(',"kind":%s}' % json.dumps(v.kind))
    out.append('\n],\n"objective":{"sense":%s,"expr":' % json.dumps(flat.sense))
    _emit_expr(_objective_expr(flat), out)
    out.append('},\n"constraints":[\n')
    for i, con in enumerate(flat.constraints):
        if i:
            out.append(",\n")
        out.append('{"expr":')
        _emit_expr(con.expr, out)
        out.append(',"sense":%s,"eps":' % json.dumps(con.sense))
        _emit_number(con.eps, out)
        out.append("}")
    out.append("\n]}\n")
    return "".join(out)


def write_problem(flat: FlatProblem, path) -> None:
    text = dumps_problem(flat)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# parser


@dataclass(frozen=True)
class ParsedProblem:
    variables: tuple[FlatVar, ...]
    sense: str
    objective: Expr
    constraints: tuple[Constraint, ...]


def _decode_number(v) -> Union[Fraction, float]:
    if isinstance(v, dict):
        if set(v) != {"num", "den"} or not all(isinstance(v[k], int) for k in v):
            raise InputError(f"malformed rational {v!r}")
        return Fraction(v["num"], v["den"])
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError(f"malformed number {v!r}")
    return float(v)


def _decode_expr(d) -> Expr:
    if not isinstance(d, dict) or "kind" not in d:
        raise InputError(f"malformed expression {d!r}")
    kind = d["kind"]
    if kind == "const":
        return Const(_decode_number(d["value"]))
    if kind == "var":
        return Var(str(d["name"]))
    if kind in ("add", "mul"):
        args = tuple(_decode_expr(a) for a in d["args"])
        return Add(args) if kind == "add" else Mul(args)
    if kind == "div":
        return Div(_decode_expr(d["num"]), _decode_expr(d["den"]))
    if kind == "square":
        return Square(_decode_expr(d["arg"]))
    if kind == "dot":
        coeffs = tuple(_decode_number(c) for c in d["coeffs"])
        names = tuple(str(n) for n in d["names"])
        return Dot(coeffs, names)
    raise InputError(f"unknown expression kind {kind!r}")


def _decode_bound(v):
    if v is None:
        return None
    num = _decode_number(v)
    return num if isinstance(num, Fraction) else Fraction(num)


def parse_problem(path) -> ParsedProblem:
    with open(path, "r", encoding="ascii") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_VERSION:
        raise InputError("unsupported or missing format version")
    variables = []
    for v in doc.get("vars", ()):
        kind = v.get("kind")
        if kind not in ("integer", "binary"):
            raise InputError(f"unknown variable kind {kind!r}")
        variables.append(
            FlatVar(str(v["name"]), _decode_bound(v["lo"]), _decode_bound(v["hi"]), kind)
        )
    obj = doc.get("objective", {})
    sense = obj.get("sense")
    if sense not in ("max", "min", "feasibility"):
        raise InputError(f"unknown objective sense {sense!r}")
    objective = _decode_expr(obj["expr"])
    constraints = []
    for c in doc.get("constraints", ()):
        if c.get("sense") not in _SENSES:
            raise InputError(f"unknown constraint sense {c.get('sense')!r}")
        eps = _decode_number(c.get("eps", 0.0))
        constraints.append(
            Constraint(_decode_expr(c["expr"]), c["sense"], float(eps))
        )
    return ParsedProblem(
        variables=tuple(variables),
        sense=sense,
        objective=objective,
        constraints=tuple(constraints),
    )
