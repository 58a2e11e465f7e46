"""Hard-instance generator.

Given a core point c of the cyclic group C_n, build a feasibility ILP
whose LP relaxation is comfortably feasible while no integer point
exists:

* the barycentric coordinates of x with respect to the rotations of c
  are the rows of Cir(c)^{-1}, i.e. rotations of the exact inverse
  column; requiring every coordinate >= 0 together with the layer
  equality <1, x> = <1, c> pins x inside the orbit polytope of c;
* cutting every vertex off with coordinate <= 1/2 then leaves no
  integer point at all — c is a core point, so its orbit polytope
  contains no integer points besides the vertices, and each vertex has
  one barycentric coordinate equal to 1.

The barycenter itself (coordinates all 1/n) stays LP-feasible, so the
instance is integer-infeasible but not trivially so.  Because the
verdict matters, generation ends with an independent certification
step: exhaustive enumeration of the integer box against the rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from .corepoints import is_lattice_free
from .errors import InputError, NotCore
from .instancefile import analyze_group
from .simplex import LPRow, make_row
from .solve import FEASIBILITY, Instance, make_instance
from .spectral import t_hat_exact


@dataclass(frozen=True)
class GenResult:
    instance: Instance
    layer: int
    #: None when certification was skipped
    certified: Optional[bool]
    #: an integer point satisfying all rows, if one was found (never,
    #: unless the construction is broken)
    witness: Optional[tuple[int, ...]]


def _cycle_string(n: int) -> str:
    return "(" + ",".join(str(i) for i in range(1, n + 1)) + ")"


def hard_instance(c: Sequence[int], require_core: bool = True) -> Instance:
    """Build the integer-infeasible feasibility instance for core point c."""
    n = len(c)
    if n < 3:
        raise InputError("need a point of dimension >= 3")
    group = analyze_group([_cycle_string(n)], n)
    if require_core:
        cert = is_lattice_free(group, tuple(int(v) for v in c))
        if cert.verdict != "Core":
            raise NotCore(
                f"{tuple(c)} is not a core point of the {n}-cycle "
                f"(witness {cert.witness})"
            )

    that = t_hat_exact(tuple(int(v) for v in c))
    layer = sum(int(v) for v in c)
    rows: list[LPRow] = []
    for i in range(n):
        coeffs = [that[(i - j) % n] for j in range(n)]
        rows.append(make_row(coeffs, ">=", Fraction(0)))
        rows.append(make_row(coeffs, "<=", Fraction(1, 2)))
    rows.append(make_row([Fraction(1)] * n, "==", Fraction(layer)))

    lo = min(int(v) for v in c) - 1
    hi = max(int(v) for v in c) + 1
    bounds = [(Fraction(lo), Fraction(hi))] * n
    return make_instance(
        n,
        sense=FEASIBILITY,
        rows=rows,
        bounds=bounds,
        integer=[True] * n,
        group=group,
    )


def certify_infeasible(inst: Instance) -> tuple[bool, Optional[tuple[int, ...]]]:
    """Exhaustively enumerate the integer box against the rows.  Returns
    (True, None) when no integer point satisfies every row, otherwise
    (False, witness).  Exact arithmetic throughout; this is the
    generator's own referee, independent of the search engine."""
    ranges = []
    for lo, hi in inst.bounds:
        if lo is None or hi is None:
            raise InputError("certification needs finite bounds")
        ranges.append(range(int(lo), int(hi) + 1))
    rows = [(tuple(Fraction(a) for a in r.coeffs), r.sense, r.rhs) for r in inst.rows]
    for point in product(*ranges):
        ok = True
        for coeffs, sense, rhs in rows:
            act = sum((a * v for a, v in zip(coeffs, point)), Fraction(0))
            if (
                (sense == "<=" and act > rhs)
                or (sense == ">=" and act < rhs)
                or (sense == "==" and act != rhs)
            ):
                ok = False
                break
        if ok:
            return False, point
    return True, None


def generate(c: Sequence[int], certify: bool = True) -> GenResult:
    inst = hard_instance(c)
    layer = sum(int(v) for v in c)
    if not certify:
        return GenResult(inst, layer, None, None)
    ok, witness = certify_infeasible(inst)
    return GenResult(inst, layer, ok, witness)
