"""Exact rational LP solver: two-phase primal simplex with Bland's rule.

Everything is computed over fractions.Fraction, so optima, basic points
and infeasibility verdicts are exact.  Bland's anti-cycling rule keeps
the method finite on every input.  Designed for desk-scale problems
(tens of variables), not performance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InputError

LE, GE, EQ = "<=", ">=", "=="

Bound = Optional[Fraction]


@dataclass(frozen=True)
class LPRow:
    coeffs: tuple[Fraction, ...]
    sense: str
    rhs: Fraction


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[tuple[Fraction, ...]] = None
    objective: Optional[Fraction] = None


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def make_row(coeffs: Sequence, sense: str, rhs) -> LPRow:
    if sense not in (LE, GE, EQ):
        raise InputError(f"bad row sense {sense!r}")
    return LPRow(tuple(_frac(a) for a in coeffs), sense, _frac(rhs))


class _Tableau:
    """Simplex tableau in equality standard form A y = b, y >= 0, b >= 0."""

    def __init__(
        self,
        rows: list[list[Fraction]],
        rhs: list[Fraction],
        basis: list[int],
        ncols: Optional[int] = None,
    ):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = ncols if ncols is not None else (len(rows[0]) if rows else 0)

    def pivot(self, r: int, col: int) -> None:
        piv = self.rows[r][col]
        inv = Fraction(1) / piv
        self.rows[r] = [a * inv for a in self.rows[r]]
        self.rhs[r] *= inv
        for i in range(len(self.rows)):
            if i == r:
                continue
            factor = self.rows[i][col]
            if factor:
                self.rows[i] = [a - factor * p for a, p in zip(self.rows[i], self.rows[r])]
                self.rhs[i] -= factor * self.rhs[r]
        self.basis[r] = col

    def minimize(self, cost: list[Fraction], frozen: set[int]) -> tuple[str, Fraction]:
        """Run simplex iterations minimizing cost^T y; Bland's rule throughout.

        Columns in ``frozen`` are never allowed to enter the basis.
        Returns (status, objective value).
        """
        m = len(self.rows)
        while True:
            # reduced costs relative to the current basis
            dual = [cost[self.basis[i]] for i in range(m)]
            entering = -1
            for j in range(self.ncols):
                if j in frozen or j in self.basis:
                    continue
                red = cost[j] - sum(dual[i] * self.rows[i][j] for i in range(m))
                if red < 0:
                    entering = j  # Bland: smallest index wins
                    break
            if entering < 0:
                value = sum(cost[self.basis[i]] * self.rhs[i] for i in range(m))
                return "optimal", value
            # ratio test, Bland tie-break on smallest basis column
            leave_row = -1
            best: Optional[Fraction] = None
            for i in range(m):
                a = self.rows[i][entering]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if best is None or ratio < best or (
                        ratio == best and self.basis[i] < self.basis[leave_row]
                    ):
                        best = ratio
                        leave_row = i
            if leave_row < 0:
                return "unbounded", Fraction(0)
            self.pivot(leave_row, entering)


def solve_lp(
    n: int,
    objective: Sequence,
    rows: Sequence[LPRow],
    bounds: Sequence[tuple[Bound, Bound]],
    maximize: bool = True,
) -> LPResult:
    """Solve max/min objective^T x subject to rows and variable bounds.

    ``bounds[i]`` is (lo, hi) with None meaning unbounded on that side.
    """
    obj = [_frac(a) for a in objective]
    if len(obj) != n or len(bounds) != n:
        raise InputError("objective/bounds length mismatch")

    # Substitute each original variable by nonnegative ones:
    #   lo finite:            x = lo + u
    #   lo = -inf, hi finite: x = hi - u
    #   free:                 x = u - w
    # subst[i] = list of (column, coefficient); shift[i] = constant term.
    subst: list[list[tuple[int, Fraction]]] = []
    shift: list[Fraction] = []
    ncols = 0
    extra_rows: list[LPRow] = []
    for i, (lo, hi) in enumerate(bounds):
        lo = None if lo is None else _frac(lo)
        hi = None if hi is None else _frac(hi)
        if lo is not None and hi is not None and hi < lo:
            return LPResult(status="infeasible")
        if lo is not None:
            subst.append([(ncols, Fraction(1))])
            shift.append(lo)
            if hi is not None:
                coeffs = [Fraction(0)] * n
                coeffs[i] = Fraction(1)
                extra_rows.append(LPRow(tuple(coeffs), LE, hi))
            ncols += 1
        elif hi is not None:
            subst.append([(ncols, Fraction(-1))])
            shift.append(hi)
            ncols += 1
        else:
            subst.append([(ncols, Fraction(1)), (ncols + 1, Fraction(-1))])
            shift.append(Fraction(0))
            ncols += 2
    nstruct = ncols

    def to_u_space(coeffs: Sequence[Fraction], rhs: Fraction) -> tuple[list[Fraction], Fraction]:
        row = [Fraction(0)] * nstruct
        b = rhs
        for i, a in enumerate(coeffs):
            if not a:
                continue
            b -= a * shift[i]
            for col, sign in subst[i]:
                row[col] += a * sign
        return row, b

    all_rows = list(rows) + extra_rows
    work: list[tuple[list[Fraction], str, Fraction]] = []
    for row in all_rows:
        if len(row.coeffs) != n:
            raise InputError("row length mismatch")
        u_coeffs, b = to_u_space([_frac(a) for a in row.coeffs], _frac(row.rhs))
        sense = row.sense
        if b < 0:
            u_coeffs = [-a for a in u_coeffs]
            b = -b
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        work.append((u_coeffs, sense, b))

    m = len(work)
    nslack = sum(1 for _, s, _ in work if s != EQ)
    total = nstruct + nslack + m  # artificials for every row keep phase 1 simple
    tab_rows: list[list[Fraction]] = []
    tab_rhs: list[Fraction] = []
    basis: list[int] = []
    slack_at = nstruct
    art_at = nstruct + nslack
    for r, (coeffs, sense, b) in enumerate(work):
        full = coeffs + [Fraction(0)] * (total - nstruct)
        if sense == LE:
            full[slack_at] = Fraction(1)
            slack_at += 1
        elif sense == GE:
            full[slack_at] = Fraction(-1)
            slack_at += 1
        full[art_at + r] = Fraction(1)
        tab_rows.append(full)
        tab_rhs.append(b)
        basis.append(art_at + r)

    tab = _Tableau(tab_rows, tab_rhs, basis, ncols=total)

    # Phase 1: drive out the artificial variables.
    phase1 = [Fraction(0)] * total
    for j in range(art_at, total):
        phase1[j] = Fraction(1)
    status, value = tab.minimize(phase1, frozen=set())
    if value != 0:
        return LPResult(status="infeasible")
    artificial = set(range(art_at, total))
    for r in range(m):
        if tab.basis[r] in artificial:
            # pivot the (zero-valued) artificial out if any real column is usable
            for j in range(art_at):
                if tab.rows[r][j] != 0:
                    tab.pivot(r, j)
                    break

    # Phase 2 on the real objective (minimize -obj when maximizing).
    cost = [Fraction(0)] * total
    for i in range(n):
        for col, sign in subst[i]:
            cost[col] += (-obj[i] if maximize else obj[i]) * sign
    status, value = tab.minimize(cost, frozen=artificial)
    if status == "unbounded":
        return LPResult(status="unbounded")

    u = [Fraction(0)] * total
    for r in range(m):
        u[tab.basis[r]] = tab.rhs[r]
    x = []
    for i in range(n):
        xi = shift[i]
        for col, sign in subst[i]:
            xi += sign * u[col]
        x.append(xi)
    objective_value = sum(o * xi for o, xi in zip(obj, x))
    return LPResult(status="optimal", x=tuple(x), objective=objective_value)


def lp_feasible(n: int, rows: Sequence[LPRow], bounds: Sequence[tuple[Bound, Bound]]) -> bool:
    """Exact feasibility check of a linear system (phase 1 only)."""
    res = solve_lp(n, [0] * n, rows, bounds, maximize=True)
    return res.status != "infeasible"
