"""The bounded enumeration engine for subproblems, and its flattening."""

from fractions import Fraction

import pytest

from corecuts import (
    Constraint,
    ConstraintSet,
    Dot,
    Const,
    Add,
    AuxVar,
    InputError,
    Instance,
    Outcome,
    Subproblem,
    flatten_subproblem,
    lp_relax,
    make_instance,
    merge_outcomes,
    solve_subproblem,
    symmetry_warnings,
)
from corecuts.exprs import EQ, LE_ZERO, NON_NEG, STRICT_NEG
from corecuts.instancefile import analyze_group
from corecuts.simplex import GE, LE, make_row
from corecuts.solve import FEASIBLE, INFEASIBLE, UNBOUNDED, UNKNOWN


def _sub(base, added=(), tag="PLAIN", sid="t"):
    return Subproblem(sid, base, tuple(added), tag, ("test",))


def _box(n, lo, hi):
    return ((Fraction(lo), Fraction(hi)),) * n


def _anchor_set(*constraints, aux=()):
    return ConstraintSet("S3", tuple(constraints), tuple(aux))


# ---------------------------------------------------------------------------
# instance basics


def test_make_instance_defaults():
    inst = make_instance(3)
    assert inst.sense == "feasibility"
    assert inst.objective == (0, 0, 0)
    assert inst.var_names == ("x1", "x2", "x3")
    assert all(inst.integer)


def test_instance_rejects_bad_sense():
    with pytest.raises(InputError):
        make_instance(2, sense="maximize")


def test_symmetry_warnings_flag_asymmetric_objective():
    group = analyze_group(["(1,2,3)"], 3)
    inst = make_instance(3, sense="max", objective=[1, 2, 3], group=group)
    warns = symmetry_warnings(inst)
    assert any("objective" in w for w in warns)
    inst_ok = make_instance(3, sense="max", objective=[1, 1, 1], group=group)
    assert symmetry_warnings(inst_ok) == []


def test_symmetry_warnings_flag_unpermuted_rows():
    group = analyze_group(["(1,2,3)"], 3)
    rows = (make_row([1, 0, 0], LE, 1),)
    inst = make_instance(3, rows=rows, group=group)
    assert any("rows" in w for w in symmetry_warnings(inst))
    sym_rows = tuple(
        make_row([1 if j == i else 0 for j in range(3)], LE, 1) for i in range(3)
    )
    assert symmetry_warnings(make_instance(3, rows=sym_rows, group=group)) == []


# ---------------------------------------------------------------------------
# LP relaxation


def test_lp_relax_feasibility_sense_detects_empty():
    rows = (make_row([1, 1], LE, 0), make_row([1, 1], GE, 1))
    inst = make_instance(2, rows=rows, bounds=_box(2, 0, 5))
    assert lp_relax(inst).status == INFEASIBLE


def test_lp_relax_max():
    rows = (make_row([1, 1], LE, 3),)
    inst = make_instance(2, sense="max", objective=[1, 1], rows=rows, bounds=_box(2, 0, 5))
    out = lp_relax(inst)
    assert out.status == FEASIBLE
    assert out.objective == 3


def test_lp_relax_unbounded():
    inst = make_instance(1, sense="max", objective=[1])
    assert lp_relax(inst).status == UNBOUNDED


# ---------------------------------------------------------------------------
# flattening


def test_flatten_orders_instance_then_aux():
    base = make_instance(2, bounds=_box(2, 0, 1))
    aux = AuxVar("q9_1", "integer")
    cs = ConstraintSet(
        "Sublayer",
        (Constraint(Add((Dot((1, 1), ("x1", "x2")), Const(-1))), EQ),),
        (aux,),
    )
    flat = flatten_subproblem(_sub(base, (cs,)))
    names = [v.name for v in flat.variables]
    assert names == ["x1", "x2", "q9_1"]
    q = flat.variables[2]
    assert q.kind == "integer"


def test_flatten_binary_aux_gets_unit_box():
    base = make_instance(1, bounds=_box(1, 0, 1))
    cs = ConstraintSet(
        "S2",
        (Constraint(Dot((1,), ("r1_0",)), LE_ZERO),),
        (AuxVar("r1_0", "binary"),),
    )
    flat = flatten_subproblem(_sub(base, (cs,)))
    r = [v for v in flat.variables if v.name == "r1_0"][0]
    assert (r.lo, r.hi) == (0, 1)


def test_flatten_rejects_duplicate_aux_names():
    base = make_instance(1)
    mk = lambda: ConstraintSet(
        "S2",
        (Constraint(Dot((1,), ("r1_0",)), LE_ZERO),),
        (AuxVar("r1_0", "binary"),),
    )
    with pytest.raises(InputError):
        flatten_subproblem(_sub(base, (mk(), mk())))


# ---------------------------------------------------------------------------
# the enumerator


def test_solve_feasibility_finds_point():
    rows = (make_row([1, 1], "==", 3),)
    inst = make_instance(2, rows=rows, bounds=_box(2, 0, 3))
    out = solve_subproblem(_sub(inst))
    assert out.status == FEASIBLE
    assert sum(out.point) == 3
    assert all(v.denominator == 1 for v in out.point)


def test_solve_infeasible_by_rows():
    rows = (make_row([2, 2], "==", 3),)  # odd sum of evens
    inst = make_instance(2, rows=rows, bounds=_box(2, 0, 3))
    assert solve_subproblem(_sub(inst)).status == INFEASIBLE


def test_solve_max_picks_optimum():
    rows = (make_row([1, 1], LE, 4),)
    inst = make_instance(2, sense="max", objective=[2, 1], rows=rows, bounds=_box(2, 0, 3))
    out = solve_subproblem(_sub(inst))
    assert out.status == FEASIBLE
    assert out.objective == 7  # x1=3, x2=1
    assert out.point == (3, 1)


def test_solve_min_flips():
    inst = make_instance(2, sense="min", objective=[1, 1], bounds=_box(2, -2, 2))
    out = solve_subproblem(_sub(inst))
    assert out.objective == -4


def test_solve_budget_zero_is_unknown():
    inst = make_instance(2, bounds=_box(2, 0, 1))
    assert solve_subproblem(_sub(inst), budget=0).status == UNKNOWN


def test_solve_honors_added_equalities():
    base = make_instance(2, bounds=_box(2, 0, 5))
    anchor = _anchor_set(
        Constraint(Add((Dot((1, -1), ("x1", "x2")), Const(-2))), EQ)
    )
    out = solve_subproblem(_sub(base, (anchor,)))
    assert out.status == FEASIBLE
    x1, x2 = out.point
    assert x1 - x2 == 2


def test_solve_strict_senses_respect_eps():
    base = make_instance(1, bounds=_box(1, 0, 5))
    # x - 3 < 0 with a large eps excludes x = 3 itself
    strict = _anchor_set(
        Constraint(Add((Dot((1,), ("x1",)), Const(-3))), STRICT_NEG, 0.5)
    )
    out = solve_subproblem(_sub(base, (strict,)), )
    assert out.status == FEASIBLE
    assert out.point[0] <= 2
    pos = _anchor_set(Constraint(Dot((1,), ("x1",)), NON_NEG, 0.5))
    out2 = solve_subproblem(_sub(base, (pos,)))
    assert out2.point[0] >= 1


def test_solve_nonlinear_division_guard():
    """1/x1 <= 0 can never hold for x1 in 1..3; x1 = 0 must be rejected
    by the division, not crash the search."""
    from corecuts import Div

    base = make_instance(1, bounds=_box(1, 0, 3))
    cs = _anchor_set(Constraint(Div(Const(1), Dot((1,), ("x1",))), LE_ZERO))
    assert solve_subproblem(_sub(base, (cs,))).status == INFEASIBLE


def test_solve_interval_propagation_prunes_wide_boxes():
    """A chain of tight equalities over a huge declared box must solve
    within a small budget: propagation has to shrink the domain before
    enumeration."""
    n = 6
    rows = tuple(
        make_row([1 if j == i else -1 if j == i + 1 else 0 for j in range(n)], "==", 0)
        for i in range(n - 1)
    ) + (make_row([1] + [0] * (n - 1), "==", 37),)
    inst = make_instance(n, rows=rows, bounds=_box(n, -1000, 1000))
    out = solve_subproblem(_sub(inst), budget=500)
    assert out.status == FEASIBLE
    assert out.point == (37,) * n


def test_solve_unbounded_integers_get_default_box():
    inst = make_instance(1, sense="max", objective=[1])
    out = solve_subproblem(_sub(inst))
    # clipped by the default +/-50 window rather than running forever
    assert out.status == FEASIBLE
    assert out.objective == 50


def test_merge_outcomes_priority():
    f = Outcome(FEASIBLE, (Fraction(1),), Fraction(1))
    i = Outcome(INFEASIBLE)
    u = Outcome(UNKNOWN)
    ub = Outcome(UNBOUNDED)
    assert merge_outcomes([i, f, u]).status == FEASIBLE
    assert merge_outcomes([i, u]).status == UNKNOWN
    assert merge_outcomes([i, i]).status == INFEASIBLE
    assert merge_outcomes([ub, i]).status == UNBOUNDED
    assert merge_outcomes([f, ub]).status == FEASIBLE


def test_export_subproblem_round_trips(tmp_path):
    from corecuts import parse_problem

    base = make_instance(2, sense="max", objective=[1, 2], bounds=_box(2, 0, 4))
    cs = _anchor_set(Constraint(Add((Dot((1, 1), ("x1", "x2")), Const(-3))), EQ))
    path = tmp_path / "sub.json"
    from corecuts import export_subproblem

    export_subproblem(_sub(base, (cs,)), path)
    parsed = parse_problem(path)
    assert [v.name for v in parsed.variables] == ["x1", "x2"]
    assert parsed.sense == "max"
