"""Schedules and dispatch for the three layer-search strategies."""

from fractions import Fraction

import pytest

from corecuts import (
    ConstraintSet,
    EngineOptions,
    InputError,
    Subproblem,
    analyze_group,
    generate,
    make_instance,
    plan,
    plan_algorithm1,
    plan_algorithm2,
    plan_algorithm3,
    report_to_dict,
    run_algorithm1,
    run_algorithm2,
    run_auto,
    run_plain,
    s2_singular,
)
from corecuts.simplex import LE, make_row


def _full_cycle_group(k):
    return analyze_group(["(" + ",".join(str(i) for i in range(1, k + 1)) + ")"], k)


def _two_cycles_group(k):
    a = "(" + ",".join(str(i) for i in range(1, k + 1)) + ")"
    b = "(" + ",".join(str(i) for i in range(k + 1, 2 * k + 1)) + ")"
    return analyze_group([a, b], 2 * k)


def _box(n, lo, hi):
    return ((Fraction(lo), Fraction(hi)),) * n


# ---------------------------------------------------------------------------
# options and subproblem validation


def test_options_validate():
    with pytest.raises(InputError):
        EngineOptions(anchor_mode="mixed")
    with pytest.raises(InputError):
        EngineOptions(essential_budget=0)


def test_subproblem_tag_must_match_sets():
    inst = make_instance(3)
    with pytest.raises(InputError):
        Subproblem("x", inst, (), "S1", ())
    cyc = _full_cycle_group(3).selected_cycles[0]
    ok = Subproblem("x", inst, (s2_singular(cyc),), "S2", ())
    assert ok.tag == "S2"


# ---------------------------------------------------------------------------
# planning counts


@pytest.mark.parametrize("k,s1,s3", [(5, 4, 16), (7, 6, 24), (8, 7, 28)])
def test_algorithm2_counts_at_budget_four(k, s1, s3):
    group = _full_cycle_group(k)
    inst = make_instance(k, group=group)
    sch = plan_algorithm2(inst, group.selected_cycles[0], EngineOptions(essential_budget=4))
    assert sch.counts() == {"S1": s1, "S2": 1, "S3": s3, "FIX": 0}


@pytest.mark.parametrize(
    "k,s1,s2,s3", [(5, 16, 8, 16), (8, 49, 14, 28)]
)
def test_algorithm3_counts_at_budget_four(k, s1, s2, s3):
    group = _two_cycles_group(k)
    inst = make_instance(2 * k, group=group)
    sch = plan_algorithm3(inst, group.selected_cycles, EngineOptions(essential_budget=4))
    assert sch.counts() == {"S1": s1, "S2": s2, "S3": s3, "FIX": 1}


def test_algorithm3_anchor_modes():
    group = _two_cycles_group(5)
    inst = make_instance(10, group=group)
    kwargs = dict(essential_budget=1, dry_run=True)
    sum_mode = plan_algorithm3(inst, group.selected_cycles, EngineOptions(**kwargs))
    prod_mode = plan_algorithm3(
        inst, group.selected_cycles, EngineOptions(anchor_mode="product", **kwargs)
    )
    # one essential point per residue: 4 anchors on one cycle vs 4x4 pairs
    assert sum_mode.counts()["S3"] == 4
    assert prod_mode.counts()["S3"] == 16
    # residue-tuple subproblems are unaffected by the anchor mode
    for key in ("S1", "S2", "FIX"):
        assert sum_mode.counts()[key] == prod_mode.counts()[key]


def test_algorithm1_plan_on_generated_instance():
    inst = generate((1, 1, 0)).instance
    sch = plan_algorithm1(inst, EngineOptions())
    assert sch.counts() == {"S1": 1, "S2": 1, "S3": 1, "FIX": 0}
    assert sch.stop_layer == 0
    assert any("pruned" in note for note in sch.notes)


def test_plan_selects_algorithm_by_group():
    full = make_instance(4, group=_full_cycle_group(4))
    assert plan(full).algorithm == 1
    partial = make_instance(5, group=analyze_group(["(1,2,3)"], 5))
    assert plan(partial).algorithm == 2
    double = make_instance(10, group=_two_cycles_group(5))
    assert plan(double).algorithm == 3
    plain = make_instance(3)
    assert plan(plain).algorithm == 0


def test_algorithm1_requires_full_cycle():
    inst = make_instance(5, group=analyze_group(["(1,2,3)"], 5))
    with pytest.raises(InputError):
        plan_algorithm1(inst, EngineOptions())


def test_algorithm3_requires_two_cycles():
    group = _full_cycle_group(4)
    inst = make_instance(4, group=group)
    with pytest.raises(InputError):
        plan_algorithm3(inst, group.selected_cycles, EngineOptions())


# ---------------------------------------------------------------------------
# dispatch semantics


def test_run_algorithm1_infeasible_generated_instance():
    inst = generate((1, 1, 0)).instance
    rep = run_algorithm1(inst)
    assert rep.status == "Infeasible"
    assert rep.counts == {"S1": 1, "S2": 1, "S3": 1, "FIX": 0}
    # the stop layer gets one direct fixed-space evaluation, kept in the
    # results but outside the subproblem counts
    fix = [r for r in rep.results if r.tag == "FIX"]
    assert len(fix) == 1 and fix[0].outcome.status == "Infeasible"
    assert all(r.outcome.status == "Infeasible" for r in rep.results)


def test_run_algorithm1_max_stops_at_first_feasible_layer():
    group = _full_cycle_group(3)
    inst = make_instance(
        3,
        sense="max",
        objective=[1, 1, 1],
        rows=(make_row([1, 1, 1], LE, 4),),
        bounds=_box(3, 0, 3),
        group=group,
    )
    rep = run_algorithm1(inst)
    assert rep.status == "Feasible"
    assert rep.f_star == 4
    assert sum(rep.point) == 4
    # descent stopped before dispatching the layer-4 cut subproblem
    assert len(rep.results) < len(rep.schedule)


def test_run_algorithm1_feasibility_early_stop_via_singular_point():
    group = _full_cycle_group(3)
    inst = make_instance(
        3,
        rows=(make_row([1, 1, 1], "==", 3),),
        bounds=_box(3, 0, 2),
        group=group,
    )
    rep = run_algorithm1(inst)
    assert rep.status == "Feasible"
    # (1,1,1) satisfies the global singularity subproblem outright
    assert rep.results[0].id == "S2"
    assert rep.results[0].outcome.status == "Feasible"
    assert rep.point == (1, 1, 1)


def test_run_algorithm2_finds_layer_point():
    group = analyze_group(["(1,2,3)"], 3)
    inst = make_instance(
        3,
        rows=(make_row([1, 1, 1], "==", 4),),
        bounds=_box(3, 0, 2),
        group=group,
    )
    rep = run_algorithm2(inst, group.selected_cycles[0])
    assert rep.status == "Feasible"
    assert sum(rep.point) == 4


def test_run_plain_enumerates_without_symmetry():
    inst = make_instance(2, rows=(make_row([1, 1], "==", 3),), bounds=_box(2, 0, 2))
    rep = run_plain(inst)
    assert rep.algorithm == 0
    assert rep.status == "Feasible"


def test_run_auto_selects_and_reports_algorithm():
    inst = generate((1, 1, 0)).instance
    rep = run_auto(inst)
    assert rep.algorithm == 1
    assert rep.status == "Infeasible"
    plain = make_instance(1, bounds=_box(1, 0, 1))
    assert run_auto(plain).algorithm == 0


def test_dry_run_dispatches_nothing():
    inst = generate((1, 1, 0)).instance
    rep = run_algorithm1(inst, EngineOptions(dry_run=True))
    assert rep.counts == {"S1": 1, "S2": 1, "S3": 1, "FIX": 0}
    assert all(r.outcome.status == "Unknown" for r in rep.results)
    assert not [r for r in rep.results if r.tag == "FIX"]
    assert rep.status == "Unknown"


def test_unbounded_lp_short_circuits():
    group = _full_cycle_group(3)
    inst = make_instance(3, sense="max", objective=[1, 1, 1], group=group)
    rep = run_algorithm1(inst)
    assert rep.status == "Unbounded"
    assert rep.results == ()


# ---------------------------------------------------------------------------
# reporting


def test_report_dict_shape():
    inst = generate((1, 1, 0)).instance
    rep = run_algorithm1(inst)
    doc = report_to_dict(rep)
    assert doc["format"] == 1
    assert doc["algorithm"] == 1
    assert doc["status"] == "Infeasible"
    assert doc["counts"] == {"S1": 1, "S2": 1, "S3": 1, "FIX": 0}
    assert doc["objective"] is None
    assert {"id", "tag", "status", "seconds"} <= set(doc["results"][0])
    assert doc["lp"]["status"] == "Feasible"
    assert isinstance(doc["wall_time"], float)


def test_report_dict_fractions_as_strings():
    group = _full_cycle_group(3)
    inst = make_instance(
        3,
        sense="max",
        objective=[Fraction(1, 3)] * 3,
        rows=(make_row([1, 1, 1], LE, 4),),
        bounds=_box(3, 0, 3),
        group=group,
    )
    doc = report_to_dict(run_algorithm1(inst))
    assert doc["objective"] == "4/3"
    assert all(isinstance(v, str) for v in doc["point"])
