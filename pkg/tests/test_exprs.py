"""Expression trees, evaluation, linear extraction, kernel parity."""

import random
from array import array
from fractions import Fraction

import pytest

from corecuts import (
    EQ,
    LE_ZERO,
    NON_NEG,
    STRICT_NEG,
    Add,
    Const,
    Div,
    Dot,
    EvalDivisionByZero,
    Mul,
    Square,
    Var,
    check_value,
    eval_exact,
    eval_float,
    linear_form,
    variables_of,
)
from corecuts import evalcore, evalcore_py


def test_eval_float_basics():
    e = Add((Const(1), Mul((Var("x"), Var("y"))), Square(Var("x"))))
    assert eval_float(e, {"x": 2.0, "y": 3.0}) == 1 + 6 + 4


def test_eval_float_dot_and_div():
    e = Div(Dot((1, 2, 3), ("a", "b", "c")), Const(2))
    assert eval_float(e, {"a": 1.0, "b": 1.0, "c": 1.0}) == 3.0


def test_eval_float_division_by_zero_raises():
    e = Div(Const(1), Var("x"))
    with pytest.raises(EvalDivisionByZero):
        eval_float(e, {"x": 0.0})


def test_eval_exact_uses_fractions():
    e = Div(Const(Fraction(1)), Const(3))
    assert eval_exact(e, {}) == Fraction(1, 3)


def test_eval_exact_matches_float_on_integers():
    rng = random.Random(5)
    names = ("x1", "x2", "x3")
    e = Add(
        (
            Dot((Fraction(1, 2), Fraction(-2), Fraction(3)), names),
            Square(Var("x2")),
            Mul((Const(2), Var("x3"), Var("x1"))),
        )
    )
    for _ in range(50):
        vals = [rng.randint(-5, 5) for _ in range(3)]
        env_f = dict(zip(names, map(float, vals)))
        env_e = dict(zip(names, map(Fraction, vals)))
        assert eval_float(e, env_f) == pytest.approx(float(eval_exact(e, env_e)))


def test_variables_of():
    e = Add((Dot((1, 1), ("a", "b")), Div(Var("c"), Const(2)), Square(Var("a"))))
    assert variables_of(e) == {"a", "b", "c"}


# ---------------------------------------------------------------------------
# linear extraction


def test_linear_form_affine():
    e = Add((Dot((2, -1), ("x", "y")), Const(5)))
    coeffs, const = linear_form(e)
    assert coeffs == {"x": Fraction(2), "y": Fraction(-1)}
    assert const == 5


def test_linear_form_scalar_times_linear():
    e = Mul((Const(3), Add((Var("x"), Const(1)))))
    coeffs, const = linear_form(e)
    assert coeffs == {"x": Fraction(3)}
    assert const == 3


def test_linear_form_rejects_products_of_variables():
    assert linear_form(Mul((Var("x"), Var("y")))) is None
    assert linear_form(Square(Var("x"))) is None
    assert linear_form(Div(Var("x"), Var("y"))) is None


def test_linear_form_division_by_constant():
    e = Div(Var("x"), Const(4))
    out = linear_form(e)
    assert out is not None
    coeffs, const = out
    assert coeffs == {"x": Fraction(1, 4)} and const == 0


# ---------------------------------------------------------------------------
# constraint senses


def test_check_value_senses():
    eps = 1e-6
    assert check_value(-1e-6, STRICT_NEG, eps)
    assert not check_value(-1e-7, STRICT_NEG, eps)
    assert check_value(1e-6, NON_NEG, eps)
    assert not check_value(1e-7, NON_NEG, eps)
    assert check_value(0.0, EQ, eps) and check_value(1e-10, EQ, eps)
    assert not check_value(1e-8, EQ, eps)
    assert check_value(0.0, LE_ZERO, eps) and check_value(-5.0, LE_ZERO, eps)
    assert not check_value(1e-8, LE_ZERO, eps)


# ---------------------------------------------------------------------------
# kernel parity: compiled extension vs pure-Python bytecode interpreter


def _random_expr(rng, names, depth=0):
    pick = rng.random()
    if depth > 3 or pick < 0.25:
        if rng.random() < 0.5:
            return Const(rng.randint(-4, 4))
        return Var(rng.choice(names))
    if pick < 0.45:
        return Add(tuple(_random_expr(rng, names, depth + 1) for _ in range(rng.randint(2, 3))))
    if pick < 0.6:
        return Mul(tuple(_random_expr(rng, names, depth + 1) for _ in range(2)))
    if pick < 0.75:
        return Square(_random_expr(rng, names, depth + 1))
    if pick < 0.9:
        k = rng.randint(2, len(names))
        return Dot(tuple(rng.randint(-3, 3) for _ in range(k)), tuple(names[:k]))
    # keep denominators away from zero: 1 + square
    return Div(
        _random_expr(rng, names, depth + 1),
        Add((Const(1), Square(_random_expr(rng, names, depth + 1)))),
    )


def test_backend_reports_name():
    assert evalcore.backend_name() in ("compiled", "python")


def test_compiled_and_pure_kernels_agree():
    """Both interpreters must produce identical doubles on random programs."""
    rng = random.Random(99)
    names = ("x1", "x2", "x3", "x4")
    index = {n: i for i, n in enumerate(names)}
    for _ in range(60):
        expr = _random_expr(rng, names)
        prog = evalcore.compile_expr(expr, index)
        scratch = array("d", prog.stack)
        for _ in range(20):
            vals = [rng.uniform(-3, 3) for _ in names]
            got = prog.run(vals)
            want = evalcore_py.run_program(prog.code, prog.consts, vals, scratch)
            assert got == tuple(want) or got == want


def test_program_matches_tree_evaluator():
    rng = random.Random(7)
    names = ("x1", "x2", "x3")
    index = {n: i for i, n in enumerate(names)}
    for _ in range(40):
        expr = _random_expr(rng, names)
        prog = evalcore.compile_expr(expr, index)
        vals = [rng.uniform(-2, 2) for _ in names]
        env = dict(zip(names, vals))
        ok, got = prog.run(vals)
        assert ok
        assert got == pytest.approx(eval_float(expr, env), rel=1e-12, abs=1e-12)
