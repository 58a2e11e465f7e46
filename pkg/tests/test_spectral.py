"""Circulant spectra, the inverse-coefficient formulas, exact solvers.

Expected rationals in this file were pinned with tests/oracles.py
(plain Gaussian elimination over Fractions, no package imports).
"""

import math
import random
from fractions import Fraction

import pytest

from corecuts import (
    SingularCirculant,
    circulant,
    det_circulant,
    eigenvalues,
    fourier_pair,
    partial_circulant,
    rotate,
    solve_circulant_exact,
    t_hat_exact,
    t_values,
)

# first column of Cir(c)^{-1}, pinned by oracles.t_hat_oracle
T_HAT_PINNED = {
    (1, 0, 0): (Fraction(1), Fraction(0), Fraction(0)),
    (2, 1, 0): (Fraction(4, 9), Fraction(-2, 9), Fraction(1, 9)),
    (1, 2, 0, 3): (
        Fraction(11, 48),
        Fraction(17, 48),
        Fraction(-13, 48),
        Fraction(-7, 48),
    ),
    (3, 1, 0, 0, 1): (
        Fraction(11, 25),
        Fraction(-4, 25),
        Fraction(1, 25),
        Fraction(1, 25),
        Fraction(-4, 25),
    ),
    (2, 2, 2, 2, 1): (
        Fraction(2, 9),
        Fraction(-7, 9),
        Fraction(2, 9),
        Fraction(2, 9),
        Fraction(2, 9),
    ),
}

# det Cir(c), pinned by oracles.det_fractions
DET_PINNED = {
    (2, 1, 0): 9,
    (1, 2, 0, 3): -48,
    (3, 1, 0, 0, 1): 125,
    (2, 2, 2, 2, 1): 9,
}


def test_rotate():
    assert rotate((1, 2, 3)) == (3, 1, 2)
    assert rotate((1, 2, 3), 2) == (2, 3, 1)
    assert rotate((1, 2, 3), 0) == (1, 2, 3)


def test_circulant_entry_convention():
    c = (5, 7, 9)
    rows = circulant(c).rows()
    for i in range(3):
        for j in range(3):
            assert rows[i][j] == c[(i - j) % 3]


def test_circulant_columns_are_rotations():
    rows = circulant((1, 2, 3, 4)).rows()
    col0 = tuple(rows[i][0] for i in range(4))
    col1 = tuple(rows[i][1] for i in range(4))
    assert col1 == rotate(col0)


def test_partial_circulant_shape():
    rows = partial_circulant((1, 2, 0, 0, 7), 3).rows()
    # top 3x3 block circulant on the active entries, rows below constant
    for i in range(3):
        for j in range(3):
            assert rows[i][j] == (1, 2, 0)[(i - j) % 3]
    assert rows[3] == (0, 0, 0) and rows[4] == (7, 7, 7)


def test_fourier_pair_values():
    n = 8
    for m in range(1, n // 2 + 1):
        V, U = fourier_pair(n, m)
        for j in range(n):
            assert V[j] == pytest.approx(math.cos(2 * math.pi * j * m / n))
            assert U[j] == pytest.approx(math.sin(2 * math.pi * j * m / n))


def test_eigenvalues_match_direct_dft():
    c = (3, 1, 4, 1, 5)
    spec = eigenvalues(c)
    n = len(c)
    for m in range(n // 2 + 1):
        re = sum(c[j] * math.cos(2 * math.pi * j * m / n) for j in range(n))
        im = sum(c[j] * math.sin(2 * math.pi * j * m / n) for j in range(n))
        assert spec.psi_re[m] == pytest.approx(re, abs=1e-9)
        assert spec.psi_im[m] == pytest.approx(im, abs=1e-9)
        assert spec.proj_len_sq[m] == pytest.approx(re * re + im * im, abs=1e-9)


@pytest.mark.parametrize("c", sorted(T_HAT_PINNED))
def test_t_hat_exact_pinned(c):
    assert tuple(t_hat_exact(c)) == T_HAT_PINNED[c]


@pytest.mark.parametrize("c", sorted(T_HAT_PINNED))
def test_t_hat_float_matches_exact(c):
    tv = t_values(c)
    for f, e in zip(tv.t_hat, T_HAT_PINNED[c]):
        assert f == pytest.approx(float(e), abs=1e-12)


def test_t_hat_is_inverse_first_column():
    """Cir(c) . t_hat == e_1 exactly, for a handful of random vectors."""
    rng = random.Random(11)
    for n in range(3, 9):
        for _ in range(20):
            c = tuple(rng.randint(-4, 4) for _ in range(n))
            try:
                that = t_hat_exact(c)
            except SingularCirculant:
                continue
            prod = [
                sum(Fraction(c[(i - j) % n]) * that[j] for j in range(n))
                for i in range(n)
            ]
            assert prod[0] == 1
            assert all(v == 0 for v in prod[1:])


def test_t_values_t_sums_to_zero():
    rng = random.Random(12)
    for n in range(3, 11):
        for _ in range(20):
            c = tuple(rng.randint(-3, 3) for _ in range(n))
            try:
                tv = t_values(c)
            except SingularCirculant:
                continue
            assert abs(sum(tv.t)) <= 1e-9


def test_t_bar_reverses_t_hat():
    tv = t_values((2, 1, 0))
    n = 3
    for j in range(n):
        assert tv.t_bar[j] == tv.t_hat[(-j) % n]


@pytest.mark.parametrize("c", sorted(DET_PINNED))
def test_det_circulant_pinned(c):
    assert det_circulant(c) == pytest.approx(DET_PINNED[c], rel=1e-9)


def test_det_circulant_zero_cases():
    # <1, c> = 0
    assert det_circulant((1, -1, 0, 0)) == pytest.approx(0.0, abs=1e-9)
    # alternating-mode factor vanishes for n even
    assert det_circulant((1, 1, 0, 0)) == pytest.approx(0.0, abs=1e-9)


def test_singular_circulant_raises():
    with pytest.raises(SingularCirculant):
        t_values((1, -1, 0))
    with pytest.raises(SingularCirculant):
        t_hat_exact((1, 1, 0, 0))


def test_solve_circulant_exact():
    lam = solve_circulant_exact((2, 1, 0), (1, 1, 1))
    assert lam == [Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)]


def test_solve_circulant_exact_recovers_t_hat():
    c = (3, 1, 0, 0, 1)
    assert solve_circulant_exact(c, (1, 0, 0, 0, 0)) == t_hat_exact(c)
