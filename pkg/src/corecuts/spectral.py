"""Circulant matrices, their Fourier eigenstructure, and inverse coefficients.

A circulant matrix Cir(c) has entry (i, j) = c[(i - j) mod n]; each
column is the previous one rotated one element down.  Its eigenvectors
are the Fourier modes, with the m-th eigenvalue
psi_m = <V_m, c> + i <U_m, c> where V_m[j] = cos(2*pi*j*m/n) and
U_m[j] = sin(2*pi*j*m/n).

Two independent computation paths are provided on purpose:

* a float path (``t_values``) that expands the inverse coefficients
  T_k(c) from the Fourier data — this is the form the constraint
  synthesizer needs, since there c is symbolic;
* an exact rational path (``t_hat_exact``) that solves
  Cir(c) x = e_1 in integer (fraction-free) arithmetic — this anchors
  tests and the instance generator.

The coefficient vectors are related by
t_hat[k] = (1/n) * (1/<c,1> + t[k]) and t_bar = first row of
Cir(t_hat) = (t_hat[0], t_hat[n-1], ..., t_hat[1]);
sum(t) = 0 whenever Cir(c) is invertible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import InputError, SingularCirculant

#: scale-aware relative tolerance deciding when a spectral factor counts as zero
SINGULARITY_RTOL = 1e-9


def rotate(v: Sequence, s: int = 1) -> tuple:
    """Apply the rotation (v_0,...,v_{n-1}) -> (v_{n-1},v_0,...) s times."""
    n = len(v)
    s %= n
    return tuple(v[(j - s) % n] for j in range(n))


@dataclass(frozen=True)
class CirculantMatrix:
    """Square circulant matrix, stored by its first column."""

    c: tuple

    @property
    def n(self) -> int:
        return len(self.c)

    def rows(self) -> list[tuple]:
        n = self.n
        return [tuple(self.c[(i - j) % n] for j in range(n)) for i in range(n)]

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.rows())


@dataclass(frozen=True)
class PartialCirculantMatrix:
    """n x k matrix: circulant on the first k rows, constant rows below.

    Row i < k equals row i of Cir(c[:k]); row i >= k is the constant
    value c[i] repeated across all k columns.
    """

    c: tuple
    k: int

    def __post_init__(self) -> None:
        if not 1 <= self.k <= len(self.c):
            raise InputError(f"need 1 <= k <= n, got k={self.k}, n={len(self.c)}")

    @property
    def n(self) -> int:
        return len(self.c)

    def rows(self) -> list[tuple]:
        k = self.k
        top = [tuple(self.c[(i - j) % k] for j in range(k)) for i in range(k)]
        bottom = [tuple([self.c[i]] * k) for i in range(k, self.n)]
        return top + bottom

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.rows())


def circulant(c: Sequence) -> CirculantMatrix:
    return CirculantMatrix(tuple(c))


def partial_circulant(c: Sequence, k: int) -> PartialCirculantMatrix:
    return PartialCirculantMatrix(tuple(c), k)


@lru_cache(maxsize=None)
def _fourier_table(n: int) -> tuple:
    """All (V_m, U_m) pairs for a given n, cached."""
    table = []
    for m in range(n):
        V = tuple(math.cos(2.0 * math.pi * ((j * m) % n) / n) for j in range(n))
        U = tuple(math.sin(2.0 * math.pi * ((j * m) % n) / n) for j in range(n))
        table.append((V, U))
    return tuple(table)


def fourier_pair(n: int, m: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Cosine/sine mode vectors: V_m[j] = cos(2*pi*j*m/n), U_m[j] = sin(...)."""
    if not 0 <= m < n:
        raise InputError(f"need 0 <= m < n, got m={m}, n={n}")
    return _fourier_table(n)[m]


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue data of Cir(c): psi_m = psi_re[m] + i*psi_im[m]."""

    n: int
    psi_re: tuple[float, ...]
    psi_im: tuple[float, ...]
    #: squared length of the projection of c onto the m-th mode plane
    proj_len_sq: tuple[float, ...]


def eigenvalues(c: Sequence) -> Spectrum:
    n = len(c)
    table = _fourier_table(n)
    re, im, proj = [], [], []
    for m in range(n):
        V, U = table[m]
        a = sum(float(c[j]) * V[j] for j in range(n))
        b = sum(float(c[j]) * U[j] for j in range(n))
        re.append(a)
        im.append(b)
        proj.append(a * a + b * b)
    return Spectrum(n=n, psi_re=tuple(re), psi_im=tuple(im), proj_len_sq=tuple(proj))


def _norm_sq(c: Sequence) -> float:
    return sum(float(x) * float(x) for x in c)


def _zero_factor(value_sq: float, scale_sq: float) -> bool:
    return value_sq <= SINGULARITY_RTOL * (1.0 + scale_sq)


@dataclass(frozen=True)
class TValues:
    """Inverse-circulant coefficients of a vector c."""

    t: tuple[float, ...]
    t_hat: tuple[float, ...]
    t_bar: tuple[float, ...]
    layer_sum: float


def t_values(c: Sequence) -> TValues:
    """Compute T_k(c), t_hat and t_bar through the Fourier path.

    T_k is a sum of 2*<rotated V_m, c> / proj_len_sq[m] over the mode
    pairs (plus a (-1)^k / <V_{n/2}, c> term when n is even); then
    t_hat[k] = (1/n)(1/<c,1> + T_k).  Raises SingularCirculant when any
    spectral factor vanishes within the scale-aware tolerance.
    """
    n = len(c)
    spec = eigenvalues(c)
    scale = _norm_sq(c)
    if _zero_factor(spec.psi_re[0] ** 2, scale):
        raise SingularCirculant(f"<c,1> ~ 0 for c={tuple(c)}")
    half = (n - 1) // 2 if n % 2 else (n - 2) // 2
    for m in range(1, half + 1):
        if _zero_factor(spec.proj_len_sq[m], scale):
            raise SingularCirculant(f"mode {m} projection ~ 0 for c={tuple(c)}")
    if n % 2 == 0 and _zero_factor(spec.psi_re[n // 2] ** 2, scale):
        raise SingularCirculant(f"mode {n//2} factor ~ 0 for c={tuple(c)}")

    table = _fourier_table(n)
    cf = [float(x) for x in c]
    t = []
    for k in range(n):
        acc = 0.0
        for m in range(1, half + 1):
            V = table[m][0]
            # <sigma^{-k}(V_m), c>: rotating the mode back k steps
            # shifts its argument forward by k.
            dot = sum(V[(j + k) % n] * cf[j] for j in range(n))
            acc += 2.0 * dot / spec.proj_len_sq[m]
        if n % 2 == 0:
            acc += (-1.0) ** k / spec.psi_re[n // 2]
        t.append(acc)
    inv_layer = 1.0 / spec.psi_re[0]
    t_hat = tuple((inv_layer + tk) / n for tk in t)
    t_bar = tuple(t_hat[(-j) % n] for j in range(n))
    return TValues(t=tuple(t), t_hat=t_hat, t_bar=t_bar, layer_sum=spec.psi_re[0])


def det_circulant(c: Sequence) -> float:
    """det(Cir(c)) via the spectral product formula."""
    n = len(c)
    spec = eigenvalues(c)
    det = spec.psi_re[0]
    if n % 2:
        for m in range(1, (n - 1) // 2 + 1):
            det *= spec.proj_len_sq[m]
    else:
        det *= spec.psi_re[n // 2]
        for m in range(1, (n - 2) // 2 + 1):
            det *= spec.proj_len_sq[m]
    return det


def _solve_integer_system(rows: list[list[int]], rhs: list[int]) -> list[Fraction]:
    """Solve A x = b exactly for integer A, b via fraction-free elimination."""
    n = len(rows)
    M = [list(rows[i]) + [rhs[i]] for i in range(n)]
    prev = 1
    for k in range(n):
        if M[k][k] == 0:
            for r in range(k + 1, n):
                if M[r][k] != 0:
                    M[k], M[r] = M[r], M[k]
                    break
            else:
                raise SingularCirculant("matrix is singular over the rationals")
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(M[i][n])
        for j in range(i + 1, n):
            acc -= M[i][j] * x[j]
        x[i] = acc / M[i][i]
    return x


def solve_circulant_exact(c: Sequence[int], z: Sequence[int]) -> list[Fraction]:
    """Exact rational solution of Cir(c) x = z for integer c and z."""
    if any(int(x) != x for x in c) or any(int(x) != x for x in z):
        raise InputError("exact path requires integer vectors")
    n = len(c)
    if len(z) != n:
        raise InputError("dimension mismatch")
    rows = [[int(c[(i - j) % n]) for j in range(n)] for i in range(n)]
    return _solve_integer_system(rows, [int(x) for x in z])


def t_hat_exact(c: Sequence[int]) -> list[Fraction]:
    """Exact first column of Cir(c)^{-1} (solves Cir(c) x = e_1)."""
    e1 = [1] + [0] * (len(c) - 1)
    return solve_circulant_exact(c, e1)
