"""Orbit polytopes and core points.

A point z is a *core point* for a group G when its orbit polytope
conv(G·z) is lattice-free: the only integer points inside are the orbit
itself (which, being permutations of one vector, are all vertices).
Universal core points are the ones isomorphic to a {0,1}-vector; atoms
sit at squared distance 2 from a universal point in the same layer.

Membership in the orbit polytope of a cycle is decided through
barycentric coordinates lambda = Cir(c)^{-1} z (exact rational solve):
on matching nonzero layers the coordinates automatically sum to 1, so
checking lambda >= 0 is enough.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import simplex
from .errors import InputError, LayerMismatch, NonActiveMismatch
from .perms import Cycle, GroupSpec, layer_of, orbit, DEFAULT_ORBIT_CAP
from .spectral import solve_circulant_exact


# ---------------------------------------------------------------------------
# rotation classes and canonical forms

def all_rotations(v: Sequence) -> list[tuple]:
    n = len(v)
    return [tuple(v[(j - s) % n] for j in range(n)) for s in range(n)]


def rotation_class_key(v: Sequence) -> tuple:
    """Lexicographically minimal rotation — the dedup key for cyclic classes."""
    return min(all_rotations(v))


def bracelet_class_key(v: Sequence) -> tuple:
    """Dedup key for classes closed under rotation and reflection."""
    return min(rotation_class_key(v), rotation_class_key(tuple(reversed(v))))


def _trailing_zeros(v: tuple) -> int:
    n = len(v)
    count = 0
    for j in range(n - 1, -1, -1):
        if v[j] == 0:
            count += 1
        else:
            break
    return count


def display_form(candidates: Sequence[tuple]) -> tuple:
    """Canonical printable member of a class: longest trailing-zero run,
    ties broken by lexicographic minimum."""
    best_tz = max(_trailing_zeros(v) for v in candidates)
    return min(v for v in candidates if _trailing_zeros(v) == best_tz)


# ---------------------------------------------------------------------------
# membership via barycentric coordinates

@dataclass(frozen=True)
class BaryCoords:
    lam: tuple[Fraction, ...]


@dataclass(frozen=True)
class Outside:
    violating_index: int
    lam: tuple[Fraction, ...]


def membership(
    z: Sequence[int], c: Sequence[int], cycle: Optional[Cycle] = None
) -> BaryCoords | Outside:
    """Barycentric coordinates of z in the orbit polytope of c on a cycle.

    ``cycle`` defaults to the full cycle over all coordinates.  For a
    partial cycle, the non-active coordinates of z must equal those of
    c; the active blocks must share the same nonzero layer.  Returns
    BaryCoords when all coordinates are >= 0, else Outside with the
    first violating index.
    """
    n = len(c)
    if len(z) != n:
        raise InputError("dimension mismatch between z and c")
    if cycle is None:
        cycle = Cycle(tuple(range(1, n + 1)))
    active = list(cycle.support)
    active_set = set(active)
    for i in range(1, n + 1):
        if i not in active_set and z[i - 1] != c[i - 1]:
            raise NonActiveMismatch(
                f"coordinate {i} is non-active but z_{i}={z[i-1]} != c_{i}={c[i-1]}"
            )
    z_act = [int(z[i - 1]) for i in active]
    c_act = [int(c[i - 1]) for i in active]
    if sum(z_act) != sum(c_act) or sum(c_act) == 0:
        raise LayerMismatch(
            f"active layers must match and be nonzero: {sum(z_act)} vs {sum(c_act)}"
        )
    lam = tuple(solve_circulant_exact(c_act, z_act))
    for idx, value in enumerate(lam):
        if value < 0:
            return Outside(violating_index=idx, lam=lam)
    return BaryCoords(lam=lam)


# ---------------------------------------------------------------------------
# lattice-free certification by enumeration

@dataclass(frozen=True)
class CoreCertificate:
    point: tuple[int, ...]
    verdict: str  # "Core" | "NotCore"
    witness: Optional[tuple[int, ...]] = None


def _in_hull_exact(point: Sequence[int], vertices: list[tuple]) -> bool:
    """Exact rational feasibility of point = convex combination of vertices."""
    k = len(vertices)
    n = len(point)
    rows = []
    for j in range(n):
        rows.append(simplex.make_row([v[j] for v in vertices], simplex.EQ, point[j]))
    rows.append(simplex.make_row([1] * k, simplex.EQ, 1))
    bounds = [(Fraction(0), None)] * k
    return simplex.lp_feasible(k, rows, bounds)


def is_lattice_free(
    gs: GroupSpec, z: Sequence[int], box_margin: int = 0, cap: int = DEFAULT_ORBIT_CAP
) -> CoreCertificate:
    """Brute-force core certificate: enumerate integer points of the
    orbit's bounding box and test hull membership exactly."""
    verts = orbit(gs, tuple(int(x) for x in z), cap=cap)
    vert_set = set(verts)
    n = gs.n
    lo = [min(v[j] for v in verts) - box_margin for j in range(n)]
    hi = [max(v[j] for v in verts) + box_margin for j in range(n)]
    for candidate in itertools.product(*(range(lo[j], hi[j] + 1) for j in range(n))):
        if candidate in vert_set:
            continue
        if _in_hull_exact(candidate, verts):
            return CoreCertificate(point=tuple(z), verdict="NotCore", witness=candidate)
    return CoreCertificate(point=tuple(z), verdict="Core")


# ---------------------------------------------------------------------------
# universal core points, atoms, essential sets

def universal_core_points(k_len: int, residue: int, budget: int) -> list[tuple[int, ...]]:
    """Binary layer representatives: {0,1}-vectors of length k_len whose
    popcount is congruent to the residue (mod k_len), deduplicated up to
    rotation, in canonical display form, largest-first."""
    if not 1 <= residue <= k_len:
        raise InputError(f"need 1 <= residue <= k_len, got {residue}")
    popcount = residue % k_len  # residue == k_len means the all-ones vector
    classes: dict[tuple, list[tuple]] = {}
    if popcount == 0:
        classes[(1,) * k_len] = [(1,) * k_len]
    else:
        for ones in itertools.combinations(range(k_len), popcount):
            v = tuple(1 if j in ones else 0 for j in range(k_len))
            classes.setdefault(rotation_class_key(v), []).append(v)
    reps = sorted((display_form(members) for members in classes.values()), reverse=True)
    return reps[:budget]


def atoms_near(u: Sequence[int], budget: int) -> list[tuple[int, ...]]:
    """Points u + e_i - e_j (i != j), deduplicated up to rotation,
    generated in (i, j) lexicographic order, up to budget."""
    k = len(u)
    out: list[tuple[int, ...]] = []
    seen: set[tuple] = set()
    for i in range(k):
        for j in range(k):
            if i == j or len(out) >= budget:
                continue
            w = list(u)
            w[i] += 1
            w[j] -= 1
            wt = tuple(w)
            key = rotation_class_key(wt)
            if key in seen:
                continue
            seen.add(key)
            out.append(wt)
    return out[:budget]


UNIVERSAL = "Universal"
ATOM = "Atom"


@dataclass(frozen=True)
class EssentialSet:
    residue: int
    points: tuple[tuple[int, ...], ...]
    kinds: tuple[str, ...]


def projected_essential_set(k_len: int, residue: int, budget: int = 4) -> EssentialSet:
    """Representative integer points of one sub-layer, projected through
    the fixed space into entries {-2..2}.

    Universal classes come first (deduplicated up to rotation *and*
    reflection, canonical display form, largest-first), then atoms of
    the first universal point in (i, j) order; binary atoms are skipped
    because they fall back into a universal class.  At most ``budget``
    points total.
    """
    if budget < 1:
        raise InputError("budget must be >= 1")
    popcount = residue % k_len
    merged: dict[tuple, list[tuple]] = {}
    if popcount == 0:
        merged[(1,) * k_len] = [(1,) * k_len]
    else:
        for ones in itertools.combinations(range(k_len), popcount):
            v = tuple(1 if j in ones else 0 for j in range(k_len))
            merged.setdefault(bracelet_class_key(v), []).append(v)
    universals = sorted(
        (
            display_form([rot for member in members for rot in all_rotations(member)])
            for members in merged.values()
        ),
        reverse=True,
    )[:budget]

    points = list(universals)
    kinds = [UNIVERSAL] * len(points)
    if points and len(points) < budget:
        u = points[0]
        seen_atoms: set[tuple] = set()
        for i in range(k_len):
            for j in range(k_len):
                if i == j or len(points) >= budget:
                    continue
                w = list(u)
                w[i] += 1
                w[j] -= 1
                wt = tuple(w)
                if all(x in (0, 1) for x in wt):
                    continue  # a rotation of some universal class
                key = rotation_class_key(wt)
                if key in seen_atoms:
                    continue
                seen_atoms.add(key)
                points.append(wt)
                kinds.append(ATOM)
    if any(not -2 <= x <= 2 for p in points for x in p):
        raise InputError("essential points escaped the {-2..2} projected range")
    return EssentialSet(residue=residue, points=tuple(points), kinds=tuple(kinds))


# ---------------------------------------------------------------------------
# barycenter and equivalence predicates

def barycenter(gs: GroupSpec, x: Sequence, cap: int = DEFAULT_ORBIT_CAP) -> tuple[Fraction, ...]:
    """Average of the orbit of x; always lies in the fixed space."""
    points = orbit(gs, tuple(x), cap=cap)
    k = len(points)
    return tuple(Fraction(sum(p[j] for p in points), k) for j in range(gs.n))


def in_fixed_lattice(v: Sequence[int], gs: GroupSpec) -> bool:
    """Whether v lies in the integer fixed lattice of the selected cycles
    (constant integer value on every cycle support, any integers elsewhere)."""
    if any(int(x) != x for x in v):
        return False
    for cyc in gs.selected_cycles:
        values = {v[i - 1] for i in cyc.support}
        if len(values) > 1:
            return False
    return True


def equivalent(x: Sequence[int], y: Sequence[int], gs: GroupSpec, cap: int = DEFAULT_ORBIT_CAP) -> bool:
    """True when x is in the orbit of y."""
    return tuple(x) in set(orbit(gs, tuple(y), cap=cap))


def isomorphic(x: Sequence[int], y: Sequence[int], gs: GroupSpec, cap: int = DEFAULT_ORBIT_CAP) -> bool:
    """True when x differs from some orbit member of y by a fixed-lattice vector."""
    if gs.group_class is None:
        from .perms import classify, select_cycles

        classify(gs)
        select_cycles(gs)
    xt = tuple(x)
    for w in orbit(gs, tuple(y), cap=cap):
        diff = tuple(a - b for a, b in zip(xt, w))
        if in_fixed_lattice(diff, gs):
            return True
    return False


def co_projective(x: Sequence[int], y: Sequence[int]) -> bool:
    """True when x - y is an integer multiple of the all-ones vector."""
    if len(x) != len(y):
        return False
    diffs = {a - b for a, b in zip(x, y)}
    return len(diffs) == 1 and all(int(d) == d for d in diffs)


def verify_layer(z: Sequence[int], residue: int, k_len: int) -> bool:
    """Layer congruence check used by the essential-set invariants."""
    return layer_of(z) % k_len == residue % k_len
