"""Explicit finite jump systems.

A :class:`PointSet` is a finite set of integer vectors over a labeled
ground set.  The operations here are the ones the reductions need: the
two-step exchange axiom check, parity check, intersection with a box,
Minkowski sum, splitting into 0/1 bundles, and linear maximization through
a membership oracle.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import InputError

Vector = tuple[int, ...]


class PointSet:
    """Immutable set of integer vectors indexed by ``ground``.

    Points are kept sorted and deduplicated so that iteration order, and
    everything derived from it, is deterministic.
    """

    __slots__ = ("_members", "ground", "points")

    def __init__(self, ground: Sequence, points: Iterable[Sequence[int]]):
        self.ground = tuple(ground)
        if len(set(self.ground)) != len(self.ground):
            raise InputError("ground labels must be distinct")
        pts = {tuple(int(c) for c in p) for p in points}
        n = len(self.ground)
        for p in pts:
            if len(p) != n:
                raise InputError(f"point {p} has dimension {len(p)}, expected {n}")
        self.points: tuple[Vector, ...] = tuple(sorted(pts))
        self._members = frozenset(self.points)

    def __contains__(self, x: object) -> bool:
        return tuple(x) in self._members  # type: ignore[arg-type]

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __bool__(self) -> bool:
        return bool(self.points)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.ground == other.ground and self.points == other.points

    def __hash__(self) -> int:
        return hash((self.ground, self.points))

    def __repr__(self) -> str:
        return f"PointSet(ground={list(self.ground)}, size={len(self.points)})"

    @property
    def dim(self) -> int:
        return len(self.ground)

    def embed(self, ground: Sequence) -> PointSet:
        """Zero-extend onto a larger ground set containing this one."""
        ground = tuple(ground)
        pos = {g: i for i, g in enumerate(ground)}
        missing = [g for g in self.ground if g not in pos]
        if missing:
            raise InputError(f"labels {missing} not in target ground")
        idx = [pos[g] for g in self.ground]
        out = []
        for p in self.points:
            q = [0] * len(ground)
            for i, c in zip(idx, p):
                q[i] = c
            out.append(q)
        return PointSet(ground, out)


@dataclass(frozen=True)
class Box:
    lower: Vector
    upper: Vector

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise InputError("box bounds have different dimensions")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise InputError("box lower bound exceeds upper bound")

    def __contains__(self, x: object) -> bool:
        x = tuple(x)  # type: ignore[arg-type]
        return all(lo <= c <= hi for lo, c, hi in zip(self.lower, x, self.upper))


def _require_nonempty(J: PointSet) -> None:
    if not J:
        raise InputError("a jump system is nonempty by definition")


# the grid method costs about 2^dim lookups per point and step
_GRID_MAX_DIM = 10
_GRID_MAX_CELLS = 1 << 25


def is_jump_system(J: PointSet) -> bool:
    """Check the two-step exchange axiom by full enumeration.

    For each ``x`` and each unit step ``s`` leaving ``J``, the points ``y``
    that would violate the axiom form a box (``s`` points toward ``y`` and
    no second step that lands back in ``J`` points toward ``y``), so every
    ``(x, s)`` is one box-emptiness query.  Low-dimensional sets answer the
    queries from a prefix-count grid, the rest by scanning the points.
    """
    _require_nonempty(J)
    n = J.dim
    if n == 0 or len(J) == 1:
        return True
    pts = np.array(J.points, dtype=np.int64)
    dims = pts.max(axis=0) - pts.min(axis=0) + 1
    if n <= _GRID_MAX_DIM and int(np.prod(dims + 4)) <= _GRID_MAX_CELLS and len(J) > 32:
        return _is_jump_system_grid(pts)
    return _is_jump_system_scan(J)


def _is_jump_system_scan(J: PointSet) -> bool:
    n = J.dim
    members = J._members
    Y = np.array(J.points, dtype=np.int64)
    big = np.iinfo(np.int64).max
    for x in J.points:
        for u in range(n):
            for sign in (1, -1):
                z = list(x)
                z[u] += sign
                if tuple(z) in members:
                    continue
                lo = np.full(n, -big, dtype=np.int64)
                hi = np.full(n, big, dtype=np.int64)
                if sign > 0:
                    lo[u] = x[u] + 1
                else:
                    hi[u] = x[u] - 1
                for w in range(n):
                    zw = z[w]
                    z[w] = zw + 1
                    if tuple(z) in members:
                        hi[w] = min(hi[w], zw)
                    z[w] = zw - 1
                    if tuple(z) in members:
                        lo[w] = max(lo[w], zw)
                    z[w] = zw
                if np.any(lo > hi):
                    continue
                if np.any(np.all((Y >= lo) & (Y <= hi), axis=1)):
                    return False
    return True


def _is_jump_system_grid(pts: np.ndarray) -> bool:
    """Same check, vectorized over all ``x`` for each step direction."""
    _, n = pts.shape
    X = pts - pts.min(axis=0)
    dims = X.max(axis=0) + 1
    # occupancy with a margin of two so neighbours of neighbours stay in range
    occ = np.zeros(tuple(dims + 4), dtype=bool)
    occ[tuple((X + 2).T)] = True
    # P[i] counts points with every coordinate below i
    P = np.zeros(tuple(dims + 1), dtype=np.int64)
    P[(slice(1, None),) * n] = occ[(slice(2, -2),) * n]
    for ax in range(n):
        P = np.cumsum(P, axis=ax)
    corners = [
        (np.array(eps, dtype=bool), -1 if sum(eps) % 2 else 1)
        for eps in itertools.product((0, 1), repeat=n)
    ]
    top = np.broadcast_to(dims - 1, X.shape)

    def inside(Z):
        return occ[tuple((Z + 2).T)]

    for u in range(n):
        for sign in (1, -1):
            Z = X.copy()
            Z[:, u] += sign
            lo = np.zeros_like(X)
            hi = top.copy()
            if sign > 0:
                lo[:, u] = X[:, u] + 1
            else:
                hi[:, u] = X[:, u] - 1
            for w in range(n):
                Z[:, w] += 1
                hit = inside(Z)
                Z[:, w] -= 2
                hit_low = inside(Z)
                Z[:, w] += 1
                hi[:, w] = np.where(hit, np.minimum(hi[:, w], Z[:, w]), hi[:, w])
                lo[:, w] = np.where(hit_low, np.maximum(lo[:, w], Z[:, w]), lo[:, w])
            active = ~inside(Z) & np.all(lo <= hi, axis=1)
            if not active.any():
                continue
            lo, hi = lo[active], hi[active] + 1
            count = np.zeros(len(lo), dtype=np.int64)
            for eps, sgn in corners:
                idx = np.where(eps, lo, hi)
                count += sgn * P[tuple(idx.T)]
            if count.any():
                return False
    return True


def is_constant_parity(J: PointSet) -> bool:
    _require_nonempty(J)
    return len({sum(p) % 2 for p in J.points}) == 1


def box_intersect(J: PointSet, B: Box) -> PointSet:
    if len(B.lower) != J.dim:
        raise InputError("box and point set have different dimensions")
    return PointSet(J.ground, (p for p in J.points if p in B))


def minkowski_sum(J1: PointSet, J2: PointSet) -> PointSet:
    if J1.ground != J2.ground:
        raise InputError("Minkowski sum needs identical grounds; embed first")
    return PointSet(
        J1.ground,
        (tuple(a + b for a, b in zip(p, q)) for p in J1.points for q in J2.points),
    )


def _bundle_patterns(size: int, count: int) -> list[Vector]:
    pats = []
    for chosen in itertools.combinations(range(size), count):
        bits = [0] * size
        for i in chosen:
            bits[i] = 1
        pats.append(tuple(bits))
    return pats


def split_binary(J: PointSet, bundles: Mapping) -> PointSet:
    """Split each coordinate ``v`` over the 0/1 coordinates ``bundles[v]``.

    Equivalent to splitting and then intersecting with the unit box, but
    the unrestricted splitting is never built.
    """
    seen: set = set()
    ground: list = []
    sizes = []
    for v in J.ground:
        if v not in bundles:
            raise InputError(f"no bundle given for coordinate {v!r}")
        U = list(bundles[v])
        if not U:
            raise InputError(f"bundle for {v!r} is empty")
        for label in U:
            if label in seen:
                raise InputError(f"bundles overlap at {label!r}")
            seen.add(label)
        ground.extend(U)
        sizes.append(len(U))

    cache: dict[tuple[int, int], list[Vector]] = {}
    out = []
    for x in J.points:
        if any(c < 0 or c > k for c, k in zip(x, sizes)):
            continue
        parts = []
        for c, k in zip(x, sizes):
            if (k, c) not in cache:
                cache[(k, c)] = _bundle_patterns(k, c)
            parts.append(cache[(k, c)])
        for combo in itertools.product(*parts):
            out.append(tuple(itertools.chain.from_iterable(combo)))
    return PointSet(ground, out)


def brute_force_max(J: PointSet, c: Sequence[int]) -> int:
    """Largest value of ``c . x`` over ``J`` by scanning every point."""
    _require_nonempty(J)
    return max(sum(ci * xi for ci, xi in zip(c, p)) for p in J.points)


_SIGNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def maximize_linear(
    oracle: Callable[[Vector], bool],
    c: Sequence[int],
    start: Sequence[int],
    box: Box,
) -> Vector:
    """Maximize ``c . x`` over the oracle's accepted set inside ``box``.

    Repeated two-step ascent: scan ordered coordinate pairs ``(u, w)``
    (``u == w`` allowed) and sign pairs in lexicographic order, move to the
    first candidate ``x + s_u e_u + s_w e_w`` inside the box that strictly
    improves the objective and is accepted, and stop when none exists.
    On a constant-parity jump system a two-step local optimum is global.

    The oracle is called at most once per distinct vector.
    """
    x = tuple(int(v) for v in start)
    n = len(x)
    if len(c) != n or len(box.lower) != n:
        raise InputError("objective, start and box dimensions differ")
    if x not in box:
        raise InputError("start point lies outside the box")
    known: dict[Vector, bool] = {}

    def ask(y: Vector) -> bool:
        if y not in known:
            known[y] = bool(oracle(y))
        return known[y]

    if not ask(x):
        raise InputError("oracle rejects the start point")

    lower, upper = box.lower, box.upper
    improved = True
    while improved:
        improved = False
        for u in range(n):
            for w in range(n):
                for su, sw in _SIGNS:
                    gain = su * c[u] + sw * c[w]
                    if gain <= 0:
                        continue
                    y = list(x)
                    y[u] += su
                    y[w] += sw
                    if y[u] < lower[u] or y[u] > upper[u]:
                        continue
                    if y[w] < lower[w] or y[w] > upper[w]:
                        continue
                    y = tuple(y)
                    if ask(y):
                        x = y
                        improved = True
                        break
                if improved:
                    break
            if improved:
                break
    return x
