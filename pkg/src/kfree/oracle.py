"""Brute-force reference answers.

Nothing here goes through the reduction, the CSP solver or the jump-system
code: every routine enumerates edge subsets of the input graph directly
(Gray-code order, degrees updated incrementally) and checks the
definitions.  Keep it that way; these functions are the ground truth the
solvers are tested against.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence

from .errors import GuardExceeded
from .forbidden import ForbiddenFamily
from .graphcore import Multigraph
from .jumpsystem import PointSet

DEFAULT_GUARD = 24


def forbidden_edge_sets(G: Multigraph, family: ForbiddenFamily) -> list[frozenset[int]]:
    """Edge sets whose full inclusion is forbidden.

    For generalized groups these are all ``F`` inside ``E(H)`` whose degree
    sequence on ``V(H)`` is listed as forbidden.
    """
    if family.mode != "generalized":
        return [frozenset(K.edges) for K in family.members]
    out = []
    for H in family.members:
        bad = set(H.forbidden.points)
        pos = {v: i for i, v in enumerate(H.vertices)}
        for r in range(len(H.edges) + 1):
            for F in itertools.combinations(H.edges, r):
                deg = [0] * len(H.vertices)
                for e in F:
                    u, v = G.edges[e]
                    deg[pos[u]] += 1
                    deg[pos[v]] += 1
                if tuple(deg) in bad:
                    out.append(frozenset(F))
    return out


def _guard(G: Multigraph, guard: int) -> None:
    if G.m > guard:
        raise GuardExceeded(f"{G.m} edges exceed the oracle guard of {guard}")


def _walk(G: Multigraph, b: Sequence[int], family: ForbiddenFamily, guard: int):
    """Yield ``(mask, degrees, over, exact, complete)`` for every edge subset.

    ``over`` counts vertices with degree above ``b``, ``exact`` those with
    degree equal to ``b``, ``complete`` the forbidden sets fully included.
    The yielded degree list is live; copy it to keep it.
    """
    _guard(G, guard)
    n, m = G.n, G.m
    bad = forbidden_edge_sets(G, family)
    holders: list[list[int]] = [[] for _ in range(m)]
    for i, F in enumerate(bad):
        for e in F:
            holders[e].append(i)
    need = [len(F) for F in bad]
    have = [0] * len(bad)
    deg = [0] * n
    over = 0
    exact = sum(1 for v in range(n) if b[v] == 0)
    complete = sum(1 for k in need if k == 0)
    mask = 0
    yield mask, deg, over, exact, complete
    for i in range(1, 1 << m):
        e = (i & -i).bit_length() - 1
        mask ^= 1 << e
        step = 1 if mask >> e & 1 else -1
        for v in G.edges[e]:
            before = deg[v]
            after = before + step
            deg[v] = after
            over += (after > b[v]) - (before > b[v])
            exact += (after == b[v]) - (before == b[v])
        for k in holders[e]:
            was = have[k] == need[k]
            have[k] += step
            complete += (have[k] == need[k]) - was
        yield mask, deg, over, exact, complete


def _edges_of(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def brute_kfree_bfactor(
    G: Multigraph, b: Sequence[int], family: ForbiddenFamily, guard: int = DEFAULT_GUARD
) -> frozenset[int] | None:
    """The K-free b-factor with the smallest bitmask encoding, or None."""
    best = None
    for mask, _, over, exact, complete in _walk(G, b, family, guard):
        if exact == G.n and complete == 0 and (best is None or mask < best):
            best = mask
    return None if best is None else _edges_of(best)


def brute_max_kfree_bmatching(
    G: Multigraph, b: Sequence[int], family: ForbiddenFamily, guard: int = DEFAULT_GUARD
) -> tuple[int, frozenset[int]]:
    best_size, best = -1, 0
    for mask, _, over, _, complete in _walk(G, b, family, guard):
        if over == 0 and complete == 0:
            size = bin(mask).count("1")
            if size > best_size or (size == best_size and mask < best):
                best_size, best = size, mask
    return best_size, _edges_of(best)


def enumerate_J(
    G: Multigraph, b: Sequence[int], family: ForbiddenFamily, guard: int = DEFAULT_GUARD
) -> PointSet:
    """Degree sequences of all K-free b-matchings."""
    seen = set()
    for _, deg, over, _, complete in _walk(G, b, family, guard):
        if over == 0 and complete == 0:
            seen.add(tuple(deg))
    return PointSet(range(G.n), seen)


def check_solution(
    G: Multigraph,
    b: Sequence[int],
    family: ForbiddenFamily,
    M: Iterable[int],
    factor: bool = True,
) -> list[str]:
    """Problems with ``M`` as a K-free b-factor (or b-matching); empty if none."""
    problems = []
    M = set(M)
    unknown = [e for e in M if not (isinstance(e, int) and 0 <= e < G.m)]
    if unknown:
        return [f"unknown edge ids {sorted(map(str, unknown))}"]
    deg = [0] * G.n
    for e in M:
        u, v = G.edges[e]
        deg[u] += 1
        deg[v] += 1
    for v in range(G.n):
        if deg[v] > b[v] or (factor and deg[v] != b[v]):
            problems.append(
                f"vertex {G.vertex_labels[v]} has degree {deg[v]}, b = {b[v]}"
            )
    if family.mode == "generalized":
        for i, H in enumerate(family.members):
            inside = [e for e in H.edges if e in M]
            for F in forbidden_edge_sets(G, ForbiddenFamily(family.t, "generalized", (H,))):
                if F <= set(inside):
                    labels = sorted(G.edge_labels[e] for e in F)
                    problems.append(f"group {i} contains forbidden edge set {labels}")
                    break
    else:
        for i, K in enumerate(family.members):
            if all(e in M for e in K.edges):
                labels = [G.vertex_labels[v] for v in K.vertices]
                problems.append(f"contains forbidden subgraph {i} on {labels}")
    return problems
