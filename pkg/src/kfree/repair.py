"""K-free b-factors in graphs of maximum degree at most 2t-1.

A disjoint family of maximal forbidden vertex sets is chosen greedily; the
subgraphs living inside those sets form a subfamily that satisfies the RD
grouping condition, so the reduction finds a factor avoiding them.  Any
other forbidden subgraph still contained in that factor is then removed
by local 2-swaps, each of which shrinks the set of contained forbidden
subgraphs.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, replace

from .errors import InvariantError, PreconditionError
from .forbidden import ForbiddenFamily, ForbiddenSubgraph, preprocess_drop_inactive
from .graphcore import Multigraph, degree_sequence
from .reduction import FactorSolver, check_b, maximize_with_factor_oracle


@dataclass(frozen=True)
class RdDecomposition:
    chosen: tuple[frozenset[int], ...]
    groups: tuple[tuple[int, ...], ...]

    @property
    def star_members(self) -> tuple[int, ...]:
        return tuple(sorted(i for g in self.groups for i in g))


def build_rd_decomposition(members: Sequence[ForbiddenSubgraph]) -> RdDecomposition:
    """Greedy disjoint choice of maximal vertex sets.

    While some vertex set of a member is disjoint from all chosen sets, add
    one that is inclusionwise maximal among those; ties go to the
    lexicographically smallest sorted vertex list.
    """
    family_sets = sorted({frozenset(K.vertices) for K in members}, key=sorted)
    chosen: list[frozenset[int]] = []
    covered: set[int] = set()
    while True:
        eligible = [X for X in family_sets if not (X & covered)]
        if not eligible:
            break
        maximal = [X for X in eligible if not any(X < Y for Y in eligible)]
        pick = min(maximal, key=sorted)
        chosen.append(pick)
        covered |= pick

    for X in family_sets:
        if X in chosen:
            continue
        if not any(X & Xi and not Xi <= X for Xi in chosen):
            raise InvariantError(f"vertex set {sorted(X)} breaks the decomposition property")
    groups = tuple(
        tuple(i for i, K in enumerate(members) if set(K.vertices) <= Xi) for Xi in chosen
    )
    return RdDecomposition(tuple(chosen), groups)


def relaxed_family(family: ForbiddenFamily) -> tuple[RdDecomposition, ForbiddenFamily]:
    """The decomposition of ``family`` and the RD-grouped subfamily of
    members inside the chosen sets."""
    members = family.members
    dec = build_rd_decomposition(members)
    star = dec.star_members
    renum = {old: new for new, old in enumerate(star)}
    star_family = ForbiddenFamily(
        family.t,
        "rd",
        tuple(members[i] for i in star),
        tuple(tuple(renum[i] for i in g) for g in dec.groups),
        size_cap=max([len(X) for X in dec.chosen] + [family.cap]),
    )
    return dec, star_family


def _edge_between(K: ForbiddenSubgraph, G: Multigraph, a: int, c: int) -> int | None:
    for e in K.edges:
        if set(G.edges[e]) == {a, c}:
            return e
    return None


def repair_step(
    G: Multigraph,
    members: Sequence[ForbiddenSubgraph],
    M: frozenset[int],
    k: int,
    decomposition: RdDecomposition,
) -> frozenset[int]:
    """Swap two edges of ``M`` so that member ``k`` is no longer contained.

    Picks the first chosen set ``X_i`` meeting ``V(K)`` but not inside it,
    a member ``K*`` spanning ``X_i``, a shared vertex ``u`` with a shared
    edge ``e = uu'``, a vertex ``v`` of ``K*`` outside ``K`` with an edge
    ``e* = vv'`` of ``K*`` in ``M``, and replaces ``{e, e*}`` by either
    ``{uv, u'v'}`` (preferred) or ``{uv', u'v}``, whichever lies in ``K*``.
    """
    K = members[k]
    VK = set(K.vertices)
    target = None
    for i, Xi in enumerate(decomposition.chosen):
        if Xi & VK and not Xi <= VK:
            target = i
            break
    if target is None:
        raise PreconditionError(f"no chosen set overlaps member {k} properly", reason="repair")
    Xi = decomposition.chosen[target]
    star = next(
        (j for j in decomposition.groups[target] if frozenset(members[j].vertices) == Xi), None
    )
    if star is None:
        raise InvariantError(f"no member spans chosen set {sorted(Xi)}")
    Ks = members[star]
    Ks_edges = set(Ks.edges)

    e = u = None
    for cand in sorted(VK & Xi):
        shared = sorted(x for x in K.edges if x in Ks_edges and cand in G.edges[x])
        if shared:
            u, e = cand, shared[0]
            break
    if e is None:
        raise PreconditionError(
            "no edge shared at a common vertex; is the maximum degree above 2t-1?",
            reason="degree-bound",
        )
    u2 = G.other(e, u)

    v = min(Xi - VK)
    estar = min(
        (x for x in Ks.edges if v in G.edges[x] and x in M),
        default=None,
    )
    if estar is None:
        raise PreconditionError(
            f"vertex {G.vertex_labels[v]} has no edge of K* in M; is b = t on V(K*)?",
            reason="repair",
        )
    v2 = G.other(estar, v)
    if v2 in VK:
        raise InvariantError("far endpoint of e* lies inside K")

    f, f2 = _edge_between(Ks, G, u, v), _edge_between(Ks, G, u2, v2)
    if f is None or f2 is None:
        f, f2 = _edge_between(Ks, G, u, v2), _edge_between(Ks, G, u2, v)
    if f is None or f2 is None:
        raise InvariantError("K* lacks both candidate replacement pairs")
    if f in M or f2 in M:
        raise InvariantError("replacement edge already in M")
    if e not in Ks_edges or e not in K.edges:
        raise InvariantError("swapped-out edge is not shared by K and K*")
    return frozenset((M - {e, estar}) | {f, f2})


def _check_degree_bound(G: Multigraph, t: int) -> None:
    for v in range(G.n):
        if G.degree(v) > 2 * t - 1:
            raise PreconditionError(
                f"vertex {G.vertex_labels[v]} has degree {G.degree(v)} > 2t-1 = {2 * t - 1}",
                reason="degree-bound",
            )


class BoundedDegreeSolver:
    """Factor solver for the bounded-degree case with caches kept across
    calls on the same graph and family (used by the maximization loop)."""

    def __init__(self, G: Multigraph, family: ForbiddenFamily, solver=None):
        t = family.t
        if family.mode == "generalized":
            raise PreconditionError(
                "bounded-degree solver needs t-regular complete partite members",
                reason="unsupported-mode",
            )
        _check_degree_bound(G, t)
        members = family.members
        if t == 1:
            unique = {}
            for K in members:
                unique.setdefault(K.edges, K)
            members = tuple(unique.values())
        self.G = G
        self.family = ForbiddenFamily(t, "subgraphs", tuple(members))
        self.solver = solver
        self._factor_solvers: dict = {}
        self.repair_steps: list[int] = []

    def _factor_solver(self, fam: ForbiddenFamily) -> FactorSolver:
        key = (fam.mode, tuple(K.edges for K in fam.members), fam.groups)
        if key not in self._factor_solvers:
            self._factor_solvers[key] = FactorSolver(self.G, fam, self.solver)
        return self._factor_solvers[key]

    def solve(self, b: Sequence[int]) -> frozenset[int] | None:
        G, t = self.G, self.family.t
        b = check_b(G, b, t)
        if t == 1:
            return self._factor_solver(self.family).solve(b)
        fam = preprocess_drop_inactive(self.family, b)
        members = fam.members
        dec, star_family = relaxed_family(fam)
        M = self._factor_solver(star_family).solve(b)
        if M is None:
            self.repair_steps.append(0)
            return None

        holders: dict[int, list[int]] = {}
        for i, K in enumerate(members):
            for e in K.edges:
                holders.setdefault(e, []).append(i)
        contained = {i for i, K in enumerate(members) if all(e in M for e in K.edges)}
        steps = 0
        while contained:
            k = min(contained)
            M2 = repair_step(G, members, M, k, dec)
            if degree_sequence(G, M2) != b:
                raise InvariantError("repair step broke the b-factor")
            touched = {i for e in M ^ M2 for i in holders.get(e, ())}
            after = (contained - touched) | {
                i for i in touched if all(e in M2 for e in members[i].edges)
            }
            if not after < contained:
                raise InvariantError("repair step did not shrink the contained family")
            M, contained = M2, after
            steps += 1
        if steps > len(members):
            raise InvariantError("more repair steps than forbidden subgraphs")
        self.repair_steps.append(steps)
        return M


def solve_bounded_degree(
    G: Multigraph,
    b: Sequence[int],
    family: ForbiddenFamily,
    t: int | None = None,
    solver=None,
    stats: dict | None = None,
) -> frozenset[int] | None:
    """A K-free b-factor when the maximum degree is at most 2t-1, or None."""
    if t is not None and t != family.t:
        family = replace(family, t=t)
    bds = BoundedDegreeSolver(G, family, solver)
    M = bds.solve(b)
    if stats is not None:
        stats["repair_steps"] = bds.repair_steps[-1] if bds.repair_steps else 0
    return M


def solve_bounded_degree_max(
    G: Multigraph,
    b: Sequence[int],
    family: ForbiddenFamily,
    t: int | None = None,
    solver=None,
    stats: dict | None = None,
) -> frozenset[int]:
    if t is not None and t != family.t:
        family = replace(family, t=t)
    bds = BoundedDegreeSolver(G, family, solver)
    b = check_b(G, b, family.t)
    M = maximize_with_factor_oracle(G, b, bds.solve, stats)
    if stats is not None:
        stats["repair_steps"] = sum(bds.repair_steps)
    return M
