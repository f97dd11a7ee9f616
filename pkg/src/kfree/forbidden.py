"""Forbidden structures: validated t-regular complete partite subgraphs,
families of them, groups with forbidden degree sequences, and the
structural checks (edge-disjointness, RD grouping, laminarity) that decide
which solver applies.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field, replace

from .errors import InputError, PreconditionError
from .graphcore import Multigraph, complete_partite_classes
from .jumpsystem import PointSet, is_constant_parity, is_jump_system

MODES = ("subgraphs", "rd", "generalized")

# RD groups may span at most SIZE_CAP_FACTOR * t vertices unless overridden.
SIZE_CAP_FACTOR = 4


def default_size_cap(t: int) -> int:
    return SIZE_CAP_FACTOR * t


@dataclass(frozen=True)
class ForbiddenSubgraph:
    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    t: int


@dataclass(frozen=True)
class GeneralizedGroup:
    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    forbidden: PointSet


@dataclass(frozen=True)
class ForbiddenFamily:
    t: int
    mode: str = "subgraphs"
    members: tuple = ()
    groups: tuple[tuple[int, ...], ...] | None = None
    size_cap: int | None = None

    def __post_init__(self):
        if self.t < 1:
            raise InputError(f"t must be a positive integer, got {self.t}")
        if self.mode not in MODES:
            raise InputError(f"unknown family mode {self.mode!r}")
        if self.mode == "rd" and self.groups is None:
            raise InputError("rd mode needs a grouping of the members")

    @property
    def cap(self) -> int:
        return self.size_cap if self.size_cap is not None else default_size_cap(self.t)


def validate_subgraph(
    G: Multigraph, vertices: Iterable[int], edges: Iterable[int], t: int
) -> ForbiddenSubgraph:
    """Check that ``(vertices, edges)`` is a t-regular complete partite
    subgraph of ``G`` and cache its color classes."""
    vs = sorted(set(vertices))
    es = sorted(G.check_edges(edges))
    vset = set(vs)
    deg = {v: 0 for v in vs}
    pairs = []
    seen_pairs: dict[frozenset, int] = {}
    for e in es:
        u, v = G.edges[e]
        if u not in vset or v not in vset:
            raise InputError(
                f"edge {G.edge_labels[e]} leaves the subgraph's vertex set",
                reason="not-spanning",
            )
        key = frozenset((u, v))
        if key in seen_pairs:
            raise InputError(
                f"edges {G.edge_labels[seen_pairs[key]]} and {G.edge_labels[e]} "
                "are parallel",
                reason="parallel-edges",
            )
        seen_pairs[key] = e
        pairs.append((u, v))
        deg[u] += 1
        deg[v] += 1
    for v in vs:
        if deg[v] != t:
            raise InputError(
                f"vertex {G.vertex_labels[v]} has degree {deg[v]} in the subgraph, "
                f"expected {t}",
                reason="not-regular",
            )
    classes = complete_partite_classes(vs, pairs)
    if classes is None:
        raise InputError(
            f"subgraph on {[G.vertex_labels[v] for v in vs]} is not complete partite",
            reason="not-complete-partite",
        )
    return ForbiddenSubgraph(tuple(vs), tuple(es), tuple(map(tuple, classes)), t)


def validate_group(
    G: Multigraph,
    vertices: Iterable[int],
    edges: Iterable[int],
    forbidden_degrees: Iterable[Sequence[int]],
    t: int,
) -> GeneralizedGroup:
    vs = tuple(sorted(set(vertices)))
    es = tuple(sorted(G.check_edges(edges)))
    vset = set(vs)
    deg = {v: 0 for v in vs}
    for e in es:
        u, v = G.edges[e]
        if u not in vset or v not in vset:
            raise InputError(
                f"edge {G.edge_labels[e]} leaves the group's vertex set",
                reason="not-spanning",
            )
        deg[u] += 1
        deg[v] += 1
    bad = PointSet(vs, forbidden_degrees)
    for p in bad:
        for v, c in zip(vs, p):
            if c < 0 or c > min(t, deg[v]):
                raise InputError(
                    f"forbidden degree {c} at {G.vertex_labels[v]} exceeds "
                    f"min(t, degree in H) = {min(t, deg[v])}",
                    reason="bad-degree-sequence",
                )
    return GeneralizedGroup(vs, es, bad)


def check_edge_disjoint(members: Sequence) -> tuple[bool, tuple[int, int] | None]:
    """Pairwise edge-disjointness; on failure returns the first index pair."""
    owner: dict[int, int] = {}
    for i, K in enumerate(members):
        for e in K.edges:
            if e in owner:
                return False, (owner[e], i)
            owner[e] = i
    return True, None


def _check_partition(n_members: int, groups: Sequence[Sequence[int]]) -> None:
    flat = [i for g in groups for i in g]
    if sorted(flat) != list(range(n_members)):
        raise InputError(
            "groups must cover every member exactly once", reason="bad-groups"
        )


def check_rd(members: Sequence, groups: Sequence[Sequence[int]], size_cap: int) -> bool:
    """True iff every group spans at most ``size_cap`` vertices and members
    of different groups are edge-disjoint."""
    _check_partition(len(members), groups)
    owner: dict[int, int] = {}
    for gi, g in enumerate(groups):
        span = set()
        for i in g:
            span.update(members[i].vertices)
            for e in members[i].edges:
                if owner.setdefault(e, gi) != gi:
                    return False
        if len(span) > size_cap:
            return False
    return True


def rd_partition_from_laminar(members: Sequence[ForbiddenSubgraph]) -> tuple[tuple[int, ...], ...]:
    """Group members under the inclusionwise maximal vertex sets.

    Requires every pair to be edge-disjoint or to have nested vertex sets.
    """
    vsets = [frozenset(K.vertices) for K in members]
    esets = [frozenset(K.edges) for K in members]
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            if esets[i] & esets[j] and not (vsets[i] <= vsets[j] or vsets[j] <= vsets[i]):
                raise PreconditionError(
                    f"members {i} and {j} share an edge but their vertex sets "
                    "are not nested",
                    reason="not-laminar",
                )
    distinct = set(vsets)
    maximal = sorted(
        (X for X in distinct if not any(X < Y for Y in distinct)), key=sorted
    )
    groups = []
    assigned: dict[int, int] = {}
    for gi, X in enumerate(maximal):
        g = []
        for i, V in enumerate(vsets):
            if V <= X:
                if i in assigned:
                    raise PreconditionError(
                        f"member {i} lies under two maximal sets", reason="not-laminar"
                    )
                assigned[i] = gi
                g.append(i)
        groups.append(tuple(g))
    return tuple(groups)


def preprocess_drop_inactive(family: ForbiddenFamily, b: Sequence[int]) -> ForbiddenFamily:
    """Remove members that no b-matching can contain (some vertex has
    ``b(v) < t``).  Generalized families are returned unchanged."""
    if family.mode == "generalized":
        return family
    t = family.t
    keep = [
        i for i, K in enumerate(family.members) if all(b[v] >= t for v in K.vertices)
    ]
    if len(keep) == len(family.members):
        return family
    members = tuple(family.members[i] for i in keep)
    groups = None
    if family.groups is not None:
        new_index = {old: new for new, old in enumerate(keep)}
        groups = tuple(
            g2
            for g2 in (tuple(new_index[i] for i in g if i in new_index) for g in family.groups)
            if g2
        )
    return replace(family, members=members, groups=groups)


def iter_bmatchings(
    G: Multigraph, vertices: Sequence[int], edges: Sequence[int], b: Sequence[int]
) -> Iterator[tuple[int, tuple[int, ...]]]:
    """All b-matchings ``F`` inside ``edges`` as ``(mask, degree vector)``.

    ``mask`` has bit ``i`` set when ``edges[i]`` is in ``F``; the degree
    vector is indexed like ``vertices``.  Depth-first, excluding before
    including, so the empty set comes first.
    """
    pos = {v: i for i, v in enumerate(vertices)}
    ends = [(pos[G.edges[e][0]], pos[G.edges[e][1]]) for e in edges]
    cap = [b[v] for v in vertices]
    deg = [0] * len(vertices)
    m = len(edges)

    def rec(i: int, mask: int):
        if i == m:
            yield mask, tuple(deg)
            return
        yield from rec(i + 1, mask)
        a, c = ends[i]
        if deg[a] < cap[a] and deg[c] < cap[c]:
            deg[a] += 1
            deg[c] += 1
            yield from rec(i + 1, mask | (1 << i))
            deg[a] -= 1
            deg[c] -= 1

    yield from rec(0, 0)


@dataclass
class LocalTable:
    """Allowed local degree profiles of one unit, each with a witness."""

    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    witness: dict[tuple[int, ...], frozenset[int]] = field(default_factory=dict)

    def point_set(self) -> PointSet:
        return PointSet(self.vertices, self.witness)


def local_table(
    G: Multigraph,
    vertices: Sequence[int],
    edges: Sequence[int],
    b: Sequence[int],
    forbidden_edge_sets: Sequence[Iterable[int]] = (),
    forbidden_degrees: PointSet | None = None,
) -> LocalTable:
    """Degree profiles of b-matchings in ``edges`` that contain no forbidden
    edge set and whose profile is not a forbidden degree sequence."""
    edges = tuple(edges)
    index = {e: i for i, e in enumerate(edges)}
    kmasks = []
    for es in forbidden_edge_sets:
        mask = 0
        for e in es:
            mask |= 1 << index[e]
        kmasks.append(mask)
    best: dict[tuple[int, ...], tuple[int, ...]] = {}
    for mask, deg in iter_bmatchings(G, vertices, edges, b):
        if any(mask & k == k for k in kmasks):
            continue
        if forbidden_degrees is not None and deg in forbidden_degrees:
            continue
        chosen = tuple(sorted(e for i, e in enumerate(edges) if mask >> i & 1))
        # smallest sorted edge-id list wins, matching the id tie-break elsewhere
        if deg not in best or chosen < best[deg]:
            best[deg] = chosen
    table = LocalTable(tuple(vertices), edges)
    for deg in sorted(best):
        table.witness[deg] = frozenset(best[deg])
    return table


def compute_general_DH(
    G: Multigraph, group: GeneralizedGroup, b: Sequence[int], size_cap: int | None = None
) -> PointSet:
    """Allowed degree profiles of b-matchings in H minus the forbidden ones.

    Raises if the result is empty or not a constant-parity jump system, in
    which case this group cannot be handled by the reduction.
    """
    if size_cap is not None and len(group.vertices) > size_cap:
        raise PreconditionError(
            f"group spans {len(group.vertices)} vertices, cap is {size_cap}",
            reason="size-cap",
        )
    D = local_table(
        G, group.vertices, group.edges, b, forbidden_degrees=group.forbidden
    ).point_set()
    if not D:
        raise PreconditionError(
            "no allowed local degree profile remains", reason="empty-local"
        )
    if not (is_constant_parity(D) and is_jump_system(D)):
        raise PreconditionError(
            "allowed local degree profiles are not a constant-parity jump system",
            reason="not-cp-jump",
        )
    return D
