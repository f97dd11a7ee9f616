"""Boolean edge-CSP: choose ``M`` so that at every vertex the set of chosen
incident edges is one of that vertex's allowed rows.

The solver here is an exact branch-and-propagate search.  It stands in for
the polynomial algorithm known for relations that are constant-parity jump
systems; that algorithm is not implemented.  The search is exponential in
the worst case and meant for desk-scale instances.  Any callable with the
signature of :func:`search_solve` can be passed as ``solver=`` to
:func:`solve`.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graphcore import Multigraph, connected_components
from .jumpsystem import PointSet, is_constant_parity, is_jump_system

MAX_SCOPE = 64


@dataclass(frozen=True)
class VertexRelation:
    """Allowed subsets of the edges incident to one vertex.

    ``classes`` partitions the scope positions; a subset is allowed iff its
    vector of per-class counts lies in ``counts``.  Plain 0/1 relations use
    singleton classes.  Grouping lets a relation that only cares how many
    edges of a parallel bundle are chosen be stored without listing every
    0/1 row.
    """

    vertex: int
    scope: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    counts: frozenset[tuple[int, ...]]

    @classmethod
    def from_rows(cls, vertex: int, scope: Sequence[int], rows: Iterable[int]) -> VertexRelation:
        """Relation given by explicit bitmasks (bit ``i`` is ``scope[i]``)."""
        k = len(scope)
        counts = frozenset(tuple(r >> i & 1 for i in range(k)) for r in rows)
        return cls(vertex, tuple(scope), tuple((i,) for i in range(k)), counts)

    def count_vector(self, mask: int) -> tuple[int, ...]:
        return tuple(sum(mask >> i & 1 for i in cls) for cls in self.classes)

    def allows(self, mask: int) -> bool:
        return self.count_vector(mask) in self.counts

    def n_rows(self) -> int:
        sizes = [len(c) for c in self.classes]
        return sum(
            math.prod(math.comb(s, x) for s, x in zip(sizes, vec)) for vec in self.counts
        )

    @property
    def rows(self) -> frozenset[int]:
        """All allowed bitmasks; only sensible for small relations."""
        masks = set()
        for vec in self.counts:
            parts = [itertools.combinations(cls, x) for cls, x in zip(self.classes, vec)]
            for pick in itertools.product(*parts):
                mask = 0
                for chosen in pick:
                    for i in chosen:
                        mask |= 1 << i
                masks.add(mask)
        return frozenset(masks)


@dataclass(frozen=True)
class CspInstance:
    graph: Multigraph
    relations: tuple[VertexRelation, ...]

    def __post_init__(self):
        G = self.graph
        if len(self.relations) != G.n:
            raise InputError("need exactly one relation per vertex")
        for v, rel in enumerate(self.relations):
            if rel.vertex != v:
                raise InputError(f"relation {v} is attached to vertex {rel.vertex}")
            if sorted(rel.scope) != sorted(G.incidence[v]):
                raise InputError(f"scope at vertex {v} differs from its incident edges")
            if len(rel.scope) > MAX_SCOPE:
                raise InputError(f"vertex {v} has more than {MAX_SCOPE} incident edges")
            if sorted(i for c in rel.classes for i in c) != list(range(len(rel.scope))):
                raise InputError(f"classes at vertex {v} do not partition its scope")
            sizes = [len(c) for c in rel.classes]
            for vec in rel.counts:
                if len(vec) != len(sizes) or any(
                    x < 0 or x > s for x, s in zip(vec, sizes)
                ):
                    raise InputError(f"count vector {vec} at vertex {v} does not fit its classes")


def relation_from_sets(G: Multigraph, v: int, allowed: Iterable[Iterable[int]]) -> VertexRelation:
    scope = G.incidence[v]
    pos = {e: i for i, e in enumerate(scope)}
    rows = set()
    for F in allowed:
        mask = 0
        for e in F:
            if e not in pos:
                raise InputError(f"edge {e} is not incident to vertex {v}")
            mask |= 1 << pos[e]
        rows.add(mask)
    return VertexRelation.from_rows(v, scope, rows)


def parallel_classes(G: Multigraph, v: int) -> tuple[tuple[int, ...], ...]:
    """Positions in ``G.incidence[v]`` grouped by far endpoint (sorted)."""
    by_end: dict[int, list[int]] = {}
    for i, e in enumerate(G.incidence[v]):
        by_end.setdefault(G.other(e, v), []).append(i)
    return tuple(tuple(by_end[w]) for w in sorted(by_end))


def relation_is_cp_jump(G: Multigraph, rel: VertexRelation, exhaustive: bool = False) -> bool:
    """Is the set of row characteristic vectors a constant-parity jump system?

    The 0/1 rows are the splitting of the count vectors over the classes,
    and splitting and aggregation both preserve constant-parity jump
    systems, so the (much smaller) count vectors are checked.
    ``exhaustive=True`` checks the expanded 0/1 vectors instead.
    """
    if not rel.counts:
        return False
    if not exhaustive:
        A = PointSet(range(len(rel.classes)), rel.counts)
        return is_constant_parity(A) and is_jump_system(A)
    k = len(rel.scope)
    J = PointSet(range(k), (tuple(r >> i & 1 for i in range(k)) for r in rel.rows))
    return is_constant_parity(J) and is_jump_system(J)


def validate_cp_jump(instance: CspInstance, exhaustive: bool = False) -> tuple[bool, int | None]:
    """Check every relation; returns ``(True, None)`` or ``(False, vertex)``.

    An empty relation also fails: the instance is infeasible by
    construction.
    """
    for rel in instance.relations:
        if not relation_is_cp_jump(instance.graph, rel, exhaustive):
            return False, rel.vertex
    return True, None


def verify(instance: CspInstance, M: Iterable[int]) -> bool:
    G = instance.graph
    M = G.check_edges(M)
    for rel in instance.relations:
        mask = 0
        for i, e in enumerate(rel.scope):
            if e in M:
                mask |= 1 << i
        if not rel.allows(mask):
            return False
    return True


class _Search:
    """Depth-first search over bundle counts.

    Edges are grouped into blocks: edges sharing their class at both
    endpoints.  Each relation is rewritten as an integer table over the
    blocks it sees, and the search assigns a count to every block.  An
    assignment lifts to edges by taking the lowest-numbered edges of each
    block.
    """

    def __init__(self, instance: CspInstance):
        G = instance.graph
        self.G = G
        cls_of: list[dict] = [{} for _ in range(G.n)]
        for rel in instance.relations:
            for j, c in enumerate(rel.classes):
                for i in c:
                    cls_of[rel.vertex][rel.scope[i]] = j
        block_index: dict[tuple, int] = {}
        self.block_edges: list[list[int]] = []
        self.block_ends: list[tuple[int, int]] = []
        self.edge_block = []
        for e, (u, v) in enumerate(G.edges):
            key = (u, v, cls_of[u][e], cls_of[v][e])
            if key not in block_index:
                block_index[key] = len(self.block_edges)
                self.block_edges.append([])
                self.block_ends.append((u, v))
            b = block_index[key]
            self.block_edges[b].append(e)
            self.edge_block.append(b)
        self.cols: list[list[int]] = []
        self.initial_rows: list[np.ndarray] = []
        for rel in instance.relations:
            cols, table = self._block_table(rel, cls_of[rel.vertex])
            self.cols.append(cols)
            self.initial_rows.append(table)

    def _block_table(self, rel: VertexRelation, cls_of: dict) -> tuple[list[int], np.ndarray]:
        """Rewrite ``rel`` over its blocks (a class may hold several)."""
        per_class: list[list[int]] = [[] for _ in rel.classes]
        for e in rel.scope:
            b = self.edge_block[e]
            if b not in per_class[cls_of[e]]:
                per_class[cls_of[e]].append(b)
        cols = [b for blocks in per_class for b in blocks]
        sizes = [[len(self.block_edges[b]) for b in blocks] for blocks in per_class]
        out = []
        for vec in sorted(rel.counts):
            parts = [list(_compositions(x, sz)) for x, sz in zip(vec, sizes)]
            for pick in itertools.product(*parts):
                out.append([x for part in pick for x in part])
        table = np.array(out, dtype=np.int16).reshape(len(out), len(cols))
        return cols, table

    def _propagate(self, val: list[int], rows: list[np.ndarray], queue: list[int]) -> bool:
        while queue:
            v = queue.pop()
            arr = rows[v]
            cols = self.cols[v]
            fixed = [j for j, b in enumerate(cols) if val[b] >= 0]
            if fixed:
                want = np.array([val[cols[j]] for j in fixed], dtype=np.int16)
                arr = arr[np.all(arr[:, fixed] == want, axis=1)]
            if arr.shape[0] == 0:
                return False
            rows[v] = arr
            lo = arr.min(axis=0)
            hi = arr.max(axis=0)
            for j, b in enumerate(cols):
                if val[b] < 0 and lo[j] == hi[j]:
                    val[b] = int(lo[j])
                    queue.extend(self.block_ends[b])
        return True

    def run(self, vertices: Sequence[int], blocks: Sequence[int]) -> list[int] | None:
        val = [-1] * len(self.block_edges)
        rows = list(self.initial_rows)
        if not self._propagate(val, rows, list(vertices)):
            return None
        found = self._dfs(val, rows, sorted(blocks))
        if found is None:
            return None
        return [e for b in blocks for e in sorted(self.block_edges[b])[: found[b]]]

    def _values(self, rows: list[np.ndarray], b: int) -> list[int]:
        u, v = self.block_ends[b]
        seen = None
        for w in (u, v):
            j = self.cols[w].index(b)
            here = set(np.unique(rows[w][:, j]).tolist())
            seen = here if seen is None else seen & here
        return sorted(seen, reverse=True)

    def _dfs(self, val: list[int], rows: list[np.ndarray], blocks: list[int]) -> list[int] | None:
        best = None
        for b in blocks:
            if val[b] < 0:
                u, v = self.block_ends[b]
                key = (min(rows[u].shape[0], rows[v].shape[0]), b)
                if best is None or key < best:
                    best = key
        if best is None:
            return val
        b = best[1]
        for x in self._values(rows, b):
            child_val = list(val)
            child_rows = list(rows)
            child_val[b] = x
            if self._propagate(child_val, child_rows, list(self.block_ends[b])):
                found = self._dfs(child_val, child_rows, blocks)
                if found is not None:
                    return found
        return None


def _compositions(total: int, sizes: Sequence[int]):
    """Ways to write ``total`` as a sum with part ``i`` at most ``sizes[i]``."""
    if not sizes:
        if total == 0:
            yield ()
        return
    for x in range(min(total, sizes[0]), -1, -1):
        for rest in _compositions(total - x, sizes[1:]):
            yield (x, *rest)


def _odd_by_parity(instance: CspInstance, vertices: Iterable[int]) -> bool:
    """True if every vertex has rows of a single parity and those parities
    sum to an odd number, which no edge set can realize."""
    total = 0
    for v in vertices:
        parities = {sum(vec) & 1 for vec in instance.relations[v].counts}
        if len(parities) != 1:
            return False
        total += parities.pop()
    return total % 2 == 1


def search_solve(instance: CspInstance) -> frozenset[int] | None:
    """Exact search; returns a satisfying edge set or None if none exists."""
    G = instance.graph
    search = _Search(instance)
    chosen: list[int] = []
    for verts, _ in connected_components(G, range(G.m)):
        if any(not instance.relations[v].counts for v in verts):
            return None
        comp_edges = {e for v in verts for e in G.incidence[v]}
        if not comp_edges:
            rel = instance.relations[next(iter(verts))]
            if () not in rel.counts:
                return None
            continue
        if _odd_by_parity(instance, verts):
            return None
        blocks = sorted({search.edge_block[e] for e in comp_edges})
        found = search.run(sorted(verts), blocks)
        if found is None:
            return None
        chosen.extend(found)
    return frozenset(chosen)


Solver = Callable[[CspInstance], "frozenset[int] | None"]


def solve(instance: CspInstance, solver: Solver | None = None) -> frozenset[int] | None:
    M = (solver or search_solve)(instance)
    if M is not None and not verify(instance, M):
        raise AssertionError("solver returned an edge set that violates a relation")
    return M


def to_json(instance: CspInstance) -> dict:
    """Debug dump.  Each relation lists its scope, the classes (as edge
    labels) and the allowed count vectors over the classes."""
    G = instance.graph
    el = G.edge_labels
    return {
        "format": "csp",
        "vertices": list(G.vertex_labels),
        "edges": [[el[e], G.vertex_labels[u], G.vertex_labels[v]]
                  for e, (u, v) in enumerate(G.edges)],
        "relations": [
            {
                "vertex": G.vertex_labels[rel.vertex],
                "scope": [el[e] for e in rel.scope],
                "classes": [[el[rel.scope[i]] for i in c] for c in rel.classes],
                "counts": [list(vec) for vec in sorted(rel.counts)],
            }
            for rel in instance.relations
        ],
    }


def from_json(data: dict) -> CspInstance:
    if data.get("format") != "csp":
        raise InputError("not a csp dump")
    G = Multigraph.from_labels(data["vertices"], [tuple(e) for e in data["edges"]])
    vindex = {label: i for i, label in enumerate(G.vertex_labels)}
    eindex = {label: i for i, label in enumerate(G.edge_labels)}
    rels = [None] * G.n
    for item in data["relations"]:
        v = vindex[item["vertex"]]
        scope = tuple(eindex[e] for e in item["scope"])
        pos = {e: i for i, e in enumerate(scope)}
        classes = tuple(tuple(pos[eindex[e]] for e in c) for c in item["classes"])
        counts = frozenset(tuple(int(x) for x in vec) for vec in item["counts"])
        rels[v] = VertexRelation(v, scope, classes, counts)
    if any(r is None for r in rels):
        raise InputError("a vertex has no relation")
    return CspInstance(G, tuple(rels))
