"""Multigraphs with dense integer ids and the elementary predicates used
throughout the package.

Vertices are ``0..n-1`` and edges ``0..m-1``, assigned in load order.
Edge sets are plain ``frozenset[int]`` of edge ids and degree vectors are
tuples indexed by vertex id.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from .errors import InputError

EdgeSet = frozenset
DegreeVector = tuple


class Multigraph:
    """Undirected multigraph without self-loops.

    Parallel edges are distinct ids with the same endpoint pair.  Instances
    are immutable after construction.
    """

    __slots__ = ("edge_labels", "edges", "incidence", "n", "vertex_labels")

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]],
        vertex_labels: Sequence[str] | None = None,
        edge_labels: Sequence[str] | None = None,
    ):
        if n < 0:
            raise InputError(f"vertex count must be nonnegative, got {n}")
        edge_list = []
        incidence: list[list[int]] = [[] for _ in range(n)]
        for eid, (u, v) in enumerate(edges):
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge {eid} has endpoint outside 0..{n - 1}")
            if u == v:
                raise InputError(f"edge {eid} is a self-loop at vertex {u}")
            edge_list.append((u, v))
            incidence[u].append(eid)
            incidence[v].append(eid)
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(edge_list)
        self.incidence: tuple[tuple[int, ...], ...] = tuple(map(tuple, incidence))
        if vertex_labels is None:
            vertex_labels = [f"v{i}" for i in range(n)]
        if edge_labels is None:
            edge_labels = [f"e{i}" for i in range(len(edge_list))]
        if len(vertex_labels) != n or len(edge_labels) != len(edge_list):
            raise InputError("label lists do not match vertex/edge counts")
        if len(set(vertex_labels)) != n:
            raise InputError("duplicate vertex label")
        if len(set(edge_labels)) != len(edge_list):
            raise InputError("duplicate edge label")
        self.vertex_labels = tuple(vertex_labels)
        self.edge_labels = tuple(edge_labels)

    @classmethod
    def from_labels(
        cls,
        vertices: Sequence[str],
        edges: Sequence[tuple[str, str, str]],
    ) -> Multigraph:
        """Build from labeled vertices and ``(edge_label, u_label, v_label)``."""
        index = {label: i for i, label in enumerate(vertices)}
        if len(index) != len(vertices):
            raise InputError("duplicate vertex label")
        pairs = []
        for label, u, v in edges:
            if u not in index or v not in index:
                raise InputError(f"edge {label!r} references an unknown vertex")
            pairs.append((index[u], index[v]))
        return cls(len(vertices), pairs, list(vertices), [e[0] for e in edges])

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def max_degree(self) -> int:
        return max((len(inc) for inc in self.incidence), default=0)

    def other(self, e: int, v: int) -> int:
        a, b = self.edges[e]
        return b if a == v else a

    def edges_between(self, u: int, v: int) -> list[int]:
        return [e for e in self.incidence[u] if self.other(e, u) == v]

    def check_edges(self, edge_ids: Iterable[int]) -> frozenset[int]:
        """Return ``edge_ids`` as an edge set, rejecting unknown ids."""
        out = frozenset(edge_ids)
        for e in out:
            if not (isinstance(e, int) and 0 <= e < len(self.edges)):
                raise InputError(f"unknown edge id {e!r}")
        return out

    def __repr__(self) -> str:
        return f"Multigraph(n={self.n}, m={self.m})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multigraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.edges == other.edges
            and self.vertex_labels == other.vertex_labels
            and self.edge_labels == other.edge_labels
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges))


def degree_sequence(G: Multigraph, F: Iterable[int]) -> tuple[int, ...]:
    deg = [0] * G.n
    for e in G.check_edges(F):
        u, v = G.edges[e]
        deg[u] += 1
        deg[v] += 1
    return tuple(deg)


def is_t_regular(G: Multigraph, t: int) -> bool:
    return all(len(inc) == t for inc in G.incidence)


def complete_partite_classes(
    vertices: Sequence[int], pairs: Sequence[tuple[int, int]]
) -> list[list[int]] | None:
    """Color classes of the complete partite graph on ``vertices`` with edge
    list ``pairs``, or None if the graph is not complete partite.

    Parallel pairs make the graph non-simple and are rejected.
    """
    vset = set(vertices)
    adj: dict[int, set[int]] = {v: set() for v in vset}
    for u, v in pairs:
        if u not in vset or v not in vset or u == v:
            return None
        if v in adj[u]:
            return None
        adj[u].add(v)
        adj[v].add(u)

    # classes are the components of the complement
    order = sorted(vset)
    seen: set[int] = set()
    classes = []
    for s in order:
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            x = stack.pop()
            for y in order:
                if y not in seen and y != x and y not in adj[x]:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        classes.append(sorted(comp))

    label = {}
    for i, cls in enumerate(classes):
        for v in cls:
            label[v] = i
    for v in order:
        expected = len(order) - len(classes[label[v]])
        if len(adj[v]) != expected or any(label[w] == label[v] for w in adj[v]):
            return None
    return classes


def is_complete_partite(G: Multigraph) -> tuple[bool, list[list[int]] | None]:
    classes = complete_partite_classes(range(G.n), G.edges)
    return classes is not None, classes


def connected_components(
    G: Multigraph, F: Iterable[int]
) -> list[tuple[frozenset[int], frozenset[int]]]:
    """Components of ``(V, F)``, ordered by smallest vertex id."""
    F = G.check_edges(F)
    parent = list(range(G.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in F:
        u, v = G.edges[e]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    verts: dict[int, list[int]] = {}
    for v in range(G.n):
        verts.setdefault(find(v), []).append(v)
    edges: dict[int, list[int]] = {}
    for e in F:
        edges.setdefault(find(G.edges[e][0]), []).append(e)
    return [
        (frozenset(vs), frozenset(edges.get(root, ())))
        for root, vs in sorted(verts.items())
    ]
