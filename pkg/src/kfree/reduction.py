"""Gadget reduction from K-free b-factors to Boolean edge-CSP, extraction
of a factor from a CSP solution, and the oracle-driven maximization that
turns factor tests into maximum K-free b-matchings.

Each forbidden *unit* (a single subgraph, a group of overlapping
subgraphs, or a subgraph with forbidden degree sequences) is replaced by
a new vertex ``r`` joined to every vertex of the unit by ``t`` parallel
edges.  The unit's own edges are deleted.  The relation at ``r`` allows
exactly the 0/1 realizations of the unit's allowed local degree profiles,
and every original vertex must get exactly ``b(v)`` edges.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from . import edgecsp
from .edgecsp import CspInstance, VertexRelation
from .errors import GuardExceeded, InvariantError, PreconditionError
from .forbidden import (
    ForbiddenFamily,
    ForbiddenSubgraph,
    LocalTable,
    check_edge_disjoint,
    check_rd,
    local_table,
    preprocess_drop_inactive,
)
from .graphcore import Multigraph, degree_sequence
from .jumpsystem import (
    Box,
    PointSet,
    box_intersect,
    is_constant_parity,
    is_jump_system,
    maximize_linear,
    minkowski_sum,
)


def check_b(G: Multigraph, b: Sequence[int], t: int) -> tuple[int, ...]:
    b = tuple(int(x) for x in b)
    if len(b) != G.n:
        raise PreconditionError(f"b has {len(b)} entries for {G.n} vertices", reason="bad-b")
    for v, x in enumerate(b):
        if x < 0 or x > t:
            raise PreconditionError(
                f"b({G.vertex_labels[v]}) = {x} is outside 0..t={t}", reason="b-exceeds-t"
            )
    return b


def compute_DK(G: Multigraph, K: ForbiddenSubgraph, b: Sequence[int], t: int) -> PointSet:
    """Degree profiles of b-matchings inside ``K`` other than ``K`` itself."""
    return local_table(G, K.vertices, K.edges, b, [K.edges]).point_set()


def compute_DHi(G: Multigraph, members: Sequence[ForbiddenSubgraph], b: Sequence[int]) -> PointSet:
    """Degree profiles of b-matchings in the union of ``members`` that
    contain none of them."""
    vertices = sorted({v for K in members for v in K.vertices})
    edges = sorted({e for K in members for e in K.edges})
    return local_table(G, vertices, edges, b, [K.edges for K in members]).point_set()


@dataclass(frozen=True)
class Unit:
    """One forbidden unit: its span and the keys used for caching."""

    key: tuple
    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    forbidden_edge_sets: tuple[tuple[int, ...], ...] = ()
    forbidden_degrees: PointSet | None = None


def units_of(G: Multigraph, family: ForbiddenFamily) -> list[Unit]:
    """Split a family into units, rejecting structures the reduction does
    not cover."""
    members = family.members
    if family.mode == "subgraphs":
        ok, pair = check_edge_disjoint(members)
        if not ok:
            raise PreconditionError(
                f"forbidden subgraphs {pair[0]} and {pair[1]} share an edge",
                reason="not-edge-disjoint",
            )
        return [
            Unit(("K", K.edges), K.vertices, K.edges, (K.edges,)) for K in members
        ]
    if family.mode == "rd":
        if not check_rd(members, family.groups, family.cap):
            raise PreconditionError(
                "grouping violates condition RD (group too large or groups share an edge)",
                reason="not-rd",
            )
        units = []
        for g in family.groups:
            vs = tuple(sorted({v for i in g for v in members[i].vertices}))
            es = tuple(sorted({e for i in g for e in members[i].edges}))
            ks = tuple(members[i].edges for i in g)
            units.append(Unit(("H", ks), vs, es, ks))
        return units
    ok, pair = check_edge_disjoint(members)
    if not ok:
        raise PreconditionError(
            f"groups {pair[0]} and {pair[1]} share an edge", reason="not-edge-disjoint"
        )
    for i, H in enumerate(members):
        if len(H.vertices) > family.cap:
            raise PreconditionError(
                f"group {i} spans {len(H.vertices)} vertices, cap is {family.cap}",
                reason="size-cap",
            )
    return [
        Unit(("D", H.edges, i), H.vertices, H.edges, (), H.forbidden)
        for i, H in enumerate(members)
    ]


@dataclass(frozen=True)
class GadgetMapping:
    """How the gadget graph relates to the original graph."""

    n_original: int
    t: int
    units: tuple[Unit, ...]
    tables: tuple[LocalTable, ...]
    unit_vertex: tuple[int, ...]
    bundles: dict
    retained: tuple[int, ...]
    removed: frozenset[int]
    original_edge: tuple[int, ...]


def _uniform_relation(G: Multigraph, v: int, size: int) -> VertexRelation:
    """All ``size``-subsets of the edges at ``v``, grouped by parallel class."""
    classes = edgecsp.parallel_classes(G, v)
    caps = [len(c) for c in classes]

    def rec(i: int, left: int):
        if i == len(caps):
            if left == 0:
                yield ()
            return
        for x in range(min(left, caps[i]) + 1):
            for rest in rec(i + 1, left - x):
                yield (x, *rest)

    return VertexRelation(v, G.incidence[v], classes, frozenset(rec(0, size)))


class FactorSolver:
    """Solve K-free b-factor problems for one graph and family, caching
    per-unit tables and relations across calls with different ``b``.

    Every nonempty relation the builder emits is checked to be a
    constant-parity jump system (cached per distinct relation).
    """

    def __init__(self, G: Multigraph, family: ForbiddenFamily, solver=None, check_relations=True):
        self.G = G
        self.family = family
        self.solver = solver
        self.check_relations = check_relations
        self._tables: dict = {}
        self._checked: dict = {}
        self.builds = 0
        self.relations_checked = 0

    def table(self, unit: Unit, b: Sequence[int]) -> LocalTable:
        key = (unit.key, tuple(b[v] for v in unit.vertices))
        if key not in self._tables:
            table = local_table(
                self.G, unit.vertices, unit.edges, b,
                unit.forbidden_edge_sets, unit.forbidden_degrees,
            )
            if unit.forbidden_degrees is not None:
                D = table.point_set()
                if not D:
                    raise PreconditionError(
                        "no allowed local degree profile remains", reason="empty-local"
                    )
                if not (is_constant_parity(D) and is_jump_system(D)):
                    raise PreconditionError(
                        f"allowed degree profiles of group {unit.key[2]} are not a "
                        "constant-parity jump system",
                        reason="not-cp-jump",
                    )
            self._tables[key] = table
        return self._tables[key]

    def build(self, b: Sequence[int]) -> tuple[CspInstance, GadgetMapping]:
        G, family = self.G, self.family
        t = family.t
        b = check_b(G, b, t)
        family = preprocess_drop_inactive(family, b)
        units = units_of(G, family)
        tables = [self.table(u, b) for u in units]

        removed = frozenset(e for u in units for e in u.edges)
        retained = tuple(e for e in range(G.m) if e not in removed)
        vlabels = list(G.vertex_labels)
        taken = set(vlabels)
        edges = [G.edges[e] for e in retained]
        elabels = [G.edge_labels[e] for e in retained]
        original_edge = list(retained)
        unit_vertex = []
        bundles = {}
        for i, u in enumerate(units):
            label = f"~r{i}"
            while label in taken:
                label += "'"
            taken.add(label)
            r = len(vlabels)
            vlabels.append(label)
            unit_vertex.append(r)
            for v in u.vertices:
                ids = []
                for j in range(t):
                    ids.append(len(edges))
                    edges.append((v, r))
                    elabels.append(f"{label}/{G.vertex_labels[v]}/{j}")
                    original_edge.append(-1)
                bundles[(i, v)] = tuple(ids)
        gadget = Multigraph(len(vlabels), edges, vlabels, elabels)

        relations = []
        for v in range(G.n):
            rel = _uniform_relation(gadget, v, b[v])
            relations.append(rel)
            self._check(gadget, rel, ("V", tuple(sorted(map(len, rel.classes))), b[v]))
        for i, u in enumerate(units):
            r = unit_vertex[i]
            D = tables[i].point_set()
            # bundle edges were appended in unit-vertex order, t at a time
            classes = tuple(tuple(range(j * t, (j + 1) * t)) for j in range(len(u.vertices)))
            rel = VertexRelation(r, gadget.incidence[r], classes, frozenset(D.points))
            relations.append(rel)
            self._check(gadget, rel, ("R", u.key, D.points, t))

        n_bundle = t * sum(len(u.vertices) for u in units)
        if gadget.n != G.n + len(units) or gadget.m != G.m - len(removed) + n_bundle:
            raise InvariantError("gadget vertex/edge counts are inconsistent")
        self.builds += 1
        mapping = GadgetMapping(
            G.n, t, tuple(units), tuple(tables), tuple(unit_vertex), bundles,
            retained, removed, tuple(original_edge),
        )
        return CspInstance(gadget, tuple(relations)), mapping

    def _check(self, gadget: Multigraph, rel: VertexRelation, key) -> None:
        # an empty relation (b(v) above the degree) marks the instance as
        # infeasible by construction rather than a broken gadget
        if not self.check_relations or not rel.counts:
            return
        if key not in self._checked:
            self._checked[key] = edgecsp.relation_is_cp_jump(gadget, rel)
            self.relations_checked += 1
        if not self._checked[key]:
            raise InvariantError(
                f"relation at gadget vertex {gadget.vertex_labels[rel.vertex]} is not "
                "a constant-parity jump system"
            )

    def solve(self, b: Sequence[int]) -> frozenset[int] | None:
        # some vertex cannot reach its degree; skip building the gadget
        if any(b[v] > self.G.degree(v) for v in range(self.G.n)):
            return None
        instance, mapping = self.build(b)
        Mp = edgecsp.solve(instance, self.solver)
        if Mp is None:
            return None
        return extract_factor(Mp, mapping, self.G, b)


def build_factor_csp(
    G: Multigraph, b: Sequence[int], family: ForbiddenFamily
) -> tuple[CspInstance, GadgetMapping]:
    return FactorSolver(G, family).build(b)


def extract_factor(
    Mp: Iterable[int], mapping: GadgetMapping, G: Multigraph, b: Sequence[int]
) -> frozenset[int]:
    """Map a CSP solution back to a K-free b-factor of ``G``.

    For each unit the chosen bundle edges give a local degree profile; the
    unit's table holds an allowed edge set realizing it.
    """
    Mp = frozenset(Mp)
    M = {mapping.original_edge[e] for e in Mp if mapping.original_edge[e] >= 0}
    for i, (u, table) in enumerate(zip(mapping.units, mapping.tables)):
        profile = tuple(
            sum(1 for e in mapping.bundles[(i, v)] if e in Mp) for v in u.vertices
        )
        witness = table.witness.get(profile)
        if witness is None:
            raise InvariantError(
                f"no local edge set realizes profile {profile} in unit {u.key}"
            )
        M.update(witness)
    M = frozenset(M)
    if degree_sequence(G, M) != tuple(b):
        raise InvariantError("extracted edge set is not a b-factor")
    return M


def solve_kfree_bfactor(
    G: Multigraph, b: Sequence[int], family: ForbiddenFamily, solver=None
) -> frozenset[int] | None:
    """A K-free b-factor of ``G``, or None when none exists."""
    return FactorSolver(G, family, solver).solve(b)


def maximize_with_factor_oracle(
    G: Multigraph,
    b: Sequence[int],
    factor_oracle,
    stats: dict | None = None,
) -> frozenset[int]:
    """Maximum-cardinality b-matching through a b'-factor oracle.

    ``factor_oracle(b')`` returns a b'-factor or None.  The degree sum is
    maximized over ``[0, b]`` from the zero vector; the factor found for
    the final point is returned.
    """
    b = tuple(b)
    witnesses: dict[tuple[int, ...], frozenset[int]] = {}
    calls = 0

    def oracle(x):
        nonlocal calls
        calls += 1
        M = factor_oracle(x)
        if M is None:
            return False
        witnesses[x] = M
        return True

    zero = (0,) * G.n
    x = maximize_linear(oracle, (1,) * G.n, zero, Box(zero, b))
    if stats is not None:
        stats["oracle_calls"] = calls
        stats["degree_sum"] = sum(x)
    return witnesses[x]


def solve_max_kfree_bmatching(
    G: Multigraph,
    b: Sequence[int],
    family: ForbiddenFamily,
    solver=None,
    stats: dict | None = None,
) -> frozenset[int]:
    """Maximum-cardinality K-free b-matching via repeated factor tests."""
    b = check_b(G, b, family.t)
    fs = FactorSolver(G, family, solver)
    return maximize_with_factor_oracle(G, b, fs.solve, stats)


def assemble_degree_system(
    G: Multigraph, b: Sequence[int], family: ForbiddenFamily, guard_edges: int = 16
) -> PointSet:
    """Degree sequences of all K-free b-matchings, assembled from the
    retained edges' degree sequences by Minkowski sums with every unit's
    allowed profiles and a final box intersection.  Desk scale only."""
    if G.m > guard_edges:
        raise GuardExceeded(f"{G.m} edges exceed the guard of {guard_edges}")
    b = check_b(G, b, family.t)
    units = units_of(G, family)
    removed = {e for u in units for e in u.edges}
    ground = tuple(range(G.n))
    J0 = {(0,) * G.n}
    for e in range(G.m):
        if e in removed:
            continue
        u, v = G.edges[e]
        step = set()
        for p in J0:
            q = list(p)
            q[u] += 1
            q[v] += 1
            step.add(tuple(q))
        J0 |= step
    J = PointSet(ground, J0)
    for u in units:
        D = local_table(G, u.vertices, u.edges, b, u.forbidden_edge_sets, u.forbidden_degrees)
        J = minkowski_sum(J, D.point_set().embed(ground))
    return box_intersect(J, Box((0,) * G.n, b))
