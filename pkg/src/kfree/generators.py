"""Seeded random instance generators for the supported instance classes.

All generators build simple host graphs on ``n`` vertices with at most
``max_edges`` edges, use only ``random.Random(seed)`` and return an
:class:`~kfree.instance.Instance`; the same arguments always give the same
instance.
"""

from __future__ import annotations

import itertools
import random

from .errors import InputError
from .forbidden import (
    ForbiddenFamily,
    check_edge_disjoint,
    validate_group,
    validate_subgraph,
)
from .graphcore import Multigraph
from .instance import Instance

CLASSES = (
    "edge-disjoint",
    "rd",
    "bounded-degree",
    "laminar",
    "overlapping",
    "general-c5",
    "general-c6",
)


def partite_shapes(t: int) -> list[tuple[int, int]]:
    """``(classes, class size)`` of every t-regular complete partite graph."""
    return [(t // s + 1, s) for s in range(1, t + 1) if t % s == 0]


def _set_partitions(items: list[int], size: int):
    """Partitions of ``items`` into unlabeled blocks of ``size``."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for others in itertools.combinations(rest, size - 1):
        block = [first, *others]
        remaining = [x for x in rest if x not in others]
        for tail in _set_partitions(remaining, size):
            yield [block, *tail]


class _Builder:
    def __init__(self, n: int, max_edges: int, rng: random.Random):
        self.n = n
        self.max_edges = max_edges
        self.rng = rng
        self.pairs: list[tuple[int, int]] = []
        self.index: dict[frozenset, int] = {}
        self.deg = [0] * n

    def has(self, u: int, v: int) -> bool:
        return frozenset((u, v)) in self.index

    def add(self, u: int, v: int) -> int:
        key = frozenset((u, v))
        if key not in self.index:
            self.index[key] = len(self.pairs)
            self.pairs.append((u, v))
            self.deg[u] += 1
            self.deg[v] += 1
        return self.index[key]

    def room(self) -> int:
        return self.max_edges - len(self.pairs)

    def random_copy(self, shape: tuple[int, int]) -> list[list[int]] | None:
        p, s = shape
        if p * s > self.n:
            return None
        vs = self.rng.sample(range(self.n), p * s)
        return [sorted(vs[i * s:(i + 1) * s]) for i in range(p)]

    def extra_edges(self, count: int, max_degree: int | None = None) -> None:
        candidates = [
            (u, v) for u in range(self.n) for v in range(u + 1, self.n) if not self.has(u, v)
        ]
        self.rng.shuffle(candidates)
        for u, v in candidates:
            if count <= 0 or self.room() <= 0:
                break
            if max_degree is not None and max(self.deg[u], self.deg[v]) >= max_degree:
                continue
            self.add(u, v)
            count -= 1

    def graph(self) -> Multigraph:
        return Multigraph(self.n, self.pairs)


def cross_pairs(classes: list[list[int]]) -> list[tuple[int, int]]:
    return [
        (min(u, v), max(u, v))
        for a, b in itertools.combinations(classes, 2)
        for u in a
        for v in b
    ]


def enumerate_copies(G: Multigraph, shape: tuple[int, int]) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All complete partite subgraphs with the given shape in a simple graph,
    as ``(vertices, edges)``; ordered by vertex set then edge set."""
    p, s = shape
    index = {frozenset(e): i for i, e in enumerate(G.edges)}
    found = set()
    for vs in itertools.combinations(range(G.n), p * s):
        for classes in _set_partitions(list(vs), s):
            es = []
            for u, v in cross_pairs(classes):
                e = index.get(frozenset((u, v)))
                if e is None:
                    break
                es.append(e)
            else:
                found.add((vs, tuple(sorted(es))))
    return sorted(found)


B_MODES = ("t", "random", "planted", "mixed")


def _pick_b(rng: random.Random, G: Multigraph, t: int, b_mode: str) -> tuple[int, ...]:
    if b_mode == "mixed":
        b_mode = rng.choice(("t", "random", "planted"))
    if b_mode == "t":
        return (t,) * G.n
    if b_mode == "random":
        return tuple(rng.randint(0, t) for _ in range(G.n))
    # degrees of a random t-matching, so some b-factor exists
    order = list(range(G.m))
    rng.shuffle(order)
    deg = [0] * G.n
    for e in order:
        u, v = G.edges[e]
        if deg[u] < t and deg[v] < t and rng.random() < 0.8:
            deg[u] += 1
            deg[v] += 1
    return tuple(deg)


def _subgraph_family(G, t, copies, mode="subgraphs", groups=None) -> ForbiddenFamily:
    members = tuple(validate_subgraph(G, vs, es, t) for vs, es in copies)
    return ForbiddenFamily(t, mode, members, groups)


def _plant(bld: _Builder, t: int, tries: int, allow_shared: bool, max_degree=None):
    """Plant random complete partite copies; returns their (vertices, edges)."""
    copies = []
    shapes = partite_shapes(t)
    for _ in range(tries):
        classes = bld.random_copy(bld.rng.choice(shapes))
        if classes is None:
            continue
        pairs = cross_pairs(classes)
        new = [pr for pr in pairs if not bld.has(*pr)]
        if not allow_shared and len(new) < len(pairs):
            continue
        if len(new) > bld.room():
            continue
        if max_degree is not None:
            extra = [0] * bld.n
            for u, v in new:
                extra[u] += 1
                extra[v] += 1
            if any(bld.deg[v] + extra[v] > max_degree for v in range(bld.n)):
                continue
        es = tuple(sorted(bld.add(u, v) for u, v in pairs))
        copies.append((tuple(sorted(x for c in classes for x in c)), es))
    return copies


def _labelled(G: Multigraph) -> Multigraph:
    return Multigraph(
        G.n, G.edges, [f"v{i}" for i in range(G.n)], [f"e{i}" for i in range(G.m)]
    )


def generate(
    cls: str,
    t: int = 2,
    n: int = 8,
    seed: int = 0,
    max_edges: int = 14,
    b_mode: str = "t",
) -> Instance:
    """One random instance of class ``cls``.

    ``edge-disjoint`` plants copies sharing no edge; ``rd`` lets copies
    share edges and groups them; ``bounded-degree`` keeps the maximum degree
    at most 2t-1 and forbids every complete partite t-regular subgraph
    present; ``laminar`` nests copies inside edge-disjoint blocks;
    ``overlapping`` samples arbitrary copies from a dense graph;
    ``general-c5`` and ``general-c6`` embed groups that forbid the all-two
    degree sequence (t = 2).  ``b_mode`` is ``t`` (b = t everywhere),
    ``random`` (uniform in 0..t), ``planted`` (degrees of a random
    t-matching, so some b-factor exists) or ``mixed`` (one of those, chosen
    by the seed).
    """
    if b_mode not in B_MODES:
        raise InputError(f"unknown b mode {b_mode!r}")
    if cls not in CLASSES:
        raise InputError(f"unknown instance class {cls!r}")
    if t < 1 or n < 1 or max_edges < 0:
        raise InputError("t and n must be positive and max_edges nonnegative")
    rng = random.Random(f"{cls}/{t}/{n}/{seed}/{max_edges}/{b_mode}")
    bld = _Builder(n, max_edges, rng)

    if cls in ("general-c5", "general-c6"):
        if t != 2:
            raise InputError(f"class {cls} is defined for t = 2 only")
        return _generate_general(cls, n, rng, bld, b_mode)
    if min(p * s for p, s in partite_shapes(t)) > n:
        raise InputError(f"n = {n} is too small for any {t}-regular complete partite graph")

    if cls == "edge-disjoint":
        copies = _plant(bld, t, rng.randint(1, 3), allow_shared=False)
        bld.extra_edges(rng.randint(0, bld.room()))
        G = _labelled(bld.graph())
        family = _subgraph_family(G, t, copies)
    elif cls == "rd":
        copies = _plant(bld, t, rng.randint(2, 4), allow_shared=True)
        bld.extra_edges(rng.randint(0, bld.room()))
        G = _labelled(bld.graph())
        family = _rd_family(G, t, copies)
    elif cls == "bounded-degree":
        limit = 2 * t - 1
        _plant(bld, t, rng.randint(2, 5), allow_shared=True, max_degree=limit)
        bld.extra_edges(rng.randint(0, bld.room()), max_degree=limit)
        G = _labelled(bld.graph())
        copies = [c for shape in partite_shapes(t) for c in enumerate_copies(G, shape)]
        family = _subgraph_family(G, t, copies)
    elif cls == "laminar":
        G, copies = _laminar(bld, t)
        family = _subgraph_family(G, t, copies)
    else:
        bld.extra_edges(rng.randint(max_edges // 2, max_edges))
        _plant(bld, t, rng.randint(1, 3), allow_shared=True)
        G = _labelled(bld.graph())
        copies = [c for shape in partite_shapes(t) for c in enumerate_copies(G, shape)]
        if copies:
            copies = sorted(rng.sample(copies, rng.randint(1, min(len(copies), 4))))
        family = _subgraph_family(G, t, copies)
    return Instance(G, t, _pick_b(rng, G, t, b_mode), family)


def _rd_family(G: Multigraph, t: int, copies) -> ForbiddenFamily:
    """Group copies by shared edges; drop copies while a group spans too many
    vertices."""
    cap = 4 * t
    copies = list(dict.fromkeys(copies))
    while True:
        parent = list(range(len(copies)))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        for i, j in itertools.combinations(range(len(copies)), 2):
            if set(copies[i][1]) & set(copies[j][1]):
                parent[find(j)] = find(i)
        groups: dict[int, list[int]] = {}
        for i in range(len(copies)):
            groups.setdefault(find(i), []).append(i)
        too_big = [
            g for g in groups.values() if len({v for i in g for v in copies[i][0]}) > cap
        ]
        if not too_big:
            break
        copies.pop(too_big[0][-1])
    return _subgraph_family(G, t, copies, "rd", tuple(tuple(g) for g in groups.values()))


def _laminar(bld: _Builder, t: int):
    """Blocks spanning a maximal copy plus nested copies inside them; blocks
    are edge-disjoint, so the family is laminar."""
    rng = bld.rng
    shapes = partite_shapes(t)
    chosen: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for _ in range(rng.randint(1, 3)):
        classes = bld.random_copy(rng.choice(shapes))
        if classes is None:
            continue
        block = sorted(x for c in classes for x in c)
        pairs = cross_pairs(classes)
        # optional chords inside the block create nested copies
        chords = [
            pr for pr in itertools.combinations(block, 2)
            if pr not in pairs and rng.random() < 0.5
        ]
        new = [pr for pr in pairs + chords if not bld.has(*pr)]
        if len(new) < len(pairs) + len(chords) or len(new) > bld.room():
            continue
        for pr in pairs + chords:
            bld.add(*pr)
        sub = Multigraph(len(block), [(block.index(u), block.index(v)) for u, v in pairs + chords])
        local = [c for shape in shapes for c in enumerate_copies(sub, shape)]
        ids = [bld.index[frozenset(pr)] for pr in pairs + chords]
        cands = [
            (tuple(block[i] for i in vs), tuple(sorted(ids[e] for e in es)))
            for vs, es in local
        ]
        rng.shuffle(cands)
        main = (tuple(block), tuple(sorted(bld.index[frozenset(pr)] for pr in pairs)))
        picked = [main]
        for c in cands:
            if c in picked:
                continue
            if all(
                not (set(c[1]) & set(d[1])) or set(c[0]) <= set(d[0]) or set(d[0]) <= set(c[0])
                for d in picked
            ):
                picked.append(c)
        chosen.extend(picked)
    # extra edges never join the family, so blocks stay edge-disjoint
    bld.extra_edges(rng.randint(0, bld.room()))
    G = _labelled(bld.graph())
    return G, sorted(chosen)


_GENERAL_SHAPES = {
    # K5 minus a matching of size two
    "general-c5": (5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 4),
                       (1, 2), (3, 4)], [(1, 2), (3, 4)]),
    # K_{3,3} minus one edge
    "general-c6": (6, [(a, b) for a in range(3) for b in range(3, 6)], [(0, 3)]),
}


def _generate_general(cls: str, n: int, rng: random.Random, bld: _Builder, b_mode: str) -> Instance:
    size, full, removed = _GENERAL_SHAPES[cls]
    pattern = [pr for pr in full if pr not in removed]
    if n < size:
        raise InputError(f"n = {n} is too small for a {size}-vertex group")
    groups = []
    for _ in range(rng.randint(1, 2)):
        vs = rng.sample(range(n), size)
        pairs = [(vs[a], vs[b]) for a, b in pattern]
        if any(bld.has(u, v) for u, v in pairs) or len(pairs) > bld.room():
            continue
        es = [bld.add(u, v) for u, v in pairs]
        groups.append((sorted(vs), sorted(es)))
    bld.extra_edges(rng.randint(0, bld.room()))
    G = _labelled(bld.graph())
    members = tuple(
        validate_group(G, vs, es, [(2,) * size], 2) for vs, es in groups
    )
    family = ForbiddenFamily(2, "generalized", members)
    assert check_edge_disjoint(members)[0]
    return Instance(G, 2, _pick_b(rng, G, 2, b_mode), family)
