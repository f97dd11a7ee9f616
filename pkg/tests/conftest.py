from __future__ import annotations

import pytest

from kfree.forbidden import ForbiddenFamily, validate_subgraph
from kfree.graphcore import Multigraph


def cycle(n: int, prefix: str = "v") -> Multigraph:
    labels = [f"{prefix}{i + 1}" for i in range(n)]
    edges = [
        (f"e{labels[i][1:]}{labels[(i + 1) % n][1:]}", labels[i], labels[(i + 1) % n])
        for i in range(n)
    ]
    return Multigraph.from_labels(labels, edges)


def family_of(G: Multigraph, t: int, *members) -> ForbiddenFamily:
    """Subgraph family from (vertex ids, edge ids) pairs."""
    return ForbiddenFamily(t, "subgraphs", tuple(validate_subgraph(G, vs, es, t) for vs, es in members))


def whole(G: Multigraph):
    return (range(G.n), range(G.m))


@pytest.fixture
def c4():
    return cycle(4)


@pytest.fixture
def triangle():
    return cycle(3)


def seven_vertex():
    """Two C4s sharing the edge uu' plus a pendant triangle through z."""
    G = Multigraph.from_labels(
        ["u", "u'", "v", "v'", "p", "q", "z"],
        [
            ("uu'", "u", "u'"),
            ("u'p", "u'", "p"),
            ("pq", "p", "q"),
            ("qu", "q", "u"),
            ("u'v", "u'", "v"),
            ("vv'", "v", "v'"),
            ("v'u", "v'", "u"),
            ("vz", "v", "z"),
            ("v'z", "v'", "z"),
        ],
    )
    K1 = ([0, 1, 4, 5], [0, 1, 2, 3])
    K2 = ([0, 1, 2, 3], [0, 4, 5, 6])
    return G, family_of(G, 2, K1, K2)


SEVEN_CYCLE = frozenset({1, 2, 3, 4, 6, 7, 8})


@pytest.fixture
def seven():
    return seven_vertex()
