from __future__ import annotations

import pytest
from conftest import SEVEN_CYCLE, cycle, family_of, whole

from kfree.errors import GuardExceeded
from kfree.forbidden import ForbiddenFamily
from kfree.generators import generate
from kfree.graphcore import Multigraph, connected_components, degree_sequence
from kfree.jumpsystem import PointSet
from kfree.oracle import (
    brute_kfree_bfactor,
    brute_max_kfree_bmatching,
    check_solution,
    enumerate_J,
    forbidden_edge_sets,
)


def test_c4_examples(c4):
    fam = family_of(c4, 2, whole(c4))
    assert brute_kfree_bfactor(c4, (2,) * 4, fam) is None
    assert brute_max_kfree_bmatching(c4, (2,) * 4, fam) == (3, frozenset({0, 1, 2}))
    assert brute_kfree_bfactor(c4, (1,) * 4, fam) == frozenset({0, 2})


def test_triangle_examples(triangle):
    fam = family_of(triangle, 2, whole(triangle))
    assert brute_max_kfree_bmatching(triangle, (2,) * 3, fam)[0] == 2
    assert brute_max_kfree_bmatching(triangle, (2,) * 3, ForbiddenFamily(2))[0] == 3


def test_seven_vertex_factor(seven):
    G, fam = seven
    assert brute_kfree_bfactor(G, (2,) * 7, fam) == SEVEN_CYCLE
    assert brute_max_kfree_bmatching(G, (2,) * 7, fam)[0] == 7


def test_enumerate_J_single_edge():
    G = Multigraph(2, [(0, 1)])
    assert enumerate_J(G, (1, 1), ForbiddenFamily(1)) == PointSet(range(2), [(0, 0), (1, 1)])
    fam = family_of(G, 1, ([0, 1], [0]))
    assert enumerate_J(G, (1, 1), fam) == PointSet(range(2), [(0, 0)])


def test_enumerate_J_of_c4(c4):
    J = enumerate_J(c4, (2,) * 4, family_of(c4, 2, whole(c4)))
    assert len(J) == 14 and (2, 2, 2, 2) not in J


def test_guard(c4):
    with pytest.raises(GuardExceeded):
        brute_kfree_bfactor(c4, (2,) * 4, ForbiddenFamily(2), guard=3)
    big = cycle(30)
    with pytest.raises(GuardExceeded):
        enumerate_J(big, (2,) * 30, ForbiddenFamily(2))


def test_check_solution_messages(c4):
    fam = family_of(c4, 2, whole(c4))
    assert check_solution(c4, (2,) * 4, fam, range(4)) == [
        "contains forbidden subgraph 0 on ['v1', 'v2', 'v3', 'v4']"
    ]
    assert check_solution(c4, (2,) * 4, fam, [0]) == [
        "vertex v1 has degree 1, b = 2",
        "vertex v2 has degree 1, b = 2",
        "vertex v3 has degree 0, b = 2",
        "vertex v4 has degree 0, b = 2",
    ]
    assert check_solution(c4, (2,) * 4, fam, [0], factor=False) == []
    assert check_solution(c4, (2,) * 4, fam, [9])[0].startswith("unknown edge ids")


@pytest.mark.parametrize("cls, length", [("general-c5", 5), ("general-c6", 6)])
def test_generalized_groups_forbid_hamiltonian_cycles(cls, length):
    inst = generate(cls, 2, n=8, seed=1, max_edges=14)
    sets = forbidden_edge_sets(inst.G, inst.family)
    assert sets
    for F in sets:
        assert len(F) == length
        comps = connected_components(inst.G, F)
        touched = [c for c in comps if c[1]]
        assert len(touched) == 1
        assert set(degree_sequence(inst.G, F)) <= {0, 2}
    M = brute_max_kfree_bmatching(inst.G, inst.b, inst.family)[1]
    assert check_solution(inst.G, inst.b, inst.family, M, factor=False) == []


def test_generalized_check_reports_group(c4):
    from kfree.forbidden import validate_group

    H = validate_group(c4, range(4), range(4), [(2, 2, 2, 2)], 2)
    fam = ForbiddenFamily(2, "generalized", (H,))
    assert check_solution(c4, (2,) * 4, fam, range(4)) == [
        "group 0 contains forbidden edge set ['e12', 'e23', 'e34', 'e41']"
    ]
