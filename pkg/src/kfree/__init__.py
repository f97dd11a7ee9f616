"""Exact solvers for b-matchings that avoid forbidden complete partite
subgraphs or forbidden local degree sequences."""

from .errors import (
    GuardExceeded,
    InputError,
    InvariantError,
    KFreeError,
    PreconditionError,
)
from .forbidden import ForbiddenFamily, ForbiddenSubgraph, GeneralizedGroup
from .graphcore import Multigraph
from .jumpsystem import Box, PointSet
from .reduction import solve_kfree_bfactor, solve_max_kfree_bmatching
from .repair import solve_bounded_degree, solve_bounded_degree_max

__all__ = [
    "Box",
    "ForbiddenFamily",
    "ForbiddenSubgraph",
    "GeneralizedGroup",
    "GuardExceeded",
    "InputError",
    "InvariantError",
    "KFreeError",
    "Multigraph",
    "PointSet",
    "PreconditionError",
    "solve_bounded_degree",
    "solve_bounded_degree_max",
    "solve_kfree_bfactor",
    "solve_max_kfree_bmatching",
]
