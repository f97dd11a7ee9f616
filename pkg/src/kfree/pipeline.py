"""Pick the solver that covers an instance's forbidden structure."""

from __future__ import annotations

from dataclasses import replace

from .errors import PreconditionError
from .forbidden import check_edge_disjoint, rd_partition_from_laminar
from .instance import Instance
from .reduction import solve_kfree_bfactor, solve_max_kfree_bmatching
from .repair import solve_bounded_degree, solve_bounded_degree_max


def choose_route(inst: Instance) -> tuple[str, object]:
    """Return ``(route, family)`` where route is one of ``edge-disjoint``,
    ``rd``, ``laminar``, ``generalized`` or ``bounded-degree``.

    Explicit ``rd`` and ``generalized`` families go straight to the
    reduction.  Plain subgraph lists use the reduction when edge-disjoint or
    laminar, and the repair algorithm when the maximum degree is at most
    2t-1; anything else is rejected.
    """
    fam = inst.family
    if fam.mode in ("rd", "generalized"):
        return fam.mode, fam
    if check_edge_disjoint(fam.members)[0]:
        return "edge-disjoint", fam
    try:
        groups = rd_partition_from_laminar(fam.members)
    except PreconditionError:
        groups = None
    if groups is not None:
        return "laminar", replace(fam, mode="rd", groups=groups)
    if inst.G.max_degree() <= 2 * inst.t - 1:
        return "bounded-degree", fam
    worst = max(range(inst.G.n), key=inst.G.degree)
    raise PreconditionError(
        "forbidden subgraphs overlap, are not laminar, and vertex "
        f"{inst.G.vertex_labels[worst]} has degree {inst.G.degree(worst)} > 2t-1",
        reason="degree-bound",
    )


def solve_instance(inst: Instance, mode: str = "factor", stats: dict | None = None):
    """Solve in ``factor`` or ``max`` mode; returns ``(edge set or None, route)``."""
    route, fam = choose_route(inst)
    if mode == "factor":
        if route == "bounded-degree":
            M = solve_bounded_degree(inst.G, inst.b, fam, stats=stats)
        else:
            M = solve_kfree_bfactor(inst.G, inst.b, fam)
    elif mode == "max":
        if route == "bounded-degree":
            M = solve_bounded_degree_max(inst.G, inst.b, fam, stats=stats)
        else:
            M = solve_max_kfree_bmatching(inst.G, inst.b, fam, stats=stats)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return M, route
