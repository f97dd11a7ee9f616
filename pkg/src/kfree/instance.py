"""Instance and solution files (JSON, UTF-8).

Instance::

    {"t": 2,
     "vertices": ["a", "b", ...],
     "edges": [["e1", "a", "b"], ...],
     "b": {"a": 2, ...},                      # optional, defaults to t
     "forbidden": {"mode": "subgraphs" | "rd" | "generalized",
                   "subgraphs": [{"vertices": [...], "edges": [...]}, ...],
                   "groups": [[0, 1], [2]],   # rd only
                   "generalized": [{"vertices": [...], "edges": [...],
                                    "forbidden_degrees": [[2, 2, ...], ...]}],
                   "size_cap": 8}}            # optional

Degree vectors in ``forbidden_degrees`` follow the group's ``vertices``
order.  Solution::

    {"status": "solved", "edges": [...], "size": 3}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import InputError
from .forbidden import ForbiddenFamily, validate_group, validate_subgraph
from .graphcore import Multigraph


@dataclass(frozen=True)
class Instance:
    G: Multigraph
    t: int
    b: tuple[int, ...]
    family: ForbiddenFamily


def _labels_to_ids(index: dict, labels, what: str) -> list[int]:
    out = []
    for x in labels:
        if x not in index:
            raise InputError(f"unknown {what} {x!r}", reason="malformed")
        out.append(index[x])
    return out


def parse_instance(data: dict) -> Instance:
    try:
        t = data["t"]
        vertices = [str(v) for v in data["vertices"]]
        edges = [(str(e[0]), str(e[1]), str(e[2])) for e in data["edges"]]
    except (KeyError, TypeError, IndexError) as exc:
        raise InputError(f"missing or malformed field: {exc}", reason="malformed") from exc
    if not isinstance(t, int) or isinstance(t, bool) or t < 1:
        raise InputError("t must be a positive integer", reason="malformed")
    G = Multigraph.from_labels(vertices, edges)
    vindex = {v: i for i, v in enumerate(G.vertex_labels)}
    eindex = {e: i for i, e in enumerate(G.edge_labels)}

    bmap = data.get("b") or {}
    if not isinstance(bmap, dict):
        raise InputError("b must map vertex ids to integers", reason="malformed")
    b = [t] * G.n
    for label, value in bmap.items():
        if label not in vindex:
            raise InputError(f"b names unknown vertex {label!r}", reason="malformed")
        if not isinstance(value, int) or isinstance(value, bool):
            raise InputError(f"b({label}) is not an integer", reason="malformed")
        b[vindex[label]] = value

    forb = data.get("forbidden") or {"mode": "subgraphs", "subgraphs": []}
    mode = forb.get("mode", "subgraphs")
    cap = forb.get("size_cap")
    if mode in ("subgraphs", "rd"):
        members = tuple(
            validate_subgraph(
                G,
                _labels_to_ids(vindex, s["vertices"], "vertex"),
                _labels_to_ids(eindex, s["edges"], "edge"),
                t,
            )
            for s in forb.get("subgraphs", [])
        )
        groups = None
        if mode == "rd":
            groups = tuple(tuple(int(i) for i in g) for g in forb.get("groups", []))
        family = ForbiddenFamily(t, mode, members, groups, cap)
    elif mode == "generalized":
        members = []
        for s in forb.get("generalized", []):
            vs = _labels_to_ids(vindex, s["vertices"], "vertex")
            # degree vectors are given in the listed vertex order; store sorted
            order = sorted(range(len(vs)), key=lambda i: vs[i])
            degs = [[d[i] for i in order] for d in s.get("forbidden_degrees", [])]
            members.append(
                validate_group(G, vs, _labels_to_ids(eindex, s["edges"], "edge"), degs, t)
            )
        family = ForbiddenFamily(t, mode, tuple(members), None, cap)
    else:
        raise InputError(f"unknown forbidden mode {mode!r}", reason="malformed")
    return Instance(G, t, tuple(b), family)


def serialize_instance(inst: Instance) -> dict:
    G = inst.G
    vl, el = G.vertex_labels, G.edge_labels
    fam = inst.family
    forb: dict = {"mode": fam.mode}
    if fam.mode == "generalized":
        forb["generalized"] = [
            {
                "vertices": [vl[v] for v in H.vertices],
                "edges": [el[e] for e in H.edges],
                "forbidden_degrees": [list(p) for p in H.forbidden.points],
            }
            for H in fam.members
        ]
    else:
        forb["subgraphs"] = [
            {"vertices": [vl[v] for v in K.vertices], "edges": [el[e] for e in K.edges]}
            for K in fam.members
        ]
        if fam.mode == "rd":
            forb["groups"] = [list(g) for g in fam.groups]
    if fam.size_cap is not None:
        forb["size_cap"] = fam.size_cap
    return {
        "t": inst.t,
        "vertices": list(vl),
        "edges": [[el[e], vl[u], vl[v]] for e, (u, v) in enumerate(G.edges)],
        "b": {vl[v]: inst.b[v] for v in range(G.n)},
        "forbidden": forb,
    }


def dumps(data: dict) -> str:
    return json.dumps(data, indent=1, sort_keys=False) + "\n"


def load_instance(path: str | Path) -> Instance:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}", reason="malformed") from exc
    if not isinstance(data, dict):
        raise InputError("instance must be a JSON object", reason="malformed")
    return parse_instance(data)


def solution_dict(G: Multigraph, M) -> dict:
    if M is None:
        return {"status": "infeasible"}
    edges = sorted(M)
    return {"status": "solved", "edges": [G.edge_labels[e] for e in edges], "size": len(edges)}


def parse_solution(G: Multigraph, data: dict) -> frozenset[int]:
    if not isinstance(data, dict) or "edges" not in data or data["edges"] is None:
        raise InputError("solution has no edge list", reason="malformed")
    index = {e: i for i, e in enumerate(G.edge_labels)}
    return frozenset(_labels_to_ids(index, [str(x) for x in data["edges"]], "edge"))
