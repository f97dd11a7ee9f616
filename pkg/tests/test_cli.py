from __future__ import annotations

import json
import subprocess
import sys

import pytest

from kfree import cli, edgecsp
from kfree.errors import InputError
from kfree.forbidden import check_edge_disjoint
from kfree.generators import generate
from kfree.instance import dumps, parse_instance, parse_solution, serialize_instance

C4 = {
    "t": 2,
    "vertices": ["a", "b", "c", "d"],
    "edges": [["ab", "a", "b"], ["bc", "b", "c"], ["cd", "c", "d"], ["da", "d", "a"]],
    "forbidden": {
        "mode": "subgraphs",
        "subgraphs": [{"vertices": ["a", "b", "c", "d"], "edges": ["ab", "bc", "cd", "da"]}],
    },
}


@pytest.fixture
def c4_file(tmp_path):
    p = tmp_path / "c4.json"
    p.write_text(json.dumps(C4))
    return p


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_instance_round_trip():
    inst = parse_instance(C4)
    assert inst.b == (2, 2, 2, 2)
    data = serialize_instance(inst)
    assert parse_instance(json.loads(dumps(data))) == inst
    for cls in ("rd", "general-c5"):
        gen = generate(cls, 2, seed=4)
        assert parse_instance(serialize_instance(gen)) == gen


def test_parse_errors():
    with pytest.raises(InputError) as info:
        parse_instance({"t": 2})
    assert info.value.reason == "malformed"
    with pytest.raises(InputError):
        parse_instance({**C4, "t": 0})
    bad = {**C4, "forbidden": {"mode": "subgraphs", "subgraphs": [{"vertices": ["a", "z"], "edges": []}]}}
    with pytest.raises(InputError):
        parse_instance(bad)


def test_solve_factor_is_infeasible(c4_file, capsys):
    code, out, _ = run(["solve", c4_file], capsys)
    assert code == cli.EXIT_INFEASIBLE
    assert json.loads(out) == {"status": "infeasible"}


def test_solve_max(c4_file, capsys):
    code, out, _ = run(["solve", c4_file, "--mode", "max"], capsys)
    assert code == 0
    assert json.loads(out) == {"status": "solved", "edges": ["ab", "bc", "da"], "size": 3}


def test_verify(c4_file, tmp_path, capsys):
    sol = tmp_path / "sol.json"
    sol.write_text(json.dumps({"edges": ["ab", "bc", "cd", "da"]}))
    code, out, _ = run(["verify", c4_file, sol], capsys)
    assert code == 1
    assert json.loads(out)["problems"] == ["contains forbidden subgraph 0 on ['a', 'b', 'c', 'd']"]
    sol.write_text(json.dumps({"edges": ["ab", "bc"], "size": 2}))
    code, out, _ = run(["verify", c4_file, sol, "--mode", "max"], capsys)
    assert code == 0 and json.loads(out) == {"status": "ok", "problems": []}
    code, out, _ = run(["verify", c4_file, sol], capsys)
    assert "vertex c has degree 1, b = 2" in json.loads(out)["problems"]
    sol.write_text(json.dumps({"status": "infeasible"}))
    assert run(["verify", c4_file, sol], capsys)[0] == 0
    assert run(["verify", c4_file, sol, "--mode", "max"], capsys)[0] == 1


def test_verify_malformed_solution(c4_file, tmp_path, capsys):
    sol = tmp_path / "sol.json"
    sol.write_text("{not json")
    code, _, err = run(["verify", c4_file, sol], capsys)
    assert code == 1 and json.loads(err)["reason"] == "malformed"
    sol.write_text(json.dumps({"edges": ["xy"]}))
    code, _, err = run(["verify", c4_file, sol], capsys)
    assert json.loads(err)["reason"] == "malformed"


def test_missing_file(tmp_path, capsys):
    code, _, err = run(["solve", tmp_path / "nope.json"], capsys)
    assert code == 1 and json.loads(err)["reason"] == "io"


def test_degree_bound_reason(tmp_path, capsys):
    # two triangles sharing an edge inside K4: overlapping, not laminar, degree 3 > 2t-1
    v = ["a", "b", "c", "d"]
    edges = [[x + y, x, y] for i, x in enumerate(v) for y in v[i + 1:]]
    data = {
        "t": 1 + 1,
        "vertices": v,
        "edges": edges,
        "forbidden": {"mode": "subgraphs", "subgraphs": [
            {"vertices": ["a", "b", "c"], "edges": ["ab", "bc", "ac"]},
            {"vertices": ["a", "b", "d"], "edges": ["ab", "bd", "ad"]},
        ]},
    }
    data["edges"].append(["ad2", "a", "d"])
    p = tmp_path / "k4.json"
    p.write_text(json.dumps(data))
    code, _, err = run(["solve", p], capsys)
    assert code == 1 and json.loads(err)["reason"] == "degree-bound"


def test_gen_classes(capsys):
    code, out, _ = run(["gen", "--class", "edge-disjoint", "--t", "2", "--n", "10", "--seed", "7"], capsys)
    inst = parse_instance(json.loads(out))
    assert code == 0 and check_edge_disjoint(inst.family.members)[0]
    _, out, _ = run(["gen", "--class", "bounded-degree", "--t", "3", "--seed", "7"], capsys)
    assert parse_instance(json.loads(out)).G.max_degree() <= 5
    _, out, _ = run(["gen", "--class", "general-c5", "--seed", "7"], capsys)
    inst = parse_instance(json.loads(out))
    H = inst.family.members[0]
    assert inst.family.mode == "generalized" and len(H.vertices) == 5 and len(H.edges) == 8


def test_gen_is_deterministic(capsys):
    args = ["gen", "--class", "rd", "--t", "3", "--seed", "11", "--b-mode", "mixed"]
    assert run(args, capsys)[1] == run(args, capsys)[1]


def test_emit_csp_round_trip(tmp_path, capsys):
    inst = generate("rd", 2, seed=2)
    p = tmp_path / "rd.json"
    p.write_text(dumps(serialize_instance(inst)))
    csp_path = tmp_path / "csp.json"
    code, _, _ = run(["solve", p, "--emit-csp", csp_path], capsys)
    assert code in (0, 2)
    csp = edgecsp.from_json(json.loads(csp_path.read_text()))
    # empty relations mark vertices whose b exceeds their degree
    empty = [rel.vertex for rel in csp.relations if not rel.counts]
    assert empty == [v for v in range(inst.G.n) if inst.b[v] > inst.G.degree(v)]
    assert all(edgecsp.relation_is_cp_jump(csp.graph, rel) for rel in csp.relations if rel.counts)
    assert (edgecsp.solve(csp) is None) == (code == 2)


def test_compare(capsys):
    code, out, _ = run(["compare", "--class", "edge-disjoint", "--count", "0"], capsys)
    assert code == 0 and out.strip().endswith("agreement n/a")
    code, out, _ = run(["compare", "--class", "laminar", "--count", "4", "--t", "2"], capsys)
    assert code == 0 and "disagree 0" in out
    code, out, _ = run(["compare", "--class", "rd", "--count", "3", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert lines[0].split(",") == list(cli.REPORT_FIELDS) and len(lines) == 4


def test_compare_skips_overlapping_high_degree():
    rows = cli.run_compare("overlapping", 6, seed=1, t=2)
    assert all(r["verdict"] == "agree" or r["verdict"].startswith("skip:") for r in rows)


def test_compare_parallel_matches_serial():
    a = cli.run_compare("edge-disjoint", 4, seed=5)
    b = cli.run_compare("edge-disjoint", 4, seed=5, jobs=2)
    assert a == b


def test_parse_solution_rejects_missing_edges():
    inst = parse_instance(C4)
    with pytest.raises(InputError):
        parse_solution(inst.G, {"status": "solved"})


def test_module_entry_point(c4_file):
    proc = subprocess.run(
        [sys.executable, "-m", "kfree", "solve", str(c4_file), "--mode", "max"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["size"] == 3
