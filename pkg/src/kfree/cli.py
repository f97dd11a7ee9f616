"""Command line front end.

Subcommands::

    kfree solve INSTANCE [--mode factor|max] [--out FILE] [--emit-csp FILE]
    kfree verify INSTANCE SOLUTION [--mode factor|max] [--guard-edges N]
    kfree gen --class CLASS [--t T] [--n N] [--seed S] [--max-edges M] [--out FILE]
    kfree compare --class CLASS --count K [--seed S] [--guard-edges N] [--jobs J]

Exit codes: 0 solved or verified, 2 infeasible, 1 error.  Errors are
reported on stderr as one JSON object with a stable ``reason`` string.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import edgecsp
from .errors import GuardExceeded, InvariantError, KFreeError
from .generators import B_MODES, CLASSES, generate
from .instance import (
    dumps,
    load_instance,
    parse_solution,
    serialize_instance,
    solution_dict,
)
from .oracle import (
    DEFAULT_GUARD,
    brute_kfree_bfactor,
    brute_max_kfree_bmatching,
    check_solution,
)
from .pipeline import choose_route, solve_instance
from .reduction import build_factor_csp
from .repair import relaxed_family

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2


class CliError(Exception):
    def __init__(self, message: str, reason: str):
        super().__init__(message)
        self.reason = reason


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(path: str):
    try:
        return load_instance(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", "io") from exc


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    stats: dict = {}
    if args.emit_csp:
        route, fam = choose_route(inst)
        if route == "bounded-degree":
            fam = relaxed_family(fam)[1]
        csp, _ = build_factor_csp(inst.G, inst.b, fam)
        Path(args.emit_csp).write_text(dumps(edgecsp.to_json(csp)), encoding="utf-8")
    M, _route = solve_instance(inst, args.mode, stats)
    _emit(dumps(solution_dict(inst.G, M)), args.out)
    return EXIT_INFEASIBLE if M is None else EXIT_OK


def cmd_verify(args) -> int:
    inst = _load(args.instance)
    try:
        data = json.loads(Path(args.solution).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read {args.solution}: {exc.strerror}", "io") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid JSON: {exc}", "malformed") from exc
    factor = args.mode == "factor"
    if isinstance(data, dict) and data.get("status") == "infeasible":
        if not factor:
            problems = ["a b-matching always exists (the empty set)"]
        else:
            found = brute_kfree_bfactor(inst.G, inst.b, inst.family, args.guard_edges)
            problems = [] if found is None else ["a K-free b-factor exists"]
    else:
        M = parse_solution(inst.G, data)
        problems = check_solution(inst.G, inst.b, inst.family, M, factor=factor)
        if "size" in data and data["size"] != len(M):
            problems.append(f"size field {data['size']} differs from {len(M)} edges")
    report = {"status": "invalid" if problems else "ok", "problems": problems}
    sys.stdout.write(json.dumps(report) + "\n")
    return EXIT_ERROR if problems else EXIT_OK


def cmd_gen(args) -> int:
    inst = generate(args.cls, args.t, args.n, args.seed, args.max_edges, args.b_mode)
    _emit(dumps(serialize_instance(inst)), args.out)
    return EXIT_OK


REPORT_FIELDS = (
    "index", "class", "t", "n", "m", "members", "route",
    "factor_solver", "factor_oracle", "max_solver", "max_oracle",
    "oracle_calls", "repair_steps", "verdict",
)


def compare_one(cls: str, t: int, n: int, seed: int, max_edges: int, b_mode: str,
                mode: str, guard: int, index: int) -> dict:
    """Solver against oracle on one generated instance; never raises."""
    row = dict.fromkeys(REPORT_FIELDS, "")
    row.update(index=index, **{"class": cls}, t=t)
    try:
        inst = generate(cls, t, n, seed * 1_000_003 + index, max_edges, b_mode)
    except KFreeError as exc:
        row["verdict"] = f"skip:{exc.reason}"
        return row
    G = inst.G
    row.update(n=G.n, m=G.m, members=len(inst.family.members))
    problems = []
    try:
        if mode in ("factor", "both"):
            stats: dict = {}
            M, row["route"] = solve_instance(inst, "factor", stats)
            row["repair_steps"] = stats.get("repair_steps", "")
            ref = brute_kfree_bfactor(G, inst.b, inst.family, guard)
            row["factor_solver"] = "none" if M is None else len(M)
            row["factor_oracle"] = "none" if ref is None else len(ref)
            if (M is None) != (ref is None):
                problems.append("feasibility")
            elif M is not None and check_solution(G, inst.b, inst.family, M):
                problems.append("factor-invalid")
        if mode in ("max", "both"):
            stats = {}
            M, row["route"] = solve_instance(inst, "max", stats)
            row["oracle_calls"] = stats.get("oracle_calls", "")
            size, _ = brute_max_kfree_bmatching(G, inst.b, inst.family, guard)
            row["max_solver"], row["max_oracle"] = len(M), size
            if len(M) != size:
                problems.append("max-size")
            elif check_solution(G, inst.b, inst.family, M, factor=False):
                problems.append("max-invalid")
    except GuardExceeded:
        row["verdict"] = "skip:guard"
        return row
    except InvariantError:
        problems.append("invariant")
    except KFreeError as exc:
        row["verdict"] = f"skip:{exc.reason}"
        return row
    row["verdict"] = "disagree:" + "+".join(problems) if problems else "agree"
    return row


def run_compare(cls: str, count: int, seed: int = 0, t: int = 2, n: int = 8,
                max_edges: int = 14, b_mode: str = "t", mode: str = "both",
                guard: int = DEFAULT_GUARD, jobs: int = 1) -> list[dict]:
    jobs_args = [(cls, t, n, seed, max_edges, b_mode, mode, guard, i) for i in range(count)]
    if jobs > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(compare_one, *zip(*jobs_args)))
    else:
        rows = [compare_one(*a) for a in jobs_args]
    return sorted(rows, key=lambda r: r["index"])


def summarize(rows: list[dict]) -> dict:
    agree = sum(r["verdict"] == "agree" for r in rows)
    disagree = sum(r["verdict"].startswith("disagree") for r in rows)
    return {
        "instances": len(rows),
        "agree": agree,
        "disagree": disagree,
        "skipped": len(rows) - agree - disagree,
    }


def format_report(rows: list[dict], fmt: str) -> str:
    summary = summarize(rows)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    lines = []
    if rows:
        widths = {f: max(len(f), *(len(str(r[f])) for r in rows)) for f in REPORT_FIELDS}
        lines.append("  ".join(f.ljust(widths[f]) for f in REPORT_FIELDS).rstrip())
        for r in rows:
            lines.append("  ".join(str(r[f]).ljust(widths[f]) for f in REPORT_FIELDS).rstrip())
    compared = summary["agree"] + summary["disagree"]
    rate = f"{100.0 * summary['agree'] / compared:.1f}%" if compared else "n/a"
    lines.append(
        f"instances {summary['instances']}  agree {summary['agree']}  "
        f"disagree {summary['disagree']}  skipped {summary['skipped']}  agreement {rate}"
    )
    return "\n".join(lines) + "\n"


def cmd_compare(args) -> int:
    if args.count < 0:
        raise CliError("--count must be nonnegative", "input")
    rows = run_compare(
        args.cls, args.count, args.seed, args.t, args.n, args.max_edges,
        args.b_mode, args.mode, args.guard_edges, args.jobs,
    )
    _emit(format_report(rows, args.format), args.out)
    return EXIT_ERROR if summarize(rows)["disagree"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="kfree", description="K-free b-factors and maximum K-free b-matchings"
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("instance")
    s.add_argument("--mode", choices=("factor", "max"), default="factor")
    s.add_argument("--out", help="solution file (default: stdout)")
    s.add_argument("--emit-csp", metavar="FILE", help="also dump the gadget CSP as JSON")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a solution independently of the solver")
    v.add_argument("instance")
    v.add_argument("solution")
    v.add_argument("--mode", choices=("factor", "max"), default="factor")
    v.add_argument("--guard-edges", type=int, default=DEFAULT_GUARD)
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--class", dest="cls", choices=CLASSES, required=True)
    g.add_argument("--t", type=int, default=2)
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-edges", type=int, default=14)
    g.add_argument("--b-mode", choices=B_MODES, default="t")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("compare", help="solver against brute force on random instances")
    c.add_argument("--class", dest="cls", choices=CLASSES, required=True)
    c.add_argument("--count", type=int, default=10)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--t", type=int, default=2)
    c.add_argument("--n", type=int, default=8)
    c.add_argument("--max-edges", type=int, default=14)
    c.add_argument("--b-mode", choices=B_MODES, default="t")
    c.add_argument("--mode", choices=("factor", "max", "both"), default="both")
    c.add_argument("--guard-edges", type=int, default=DEFAULT_GUARD)
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--format", choices=("text", "csv"), default="text")
    c.add_argument("--out")
    c.set_defaults(func=cmd_compare)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (KFreeError, CliError) as exc:
        err = {"status": "error", "reason": exc.reason, "message": str(exc)}
        sys.stderr.write(json.dumps(err) + "\n")
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
