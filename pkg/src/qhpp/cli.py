"""Command-line front end.

Subcommands: cf-info, candidate, enumerate, verify, dioph, gram.
Exit codes: 0 success / everything verified, 1 verification mismatch
(diff printed), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .checks import run_all_checks
from .enumeration import PIPELINES, PipelineReport, run_pipeline
from .fixtures import ENV_VAR, load_fixtures
from .hjcf import parse_cf
from .obstruction import DiophProblem, solve_dioph
from .ratio import format_rational, parse_rational
from .surface import (
    GramConfig,
    candidate_invariants,
    candidate_to_dict,
    dp_data,
    gram_determinant,
)


def _json_dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=None)


def _parse_sings(text: str) -> list[str]:
    """Split a comma-separated list of chains, respecting brackets."""
    parts: list[str] = []
    depth = 0
    cur: list[str] = []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur).strip())
    return [p for p in parts if p]


def _report_records(report: PipelineReport) -> list[dict]:
    """Flat records carrying the stage and survivor data of a report."""
    records = [
        {"section": "stage", "name": name, "value": str(count)}
        for name, count in report.stages
    ]
    for surv in report.survivors:
        rec = {"section": "survivor"}
        for key, val in surv.items():
            if isinstance(val, list):
                rec[key] = "+".join(str(v) for v in val)
            elif isinstance(val, bool):
                rec[key] = str(val).lower()
            else:
                rec[key] = str(val)
        records.append(rec)
    records.append(
        {"section": "summary", "name": "matches_fixture",
         "value": str(report.matches_fixture).lower()}
    )
    return records


def _emit_report(report: PipelineReport, fmt: str) -> None:
    if fmt == "json":
        print(_json_dump(report.to_dict()))
        return
    if fmt == "csv":
        records = _report_records(report)
        fields: list[str] = []
        for rec in records:
            for key in rec:
                if key not in fields:
                    fields.append(key)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, restval="")
        writer.writeheader()
        writer.writerows(records)
        sys.stdout.write(buf.getvalue())
        return
    print(f"pipeline: {report.pipeline}")
    for name, count in report.stages:
        print(f"  stage {name}: {count}")
    if report.survivors:
        print("  survivors:")
        for surv in report.survivors:
            no = f"#{surv['no']} " if surv.get("no") else ""
            if "sings" in surv:
                print(
                    f"    {no}{'+'.join(surv['sings'])}  K^2={surv.get('ks2')}"
                    f" {surv.get('cmp', '')} 3e_orb={surv.get('three_e_orb')}"
                    f"  D={surv.get('D')}"
                )
            else:
                print(f"    {no}{_json_dump(surv)}")
    if report.mismatches:
        print("  mismatches:")
        for m in report.mismatches:
            print(f"    {m}")
    print(f"  matches_fixture: {report.matches_fixture}")


def _cmd_cf_info(args) -> int:
    cf = parse_cf(args.cf)
    if not cf.entries:
        print("cf: [] (order 1, no singularity)")
        return 0
    info = dp_data(cf)
    if args.format == "json":
        print(
            _json_dump(
                {
                    "entries": list(cf.entries),
                    "q": cf.q,
                    "q1": cf.q1,
                    "ql": cf.ql,
                    "u": list(cf.u_seq),
                    "v": list(cf.v_seq),
                    "dp_coeffs": [format_rational(c) for c in info.dp_coeffs],
                    "dp_dot_k": format_rational(info.dp_dot_k),
                    "dp_sq": format_rational(info.dp_sq),
                    "ep_sq": format_rational(info.ep_sq),
                }
            )
        )
        return 0
    print(f"cf: {cf}")
    print(f"q: {cf.q}  q1: {cf.q1}  ql: {cf.ql}")
    print("u:", " ".join(str(x) for x in cf.u_seq))
    print("v:", " ".join(str(x) for x in cf.v_seq))
    print("dp_coeffs:", " ".join(format_rational(c) for c in info.dp_coeffs))
    print(
        f"dp_dot_k: {format_rational(info.dp_dot_k)}  "
        f"dp_sq: {format_rational(info.dp_sq)}  "
        f"ep_sq: {format_rational(info.ep_sq)}"
    )
    return 0


def _cmd_candidate(args) -> int:
    sings = _parse_sings(args.sings)
    cand = candidate_invariants(sings, c=args.c)
    print(_json_dump(candidate_to_dict(cand)))
    return 0


def _cmd_enumerate(args) -> int:
    report = run_pipeline(args.pipeline, cap=args.cap, threads=args.threads)
    _emit_report(report, args.format)
    return 0 if report.matches_fixture else 1


def _cmd_verify(args) -> int:
    ok = True
    for name in ("table1", "q20", "small-q", "l11", "step5", "step6"):
        report = run_pipeline(name, threads=args.threads)
        status = "OK" if report.matches_fixture else "MISMATCH"
        stages = ", ".join(f"{n}={c}" for n, c in report.stages)
        print(f"{status:8s} pipeline {name}: {stages}")
        for m in report.mismatches:
            print(f"         {m}")
        ok = ok and report.matches_fixture

    report = run_pipeline("noA2", cap=args.cap, threads=args.threads)
    status = "OK" if report.matches_fixture else "MISMATCH"
    stages = ", ".join(f"{n}={c}" for n, c in report.stages)
    print(f"{status:8s} pipeline noA2 (cap {args.cap}): {stages}")
    for m in report.mismatches:
        print(f"         {m}")
    ok = ok and report.matches_fixture

    gram_ok = True
    for cfg in load_fixtures()["gram"]:
        g = GramConfig(
            tuple(cfg["diag"]), {tuple(e): 1 for e in map(tuple, cfg["edges"])}
        )
        det = gram_determinant(g)
        want_abs = cfg.get("abs_det")
        good = det == cfg["det"] if "det" in cfg else abs(det) == want_abs
        if not good:
            print(f"MISMATCH gram {cfg['name']}: det {det}")
            gram_ok = False
    if gram_ok:
        print("OK       gram determinants: all reference configurations")
    ok = ok and gram_ok

    for result in run_all_checks():
        status = "OK" if result.ok else "FAIL"
        print(f"{status:8s} property {result.name}: {result.detail}")
        ok = ok and result.ok

    print("verified" if ok else "verification mismatches found")
    return 0 if ok else 1


def _cmd_dioph(args) -> int:
    coeffs = tuple(parse_rational(tok) for tok in args.coeffs.split(","))
    quad = None
    if args.quad:
        quad = tuple(parse_rational(tok) for tok in args.quad.split(","))
    problem = DiophProblem(
        coeffs=coeffs,
        target=parse_rational(args.target),
        quad_coeffs=quad,
        quad_bound=parse_rational(args.quad_bound) if args.quad_bound else None,
    )
    sols = solve_dioph(problem)
    print(_json_dump([list(s) for s in sols]))
    return 0


def _cmd_gram(args) -> int:
    diag = tuple(int(tok) for tok in args.diag.split(","))
    off: dict[tuple[int, int], int] = {}
    if args.edges:
        for tok in args.edges.split(","):
            pair, _, weight = tok.partition(":")
            i, j = pair.split("-")
            a, b = int(i) - 1, int(j) - 1
            off[(min(a, b), max(a, b))] = int(weight) if weight else 1
    print(gram_determinant(GramConfig(diag, off)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhpp",
        description=(
            "Exact-rational toolkit for Q-homology projective planes with "
            "cyclic quotient singularities."
        ),
        epilog=f"Reference tables can be overridden via the {ENV_VAR} environment variable.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cf-info", help="inspect a Hirzebruch-Jung continued fraction")
    p.add_argument("cf", help="chain like [3,2,2] or fraction like 19/9")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(fn=_cmd_cf_info)

    p = sub.add_parser("candidate", help="invariants of a surface candidate")
    p.add_argument("--sings", required=True, help='e.g. "[2],[2,2],[7],[13]"')
    p.add_argument("--c", type=int, default=1, help="index of the primitive closure")
    p.set_defaults(fn=_cmd_candidate)

    p = sub.add_parser("enumerate", help="run one enumeration pipeline")
    p.add_argument("--pipeline", required=True, choices=sorted(PIPELINES))
    p.add_argument("--cap", type=int, default=None, help="order cap for the noA2 scan")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(fn=_cmd_enumerate)

    p = sub.add_parser("verify", help="run every pipeline and property suite")
    p.add_argument("--all", action="store_true", required=True)
    p.add_argument("--cap", type=int, default=500, help="order cap for the noA2 scan")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("dioph", help="solve a bounded linear Diophantine problem")
    p.add_argument("--coeffs", required=True, help="comma-separated positive rationals")
    p.add_argument("--target", required=True)
    p.add_argument("--quad", default=None, help="quadratic filter coefficients")
    p.add_argument("--quad-bound", default=None)
    p.set_defaults(fn=_cmd_dioph)

    p = sub.add_parser("gram", help="determinant of an intersection configuration")
    p.add_argument("--diag", required=True, help="self-intersections, e.g. -1,-2,-3,-5")
    p.add_argument(
        "--edges",
        default="",
        help="1-based intersecting pairs, e.g. 1-2,1-3,1-4 (optional :weight)",
    )
    p.set_defaults(fn=_cmd_gram)
    return parser


_VALUE_FLAGS = {"--diag", "--edges", "--coeffs", "--target", "--quad", "--quad-bound"}


def _merge_negative_values(argv: list[str]) -> list[str]:
    """Join flag values that start with a minus sign (e.g. --diag -1,-2)."""
    out: list[str] = []
    skip = False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            nxt = argv[i + 1]
            if len(nxt) > 1 and (nxt[1].isdigit() or nxt[1] == "."):
                out.append(f"{tok}={nxt}")
                skip = True
                continue
        out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        args = parser.parse_args(_merge_negative_values(argv))
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.fn(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
