"""Command-line interface: classify, check-line, fiber, aut, report.

Field elements are written as packed integers: the base-p digits of the
coordinate vector in the power basis of the defining modulus (so for q = 9,
"4" is w + 1).  Exit codes: 0 success, 1 verdict failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from typing import Sequence

from .automorphisms import enumerate_aut
from .classify import build_report, classify_plane_lines, report_rows, summary_line
from .curve import ASMCurve
from .errors import AsmGaloisError, VerdictFailure
from .proj_geometry import Line3
from .projection import GaloisAnalyzer

log = logging.getLogger("asm_galois")

CSV_COLUMNS = ("line_h1", "line_h2", "degree", "stab_order", "group_type", "is_galois", "classification")


class UsageError(Exception):
    pass


def _curve(args, c: int | None = None) -> ASMCurve:
    c = args.c if c is None else c
    if args.q == 2:
        raise UsageError("q = 2 is not supported: the curve family needs q >= 3")
    if not 0 < c < max(args.q, 2):
        raise UsageError(f"--c must be a nonzero element of F_q, i.e. in [1, {args.q})")
    try:
        return ASMCurve(args.q, c)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _elements(text: str, n: int, ctx) -> list:
    try:
        vals = [int(v) for v in text.replace(";", ",").split(",")]
    except ValueError:
        raise UsageError(f"expected {n} comma-separated integers, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"expected {n} values, got {len(vals)} in {text!r}")
    if any(v < 0 or v >= ctx.cardinality for v in vals):
        raise UsageError(f"values must lie in [0, {ctx.cardinality}) for F_{ctx.cardinality}")
    return [ctx.from_int(v) for v in vals]


def _line(curve: ASMCurve, h1: str, h2: str, ext: int) -> Line3:
    ctx = curve.field(ext)
    try:
        return Line3(_elements(h1, 4, ctx), _elements(h2, 4, ctx))
    except AsmGaloisError as exc:
        raise UsageError(f"not a line: {exc}") from None


def _table(rows: Sequence[Sequence], header: Sequence[str]) -> str:
    cells = [list(map(str, header))] + [list(map(str, r)) for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


# -- subcommands -------------------------------------------------------------------

def cmd_classify(args) -> int:
    curve = _curve(args)
    section = classify_plane_lines(curve)
    rows = [(r["line"], r["degree"], r["stabilizer_order"], r["group_type"]) for r in section["rows"]]
    print(f"F_{curve.q}-lines of the plane Z = 0 (q={curve.q}, c={curve.c})")
    print(_table(rows, ("line", "degree", "|G|", "group")))
    print(summary_line(section["counts"]))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"schema": 1, "params": curve.describe(), "type_a": section}, fh,
                      indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_check_line(args) -> int:
    curve = _curve(args)
    L = _line(curve, args.h1, args.h2, args.ext)
    an = GaloisAnalyzer(curve).analyze(L)
    verdict = "Galois" if an.is_galois else "not Galois"
    print(f"line: {L.equations()}")
    print(f"verdict: {verdict}")
    print(f"degree: {an.degree}")
    print(f"stabilizer order: {an.stabilizer_order}")
    gtype = an.group_type.replace("F_q", f"F_{curve.q}") if an.group_type != "trivial" else "trivial"
    print(f"group: {gtype}")
    print(f"classification: {an.classification}")
    for P, m in an.intersections:
        print(f"meets curve at {P} with multiplicity {m}")
    if an.unresolved:
        print(f"further intersection multiplicity {an.unresolved} lies beyond the searched fields")
    if args.json:
        print(json.dumps(an.to_json(curve.tower), sort_keys=True))
    return 0


def cmd_fiber(args) -> int:
    curve = _curve(args)
    if ";" not in args.line:
        raise UsageError("--line takes 'h1;h2', e.g. '1,0,0,0;0,0,1,0'")
    h1, h2 = args.line.split(";", 1)
    L = _line(curve, h1, h2, args.line_ext)
    if args.ext % args.line_ext:
        raise UsageError("--ext must be a multiple of --line-ext")
    ctx = curve.field(args.ext)
    lam, mu = _elements(args.base.replace(":", ","), 2, ctx)
    if not (lam or mu):
        raise UsageError("(0:0) is not a point of P^1")
    A = GaloisAnalyzer(curve)
    fib = A.fiber(L, (lam, mu), args.ext)
    degree = A.projection_degree(L)[0]
    total = sum(f.ramification_index for f in fib)
    print(f"fiber of {L.equations()} over ({lam}:{mu}) in F_{curve.q}^{args.ext}")
    print(_table([(f.point, f.ramification_index) for f in fib], ("point", "e")))
    state = "complete" if total == degree else "incomplete (try a larger --ext)"
    print(f"sum of indices {total} of degree {degree}: {state}")
    return 0


def cmd_aut(args) -> int:
    curve = _curve(args, c=1)
    G = enumerate_aut(curve.F)
    print(f"Aut(X) for q={args.q}: order {G.order}")
    rows = [(g.gamma, g.a, g.b, g.swap, g.order()) for g in G.generators]
    print("generators (x, y) -> (gamma*x + a, y/gamma + b), swap exchanges x and y first")
    print(_table(rows, ("gamma", "a", "b", "swap", "order")))
    if args.table:
        print(_table([(g.gamma, g.a, g.b, g.swap, g.order()) for g in G], ("gamma", "a", "b", "swap", "order")))
    return 0


def _packed(values: Sequence[int]) -> str:
    return ",".join(map(str, values))


def _csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report_rows(report):
        w.writerow([_packed(r["H1_packed"]), _packed(r["H2_packed"]), r["degree"], r["stabilizer_order"],
                    r["group_type"], r["is_galois"], r["classification"]])
    return buf.getvalue()


def _text(report: dict) -> str:
    p = report["params"]
    out = [f"q={p['q']} c={p['c']} seed={p['seed']}"]
    out.append(summary_line(report["type_a"]["counts"]))
    if "type_b" in report:
        tb = report["type_b"]
        out.append(f"ruling family: {len(tb['rows'])} lines, all checks passed: {tb['all_ok']}")
        neg = report["negative"]
        out.append(f"negative scan: {neg['count']} lines, none Galois")
        sec = report["sections"]
        out.append(f"hyperplane sections: {sec['checked']} checked, all passed: {sec['all_ok']}")
        pr = report["properties"]
        out.append(f"Aut(X) order {pr['aut']['order']}, faithful on infinity: {pr['aut']['faithful_on_infinity']}")
        out.append(f"fiber consistency: {pr['ramification']['all_ok']}")
    return "\n".join(out) + "\n"


def cmd_report(args) -> int:
    _curve(args)
    report = build_report(args.q, args.c, seed=args.seed, full=args.full, n_negative=args.negatives)
    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    elif args.format == "csv":
        text = _csv(report)
    else:
        text = _text(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="asm-galois", description="Galois lines for the curve (x^q-x)(y^q-y)=c in P^3")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def curve_args(p):
        p.add_argument("--q", type=int, required=True)
        p.add_argument("--c", type=int, default=1, help="nonzero element of F_q as a packed integer")

    p = sub.add_parser("classify", help="classify the F_q-lines of Z = 0")
    curve_args(p)
    p.add_argument("--out", help="write the JSON section here")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("check-line", help="analyse one line")
    curve_args(p)
    p.add_argument("--h1", required=True, help="four coefficients of the first form (X,Y,Z,W)")
    p.add_argument("--h2", required=True)
    p.add_argument("--ext", type=int, default=1, help="coefficients lie in F_{q^ext}")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_check_line)

    p = sub.add_parser("fiber", help="fiber of a projection over a base point")
    curve_args(p)
    p.add_argument("--line", required=True, help="'h1;h2' coefficient lists")
    p.add_argument("--line-ext", type=int, default=1)
    p.add_argument("--base", required=True, help="'lam:mu'")
    p.add_argument("--ext", type=int, default=1, help="search F_{q^ext}")
    p.set_defaults(fn=cmd_fiber)

    p = sub.add_parser("aut", help="the automorphism group")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--table", action="store_true", help="list every element")
    p.set_defaults(fn=cmd_aut)

    p = sub.add_parser("report", help="reproducible report")
    curve_args(p)
    p.add_argument("--full", action="store_true", help="add ruling, negative and property sections")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--negatives", type=int, default=100)
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_report)
    return ap


def run_cli(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerdictFailure as exc:
        print(f"verdict failure: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
