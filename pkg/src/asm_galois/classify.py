"""Classification driver: plane lines, the ruling family, negative scans and reports."""

from __future__ import annotations

import logging
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Callable, Iterable, Sequence

from . import __version__
from .automorphisms import FQ, FQ_C2, FQSTAR_C2, act_on_point, enumerate_aut
from .curve import ASMCurve, CurvePoint
from .errors import CountMismatch, FalsePositive
from .finite_field import FieldElement
from .proj_geometry import (
    Hyperplane,
    Line3,
    ProjPoint3,
    enumerate_plane_fq_lines,
    is_fq_line,
    line_through,
    rank,
)
from .projection import (
    NON_GALOIS,
    TANGENT_B,
    GaloisAnalysis,
    GaloisAnalyzer,
    line_class,
)

log = logging.getLogger("asm_galois")

SCHEMA_VERSION = 1
STRATEGIES = ("secant", "one-point", "disjoint", "plane-nonrational")


def pool_size() -> int:
    env = os.environ.get("ASM_GALOIS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def parallel_map(fn: Callable, items: Sequence, threads: int | None = None) -> list:
    """Order-preserving map over a thread pool."""
    threads = pool_size() if threads is None else threads
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _row(an: GaloisAnalysis) -> dict:
    return {
        "line": an.line.equations(),
        "H1": an.line.H1.to_json(),
        "H2": an.line.H2.to_json(),
        "H1_packed": [v.n for v in an.line.H1.coeffs],
        "H2_packed": [v.n for v in an.line.H2.coeffs],
        "degree": an.degree,
        "stabilizer_order": an.stabilizer_order,
        "group_type": an.group_type,
        "is_galois": an.is_galois,
        "classification": an.classification,
    }


def expected_counts(q: int) -> dict:
    return {FQ_C2: q - 1, FQSTAR_C2: q * q, FQ: 2}


# -- plane lines ---------------------------------------------------------------

def classify_plane_lines(curve: ASMCurve, analyzer: GaloisAnalyzer | None = None,
                         threads: int | None = None) -> dict:
    """Analyse every F_q-line of {Z = 0}; raises CountMismatch on any deviation."""
    A = analyzer or GaloisAnalyzer(curve)
    q = curve.q
    lines = enumerate_plane_fq_lines(curve.F)
    analyses = parallel_map(A.analyze, lines, threads)
    counts = {FQ_C2: 0, FQSTAR_C2: 0, FQ: 0}
    for an in analyses:
        if not an.is_galois:
            raise CountMismatch(f"plane line {an.line} is not Galois (q={q})")
        if an.group_type not in counts:
            raise CountMismatch(f"plane line {an.line} has group {an.group_type}")
        counts[an.group_type] += 1
    want = expected_counts(q)
    if counts != want or len(lines) != q * q + q + 1:
        raise CountMismatch(f"counts {counts} differ from {want}")
    return {
        "rows": [_row(an) for an in analyses],
        "counts": counts,
        "total": len(lines),
        "all_galois": True,
    }


def summary_line(counts: dict) -> str:
    a, b, c = counts[FQ_C2], counts[FQSTAR_C2], counts[FQ]
    return f"{a} + {b} + {c} = {a + b + c} lines, all Galois, matches the expected (q-1) + q^2 + 2 count"


# -- the ruling family -----------------------------------------------------------

def ruling_line(a: FieldElement, family: str) -> Line3:
    """{W - aX = Y - aZ = 0} for family 'y', {W - aY = X - aZ = 0} for 'x'."""
    K = a.ctx
    z, one = K.zero, K.one
    if family == "y":
        return Line3([-a, z, z, one], [z, one, -a, z])
    if family == "x":
        return Line3([z, -a, z, one], [one, z, -a, z])
    raise ValueError(f"unknown family {family!r}")


def sample_ruling_params(curve: ASMCurve, n: int, rng: random.Random) -> list[FieldElement]:
    """n values of a split across F_q, F_{q^2} \\ F_q and F_{q^3} \\ F_q."""
    out: list[FieldElement] = []
    F = curve.F
    per = max(1, n // 3)
    out += [F.random(rng) for _ in range(per)]
    for k in (2, 3):
        K = curve.field(k)
        want = per if k == 2 else n - len(out)
        while want > 0:
            a = K.random(rng)
            if not curve.is_in_fq(a):
                out.append(a)
                want -= 1
    return out


def L1(curve: ASMCurve) -> Line3:
    return Line3.of(curve.F, [0, 1, 0, 0], [0, 0, 1, 0])


def L2(curve: ASMCurve) -> Line3:
    return Line3.of(curve.F, [1, 0, 0, 0], [0, 0, 1, 0])


def scan_type_b(curve: ASMCurve, a_samples: Iterable[FieldElement],
                analyzer: GaloisAnalyzer | None = None, threads: int | None = None) -> dict:
    A = analyzer or GaloisAnalyzer(curve)
    G = {"y": A.stabilizer(L2(curve)), "x": A.stabilizer(L1(curve))}
    jobs = [(a, fam) for a in a_samples for fam in ("y", "x")]

    def one(job):
        a, fam = job
        an = A.analyze(ruling_line(a, fam))
        row = _row(an)
        row.update({
            "a": a.coords,
            "a_level": curve.level(a.ctx),
            "family": fam,
            "equals_G_L2": an.stabilizer == G["y"],
            "equals_G_L1": an.stabilizer == G["x"],
            "unresolved_multiplicity": an.unresolved,
        })
        row["expected_group"] = "G_L2" if fam == "y" else "G_L1"
        ok = an.is_galois and an.degree == curve.q and an.group_type == FQ
        ok = ok and row["equals_" + row["expected_group"]]
        if curve.is_in_fq(a):
            P = CurvePoint.P(curve.to_fq(a)) if fam == "y" else CurvePoint.Q(curve.to_fq(a))
            row["tangent"] = an.intersections == [(P, curve.q)]
            ok = ok and row["tangent"] and an.classification == TANGENT_B
        else:
            row["intersection_count"] = len(an.intersections)
        row["ok"] = bool(ok)
        return row

    rows = parallel_map(one, jobs, threads)
    return {"rows": rows, "all_ok": all(r["ok"] for r in rows)}


# -- negative scan ---------------------------------------------------------------

def _random_point(ctx, rng: random.Random) -> ProjPoint3:
    while True:
        v = [ctx.random(rng) for _ in range(4)]
        if any(v):
            return ProjPoint3(v)


def _candidate(curve: ASMCurve, strategy: str, rng: random.Random) -> Line3 | None:
    """One random line for a strategy, or None when the draw is degenerate."""
    K2 = curve.field(2)
    pts = curve.affine_points(2)
    if strategy == "secant":
        P, Q = rng.sample(pts, 2)
        return line_through(curve.embed(P), curve.embed(Q))
    if strategy == "one-point":
        P = rng.choice(pts)
        R = _random_point(K2, rng)
        if R == curve.embed(P):
            return None
        return line_through(curve.embed(P), R)
    if strategy == "disjoint":
        ctx = curve.F if rng.random() < 0.5 else K2
        A, B = _random_point(ctx, rng), _random_point(ctx, rng)
        return None if A == B else line_through(A, B)
    if strategy == "plane-nonrational":
        Z = [K2.zero, K2.zero, K2.one, K2.zero]
        h = [K2.random(rng), K2.random(rng), K2.zero, K2.random(rng)]
        if rank([Z, h]) < 2:
            return None
        L = Line3(Z, h)
        return None if is_fq_line(L, curve.q) else L
    raise ValueError(f"unknown strategy {strategy!r}")


def negative_lines(curve: ASMCurve, n: int, seed: int,
                   strategies: Sequence[str] = STRATEGIES,
                   patience: int = 400) -> list[tuple[str, Line3]]:
    """n seeded lines outside the Galois families, round-robin over strategies.

    A strategy that yields nothing new in `patience` consecutive draws is
    retired, since some pools are finite (plane lines over F_{q^2} at small q).
    """
    rng = random.Random(seed)
    out: list[tuple[str, Line3]] = []
    seen: set[Line3] = set()
    active = list(strategies)
    misses = {s: 0 for s in active}
    i = 0
    while len(out) < n and active:
        strategy = active[i % len(active)]
        L = _candidate(curve, strategy, rng)
        good = L is not None and L not in seen and line_class(curve, L)[0] == NON_GALOIS
        if good and strategy == "disjoint":
            pts, _ = curve.intersection_data(L)
            good = not pts and not L.inside(Hyperplane.of(L.ctx, 0, 0, 1, 0))
        if not good:
            misses[strategy] += 1
            if misses[strategy] >= patience:
                log.info("strategy %s exhausted after %d lines", strategy,
                         sum(1 for s, _ in out if s == strategy))
                active.remove(strategy)
            continue
        misses[strategy] = 0
        seen.add(L)
        out.append((strategy, L))
        i += 1
    return out


def negative_scan(curve: ASMCurve, n: int, seed: int, strategies: Sequence[str] = STRATEGIES,
                  analyzer: GaloisAnalyzer | None = None, threads: int | None = None) -> dict:
    """Every line outside the families must test non-Galois; raises FalsePositive."""
    A = analyzer or GaloisAnalyzer(curve)
    lines = negative_lines(curve, n, seed, strategies)
    analyses = parallel_map(lambda sl: A.analyze(sl[1]), lines, threads)
    rows = []
    single_point = 0
    for (strategy, _), an in zip(lines, analyses):
        if an.is_galois:
            raise FalsePositive(f"line {an.line} ({strategy}) tests Galois")
        if an.degree == 2 * curve.q - 1:
            single_point += 1
        row = _row(an)
        row["strategy"] = strategy
        rows.append(row)
    by_strategy = {s: sum(1 for r in rows if r["strategy"] == s) for s in strategies}
    return {"rows": rows, "count": len(rows), "by_strategy": by_strategy,
            "degree_2q_minus_1": single_point, "all_non_galois": True}


# -- hyperplane sections {Y = aZ} ----------------------------------------------------

def tangent_line(curve: ASMCurve, P: CurvePoint) -> Line3:
    """Span of phi(P) and the first independent derivative of its expansion."""
    exp = curve.local_expansion(P)
    base = [s[0] for s in exp.series]
    for i in range(1, exp.precision):
        d = [s[i] for s in exp.series]
        if rank([base, d]) == 2:
            return line_through(ProjPoint3(base), ProjPoint3(d))
    raise ArithmeticError(f"no tangent direction at {P} within precision")


def section_check(curve: ASMCurve, a: FieldElement) -> dict:
    """Inspect {Y - aZ = 0} against the curve.

    a in F_q: the hyperplane contains the tangent line at P_a.
    otherwise: the section off the poles of x is q points on {W - aX = Y - aZ = 0}.
    """
    K = a.ctx
    H = Hyperplane([K.zero, K.one, -a, K.zero])
    row: dict = {"a": a.coords, "a_level": curve.level(K)}
    if curve.is_in_fq(a):
        T = tangent_line(curve, CurvePoint.P(curve.to_fq(a)))
        row["case"] = "tangent"
        row["ok"] = T.lift(curve.tower, K).inside(H)
        return row
    row["case"] = "collinear"
    predicted = ruling_line(a, "y")
    j = curve.level(K)
    pts: list[CurvePoint] = []
    for m in range(1, curve.k_max + 1):
        k = j * m
        if curve.q**k > curve.search_bound or not curve.tower.can_build(k):
            break
        pts = curve.solve_affine_points(("y", curve.lift(a, curve.field(k))), k)
        if pts:
            break
    if not pts:
        row["ok"] = None  # roots lie beyond the searched fields
        return row
    ctx = pts[0].ctx
    Lk = predicted.lift(curve.tower, ctx)
    Hk = H.lift(curve.tower, ctx)
    images = [curve.embed(P, ctx) for P in pts]
    row["points"] = len(set(images))
    row["ok"] = (len(set(images)) == curve.q
                 and all(Hk.contains(v) and Lk.contains(v) for v in images))
    return row


def section_scan(curve: ASMCurve, a_samples: Iterable[FieldElement]) -> dict:
    rows = [section_check(curve, a) for a in a_samples]
    checked = [r for r in rows if r["ok"] is not None]
    return {"rows": rows, "checked": len(checked), "unresolved": len(rows) - len(checked),
            "all_ok": all(r["ok"] for r in checked)}


# -- property suite ------------------------------------------------------------------

def aut_properties(curve: ASMCurve) -> dict:
    """Order, closure and faithfulness on the points at infinity."""
    G = enumerate_aut(curve.F, pairwise=curve.q <= 4)
    inf = curve.infinite_points()
    images = {tuple(act_on_point(s, P, curve) for P in inf) for s in G}
    q = curve.q
    return {"order": G.order, "expected_order": 2 * q * q * (q - 1),
            "faithful_on_infinity": len(images) == G.order,
            "generators": [g.to_json() for g in G.generators]}


def ramification_suite(curve: ASMCurve, lines: Sequence[Line3], seed: int, n_bases: int = 10,
                       analyzer: GaloisAnalyzer | None = None) -> dict:
    A = analyzer or GaloisAnalyzer(curve)
    rng = random.Random(seed)
    rows = []
    for L in lines:
        k = A.fiber_level(L)
        bases = A.sample_bases(L, k, n_bases, rng)
        rows.append(A.ramification_consistency(L, bases, k))
    return {"rows": rows, "all_ok": all(r["ok"] for r in rows)}


def kernel_vs_pointwise(curve: ASMCurve, pairs: Sequence[tuple], analyzer: GaloisAnalyzer | None = None) -> dict:
    """Agreement of the quadric-kernel and pointwise commutation tests."""
    A = analyzer or GaloisAnalyzer(curve)
    points: dict = {}
    disagree = []
    for sigma, L in pairs:
        pts = points.get(L)
        if pts is None:
            pts = points[L] = A.pointwise_points(L)
        if A.commutes_with_projection(sigma, L) != A.commutes_pointwise(sigma, L, pts):
            disagree.append({"sigma": sigma.to_json(), "line": L.equations()})
    return {"pairs": len(pairs), "disagreements": disagree, "agree": not disagree}


# -- full report ---------------------------------------------------------------------

@contextmanager
def _timed(what: str):
    t = time.perf_counter()
    yield
    log.info("%s took %.2fs", what, time.perf_counter() - t)


def build_report(q: int, c: int = 1, seed: int = 0, full: bool = False, n_type_b: int = 21,
                 n_negative: int = 100, threads: int | None = None) -> dict:
    """Deterministic report; wall-clock timing goes to the log, not the report."""
    curve = ASMCurve(q, c)
    A = GaloisAnalyzer(curve)
    report: dict = {
        "schema": SCHEMA_VERSION,
        "params": {
            "p": curve.p, "q": q, "c": curve.c.coords, "seed": seed,
            "version": __version__,
            "moduli": {str(k): curve.field(k).describe()["modulus"] for k in (1, 2, 3)},
        },
    }
    with _timed(f"plane lines q={q} c={c}"):
        report["type_a"] = classify_plane_lines(curve, A, threads)
    if full:
        rng = random.Random(seed)
        a_samples = sample_ruling_params(curve, n_type_b, rng)
        with _timed(f"{len(a_samples)} ruling parameters"):
            report["type_b"] = scan_type_b(curve, a_samples, A, threads)
        with _timed(f"negative scan of {n_negative} lines"):
            report["negative"] = negative_scan(curve, n_negative, seed, analyzer=A, threads=threads)
        with _timed("section checks"):
            report["sections"] = section_scan(curve, a_samples)
        galois_lines = [L1(curve), L2(curve)] + enumerate_plane_fq_lines(curve.F)[:3]
        with _timed("property suites"):
            report["properties"] = {
                "aut": aut_properties(curve),
                "quadric_space_dim": A.quadric_space_dim,
                "ramification": ramification_suite(curve, galois_lines, seed, analyzer=A),
            }
    return report


def report_rows(report: dict) -> list[dict]:
    rows = list(report["type_a"]["rows"])
    for section in ("type_b", "negative"):
        if section in report:
            rows += report[section]["rows"]
    return rows
