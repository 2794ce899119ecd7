from __future__ import annotations

import dataclasses
import json
import random

import pytest

from asm_galois import classify as K
from asm_galois.automorphisms import FQ, FQ_C2, FQSTAR_C2
from asm_galois.errors import CountMismatch, FalsePositive
from asm_galois.projection import NON_GALOIS, line_class
from conftest import analyzer_for, curve_for


@pytest.mark.parametrize("q,c,want", [(3, 1, (2, 9, 2)), (4, 1, (3, 16, 2)), (5, 2, (4, 25, 2))])
def test_plane_counts(q, c, want):
    sec = K.classify_plane_lines(curve_for(q, c))
    assert (sec["counts"][FQ_C2], sec["counts"][FQSTAR_C2], sec["counts"][FQ]) == want
    assert sec["total"] == q * q + q + 1 == sum(want)
    assert all(r["is_galois"] for r in sec["rows"])


@pytest.mark.parametrize("q", [3, 4, 5])
def test_counts_do_not_depend_on_c(q):
    C = curve_for(q)
    counts = {tuple(sorted(K.classify_plane_lines(curve_for(q, c.n))["counts"].items()))
              for c in C.F.nonzero()}
    assert len(counts) == 1


def test_summary_line():
    assert K.summary_line({FQ_C2: 2, FQSTAR_C2: 9, FQ: 2}).startswith("2 + 9 + 2 = 13 lines, all Galois")


def test_count_mismatch(monkeypatch):
    monkeypatch.setattr(K, "expected_counts", lambda q: {FQ_C2: 0, FQSTAR_C2: 0, FQ: 0})
    with pytest.raises(CountMismatch):
        K.classify_plane_lines(curve_for(3))


def test_false_positive_is_fatal():
    real = analyzer_for(3)

    class Liar:
        def analyze(self, L):
            return dataclasses.replace(real.analyze(L), is_galois=True)

    with pytest.raises(FalsePositive):
        K.negative_scan(curve_for(3), 4, seed=0, analyzer=Liar(), threads=1)


def test_negative_lines_are_outside_families():
    C = curve_for(4)
    lines = K.negative_lines(C, 40, seed=2)
    assert len({L for _, L in lines}) == 40
    assert all(line_class(C, L)[0] == NON_GALOIS for _, L in lines)
    assert {s for s, _ in lines} == set(K.STRATEGIES)


def test_negative_scan_small():
    sec = K.negative_scan(curve_for(3), 40, seed=9, analyzer=analyzer_for(3), threads=1)
    assert sec["count"] == 40 and sec["all_non_galois"]
    assert all(not r["is_galois"] for r in sec["rows"])


def test_disjoint_strategy_really_disjoint():
    C = curve_for(3)
    for _, L in K.negative_lines(C, 10, seed=4, strategies=("disjoint",)):
        pts, expected = C.intersection_data(L)
        assert pts == [] and expected == 0


def test_type_b_scan():
    C = curve_for(3)
    a = K.sample_ruling_params(C, 6, random.Random(1))
    assert {C.level(v.ctx) for v in a} == {1, 2, 3}
    sec = K.scan_type_b(C, a, analyzer_for(3), threads=1)
    assert sec["all_ok"]
    assert all(r["equals_G_L2"] for r in sec["rows"] if r["family"] == "y")
    assert all(r["equals_G_L1"] for r in sec["rows"] if r["family"] == "x")
    tangent = [r for r in sec["rows"] if "tangent" in r]
    assert tangent and all(r["tangent"] for r in tangent)


def test_tangent_line_at_P_alpha():
    C = curve_for(5)
    from asm_galois.curve import CurvePoint
    for a in C.F.elements():
        assert K.tangent_line(C, CurvePoint.P(a)) == K.ruling_line(a, "y")


def test_section_checks():
    C = curve_for(3)
    a = K.sample_ruling_params(C, 9, random.Random(2))
    sec = K.section_scan(C, a)
    assert sec["all_ok"] and sec["checked"] >= 6
    assert {r["case"] for r in sec["rows"]} == {"tangent", "collinear"}


def test_parallel_map_preserves_order(monkeypatch):
    monkeypatch.setenv("ASM_GALOIS_THREADS", "3")
    assert K.pool_size() == 3
    assert K.parallel_map(lambda x: x * x, list(range(20))) == [x * x for x in range(20)]


def test_report_is_deterministic_across_threads():
    a = json.dumps(K.build_report(3, 1, seed=5, full=True, n_negative=20, threads=1), sort_keys=True)
    b = json.dumps(K.build_report(3, 1, seed=5, full=True, n_negative=20, threads=3), sort_keys=True)
    assert a == b
    rep = json.loads(a)
    assert rep["schema"] == 1 and rep["params"]["seed"] == 5
    assert rep["properties"]["aut"]["order"] == 36
