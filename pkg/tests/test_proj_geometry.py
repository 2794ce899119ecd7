from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from asm_galois.errors import CoincidentPoints, ContextMismatch, DegenerateSubspace
from asm_galois.finite_field import FieldTower, build_field
from asm_galois.proj_geometry import (
    Hyperplane,
    Line3,
    ProjPoint3,
    enumerate_hyperplanes,
    enumerate_lines,
    enumerate_plane_fq_lines,
    enumerate_points,
    incidence,
    is_fq_line,
    line_through,
    nullspace,
    rank,
    rref,
)


@pytest.mark.parametrize("p,e", [(2, 1), (3, 1), (2, 2)])
def test_point_and_line_counts(p, e):
    F = build_field(p, e)
    q = F.cardinality
    pts = list(enumerate_points(F))
    assert len(pts) == len(set(pts)) == q**3 + q**2 + q + 1
    lines = enumerate_lines(F)
    assert len(lines) == len(set(lines)) == (q * q + 1) * (q * q + q + 1)


def test_lines_match_point_pair_oracle():
    F = build_field(3, 1)
    pts = list(enumerate_points(F))
    from_pairs = {line_through(a, b) for a, b in itertools.combinations(pts, 2)}
    assert from_pairs == set(enumerate_lines(F))


def test_every_line_has_q_plus_one_points():
    F = build_field(3, 1)
    for L in enumerate_lines(F)[:40]:
        pts = set(L.rational_points())
        assert len(pts) == 4
        assert all(L.contains(P) for P in pts)


@pytest.mark.parametrize("p,e", [(3, 1), (2, 2), (5, 1)])
def test_plane_lines(p, e):
    F = build_field(p, e)
    q = F.cardinality
    Z = Hyperplane.of(F, 0, 0, 1, 0)
    lines = enumerate_plane_fq_lines(F)
    assert len(lines) == len(set(lines)) == q * q + q + 1
    assert all(L.inside(Z) for L in lines)
    assert lines == sorted(lines, key=Line3.key)


def test_canonical_form_is_basis_independent():
    F = build_field(5, 1)
    rng = random.Random(3)
    for L in enumerate_lines(F)[::37]:
        for _ in range(5):
            a, b, c, d = (F.random(rng) for _ in range(4))
            if a * d == b * c:
                continue
            h1 = [a * x + b * y for x, y in zip(L.H1.coeffs, L.H2.coeffs)]
            h2 = [c * x + d * y for x, y in zip(L.H1.coeffs, L.H2.coeffs)]
            assert Line3(h1, h2) == L


def test_rref_rank_nullspace():
    F = build_field(3, 1)
    rows = [[F(1), F(2), F(0)], [F(2), F(1), F(0)], [F(0), F(0), F(1)]]
    red, piv = rref(rows)
    assert rank(rows) == len(piv)
    ker = nullspace(rows, 3, F)
    for v in ker:
        for r in rows:
            assert sum((a * b for a, b in zip(r, v)), F.zero).is_zero()
    assert len(ker) == 3 - rank(rows)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 8), min_size=12, max_size=12))
def test_rank_nullity_f9(vals):
    F = build_field(3, 2)
    rows = [[F.from_int(v) for v in vals[i:i + 4]] for i in (0, 4, 8)]
    assert rank(rows) + len(nullspace(rows, 4, F)) == 4


def test_degenerate_inputs():
    F = build_field(3, 1)
    with pytest.raises(DegenerateSubspace):
        Line3.of(F, [1, 0, 0, 0], [2, 0, 0, 0])
    with pytest.raises(DegenerateSubspace):
        ProjPoint3.of(F, 0, 0, 0, 0)
    P = ProjPoint3.of(F, 1, 0, 0, 0)
    with pytest.raises(CoincidentPoints):
        line_through(P, ProjPoint3.of(F, 2, 0, 0, 0))


def test_incidence_and_context():
    F = build_field(3, 1)
    K = FieldTower(3, 1).field(2)
    L = Line3.of(F, [1, 0, 0, 0], [0, 0, 1, 0])
    P = ProjPoint3.of(F, 0, 1, 0, 2)
    assert incidence(P, L) and incidence(L, P)
    assert incidence(L, Hyperplane.of(F, 1, 0, 1, 0))
    assert not incidence(L, Hyperplane.of(F, 0, 1, 0, 0))
    with pytest.raises(ContextMismatch):
        incidence(ProjPoint3.of(K, 0, 1, 0, 0), L)
    with pytest.raises(TypeError):
        incidence(P, P)


def test_lift_and_rationality():
    T = FieldTower(3, 1)
    K = T.field(2)
    L = Line3.of(T.base, [1, 0, 0, 0], [0, 0, 1, 0])
    LK = L.lift(T, K)
    assert is_fq_line(LK, 3)
    u = next(v for v in K.elements() if v**3 != v)
    M = Line3([K.one, -u, K.zero, K.zero], [K.zero, K.zero, K.one, K.zero])
    assert not is_fq_line(M, 3)


def test_hyperplane_count_and_json():
    F = build_field(2, 1)
    assert len(list(enumerate_hyperplanes(F))) == 15
    L = Line3.of(F, [1, 0, 0, 0], [0, 0, 1, 0])
    assert L.to_json() == {"H1": [[1], [0], [0], [0]], "H2": [[0], [0], [1], [0]]}
    assert L.equations() == "X = 0, Z = 0"
