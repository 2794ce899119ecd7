from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from asm_galois import series as S
from asm_galois.curve import ASMCurve, CurvePoint, on_quadric
from asm_galois.errors import (
    DegenerateConstraint,
    DivisionByZero,
    ExtensionBoundExceeded,
    NotOnHyperplane,
    PrecisionExhausted,
    PrecisionTooSmall,
)
from asm_galois.finite_field import build_field
from asm_galois.proj_geometry import Hyperplane, Line3, ProjPoint3, enumerate_hyperplanes
from conftest import curve_for
from oracles import brute_affine_points


# -- series ---------------------------------------------------------------------

def test_series_inverse_and_product():
    F = build_field(5, 1)
    rng = random.Random(0)
    for _ in range(20):
        a = [F.random(rng, nonzero=True)] + [F.random(rng) for _ in range(9)]
        prod = S.mul(a, S.inverse(a))
        assert prod == S.const(F.one, 10)
    with pytest.raises(DivisionByZero):
        S.inverse(S.monomial(F, 1, 5))


def test_series_artin_schreier_solves_equation():
    F = build_field(3, 2)
    rng = random.Random(1)
    for _ in range(20):
        s = [F.zero] + [F.random(rng) for _ in range(14)]
        u = S.artin_schreier(s, 3)
        assert S.sub(S.frobenius(u, 3), u) == s
    with pytest.raises(ValueError):
        S.artin_schreier(S.const(F.one, 4), 3)


def test_series_order():
    F = build_field(3, 1)
    assert S.order(S.monomial(F, 3, 6)) == 3
    with pytest.raises(PrecisionExhausted):
        S.order(S.zeros(F, 6))


# -- construction and points ------------------------------------------------------

def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        ASMCurve(2)
    with pytest.raises(ValueError):
        ASMCurve(6)
    with pytest.raises(ValueError):
        ASMCurve(3, 0)


@pytest.mark.parametrize("q,c,ks", [(3, 1, (1, 2, 3)), (3, 2, (2,)), (4, 1, (1, 2)), (5, 3, (1, 2))])
def test_affine_points_match_brute_force(q, c, ks):
    C = curve_for(q, c)
    for k in ks:
        assert {(P.x.n, P.y.n) for P in C.affine_points(k)} == brute_affine_points(C, k)


@pytest.mark.parametrize("q", [3, 4, 5, 7])
def test_point_counts(q):
    C = curve_for(q)
    # x^q - x vanishes on F_q, so no affine F_q-points
    assert C.affine_points(1) == []
    assert len(C.affine_points(2)) == (q - 1) * q * q
    assert len(C.infinite_points()) == 2 * q


def test_embedding_lands_on_quadric():
    C = curve_for(4)
    for P in C.all_points(2)[::7]:
        v = C.embed(P, C.field(2))
        assert on_quadric(v)
        assert C.point_from_proj(v) == C.lift_point(P, C.field(2)) or not P.is_affine


def test_point_from_proj_roundtrip():
    C = curve_for(3)
    for P in C.affine_points(2):
        assert C.point_from_proj(C.embed(P)) == P
    for P in C.infinite_points():
        assert C.point_from_proj(C.embed(P)) == P
    F = C.F
    assert C.point_from_proj(ProjPoint3.of(F, 1, 1, 1, 1)) is None


# -- local expansions and orders ----------------------------------------------------

@pytest.mark.parametrize("q", [3, 4, 5, 8, 9])
def test_expansions_satisfy_curve_equation(q):
    C = curve_for(q)
    pts = C.infinite_points() + C.affine_points(2)[:: max(1, len(C.affine_points(2)) // 10)]
    for P in pts:
        exp = C.local_expansion(P)
        assert all(r.is_zero() for r in C.expansion_residual(exp))
        base = [s[0] for s in exp.series]
        assert C.embed(P, base[0].ctx) == ProjPoint3(base)


def test_expansion_precision_guard(C3):
    with pytest.raises(PrecisionTooSmall):
        C3.local_expansion(C3.infinite_points()[0], 0)


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9])
def test_orders_at_infinity(q):
    """t = 1/x is a parameter at P_a with y - a of order q, so Z, W - aX, Y - aZ
    vanish to orders 1, q, q + 1."""
    C = curve_for(q)
    F = C.F
    for a in F.elements():
        P = CurvePoint.P(a)
        assert C.ord_hyperplane(P, Hyperplane.of(F, 0, 0, 1, 0)) == 1
        assert C.ord_hyperplane(P, Hyperplane([-a, F.zero, F.zero, F.one])) == q
        assert C.ord_hyperplane(P, Hyperplane([F.zero, F.one, -a, F.zero])) == q + 1
        Q = CurvePoint.Q(a)
        assert C.ord_hyperplane(Q, Hyperplane([F.zero, -a, F.zero, F.one])) == q
        assert C.ord_hyperplane(Q, Hyperplane([F.one, F.zero, -a, F.zero])) == q + 1


def test_ord_requires_incidence(C3):
    with pytest.raises(NotOnHyperplane):
        C3.ord_hyperplane(C3.infinite_points()[0], Hyperplane.of(C3.F, 1, 0, 0, 0))


def test_affine_orders_are_small(C3):
    """At an affine point x - x0 is a parameter; generic hyperplanes through it
    vanish to order 1 and the tangent one to order >= 2."""
    K = C3.field(2)
    for P in C3.affine_points(2)[:6]:
        H = Hyperplane([K.one, K.zero, -P.x, K.zero])  # X - x0 Z
        assert C3.ord_hyperplane(P, H) == 1


@pytest.mark.parametrize("q", [3, 4])
def test_section_degree(q):
    """Summed orders over a hyperplane section never exceed deg = 2q, with
    equality for sections whose points all lie over F_{q^2}."""
    C = curve_for(q)
    K = C.field(2)
    for H in list(enumerate_hyperplanes(C.F))[::5]:
        total = 0
        HK = H.lift(C.tower, K)
        for P in C.all_points(2):
            if HK.contains(C.embed(P, K)):
                total += C.ord_hyperplane(P, HK)
        assert total <= 2 * q
    a = next(v for v in K.elements() if not C.is_in_fq(v))
    H = Hyperplane([K.zero, K.one, -a, K.zero])  # Y = aZ
    total = sum(C.ord_hyperplane(P, H) for P in C.all_points(2) if H.contains(C.embed(P, K)))
    assert total == 2 * q


# -- constrained search and intersections ----------------------------------------------

def test_bilinear_search_matches_filter(C3):
    K = C3.field(2)
    rng = random.Random(5)
    pts = C3.affine_points(2)
    for _ in range(30):
        h = [K.random(rng) for _ in range(4)]
        if not any(h):
            continue
        got = set(C3.solve_affine_points(("bilinear", tuple(h)), 2))
        want = {P for P in pts if (h[0] * P.x + h[1] * P.y + h[2] + h[3] * P.x * P.y).is_zero()}
        assert got == want
    with pytest.raises(DegenerateConstraint):
        C3.solve_affine_points(("bilinear", (K.zero,) * 4), 2)


def test_intersections_tangent_and_L2(C3):
    F = C3.F
    one = F.one
    T = Line3([-one, F.zero, F.zero, one], [F.zero, one, -one, F.zero])  # W - X, Y - Z
    assert C3.line_curve_intersections(T) == [(CurvePoint.P(one), 3)]
    L2 = Line3.of(F, [1, 0, 0, 0], [0, 0, 1, 0])
    got = C3.line_curve_intersections(L2)
    assert sorted(got, key=lambda t: t[0].alpha.n) == [(CurvePoint.Q(a), 1) for a in F.elements()]


def test_ruling_detection(C3):
    F = C3.F
    K = C3.field(2)
    a = next(v for v in K.elements() if not C3.is_in_fq(v))
    z, one = K.zero, K.one
    assert C3.ruling(Line3([-a, z, z, one], [z, one, -a, z])) == ("y", a)
    assert C3.ruling(Line3([z, -a, z, one], [one, z, -a, z])) == ("x", a)
    assert C3.ruling(Line3.of(F, [1, 0, 0, 0], [0, 0, 1, 0])) == ("y", None)
    assert C3.ruling(Line3.of(F, [0, 1, 0, 0], [0, 0, 1, 0])) == ("x", None)
    assert C3.ruling(Line3.of(F, [0, 0, 1, 0], [0, 0, 0, 1])) is None


def test_ruling_over_fq2_meets_in_q_points(C3):
    K = C3.field(2)
    z, one = K.zero, K.one
    for a in K.elements():
        if C3.is_in_fq(a):
            continue
        pts = C3.line_curve_intersections(Line3([-a, z, z, one], [z, one, -a, z]))
        assert len(pts) == 3 and all(m == 1 for _, m in pts)
        assert all(P.y == a for P, _ in pts)


def test_extension_bound_exceeded():
    C = ASMCurve(3, search_bound=27, k_max=1)
    K = C.field(3)
    z, one = K.zero, K.one
    for a in K.elements():
        if C.is_in_fq(a) or C.solve_affine_points(("y", a), 3):
            continue
        L = Line3([-a, z, z, one], [z, one, -a, z])
        with pytest.raises(ExtensionBoundExceeded) as info:
            C.line_curve_intersections(L)
        assert info.value.expected == 3 and info.value.found == 0
        pts, expected = C.intersection_data(L)
        assert pts == [] and expected == 3
        break
    else:
        pytest.fail("every a in F_27 had rational Artin-Schreier roots")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_secant_multiplicities(i, j):
    C = curve_for(3)
    pts = C.affine_points(2)
    P, Q = pts[i % len(pts)], pts[j % len(pts)]
    if P == Q:
        return
    from asm_galois.proj_geometry import line_through
    L = line_through(C.embed(P), C.embed(Q))
    got = dict(C.intersection_data(L)[0])
    assert P in got and Q in got
    assert sum(got.values()) <= 2 * C.q
