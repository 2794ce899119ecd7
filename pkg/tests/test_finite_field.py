from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from asm_galois.errors import (
    BadBase,
    ContextMismatch,
    DegreeOutOfRange,
    DivisionByZero,
    NonPrime,
    ZeroPolynomial,
)
from asm_galois.finite_field import (
    FieldTower,
    Poly,
    build_field,
    frobenius,
    in_subfield,
    is_irreducible_fp,
    poly_roots,
    prime_power,
    smallest_irreducible,
)
from oracles import NaiveField, naive_irreducible

FIELDS = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (5, 2), (3, 3)]


@pytest.mark.parametrize("p,e", FIELDS)
def test_modulus_is_irreducible_and_smallest(p, e):
    m = smallest_irreducible(p, e)
    assert m[-1] == 1 and len(m) == e + 1
    assert naive_irreducible(m, p)
    # every monic polynomial packing below it is reducible
    F = NaiveField(p, m)
    for n in range(p**e):
        low = F.from_packed(n)
        cand = tuple(low) + (1,)
        if cand == tuple(m):
            break
        assert not naive_irreducible(cand, p)


def test_prime_field_modulus_is_T():
    assert smallest_irreducible(7, 1) == (0, 1)


@pytest.mark.parametrize("p,e", FIELDS)
def test_multiplication_matches_schoolbook(p, e):
    F = build_field(p, e)
    N = NaiveField(p, smallest_irreducible(p, e))
    rng = random.Random(p * 100 + e)
    for _ in range(200):
        a, b = rng.randrange(F.cardinality), rng.randrange(F.cardinality)
        assert F.mul(a, b) == N.pack(N.mul(N.from_packed(a), N.from_packed(b)))
        assert F.add(a, b) == N.pack(N.add(N.from_packed(a), N.from_packed(b)))


@pytest.mark.parametrize("p,e", FIELDS)
def test_primitive_generates_multiplicative_group(p, e):
    F = build_field(p, e)
    g = F.primitive
    seen = set()
    x = F.one
    for _ in range(F.cardinality - 1):
        seen.add(x.n)
        x = x * g
    assert len(seen) == F.cardinality - 1 and x == F.one


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(FIELDS), st.integers(0, 10**9), st.integers(0, 10**9), st.integers(0, 10**9))
def test_field_axioms(pe, i, j, k):
    F = build_field(*pe)
    a, b, c = (F.from_int(v % F.cardinality) for v in (i, j, k))
    assert a + b == b + a and a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == F.zero and a + (-a) == F.zero
    if a:
        assert a * a.inverse() == F.one
        assert a ** (F.cardinality - 1) == F.one
        assert a ** -1 == a.inverse()


def test_example_values_f9():
    F = build_field(3, 2)
    w = F.gen
    # T^2 + 1 is the first irreducible quadratic over F_3, so w^2 = -1
    assert smallest_irreducible(3, 2) == (1, 0, 1)
    assert w * w == F.from_int(2)
    assert str(w + 1) == "w+1"
    assert (w ** 9) == w  # Frobenius of order 2
    assert F.describe() == {"p": 3, "e": 2, "modulus": list(smallest_irreducible(3, 2))}


def test_division_by_zero():
    F = build_field(5, 1)
    with pytest.raises(DivisionByZero):
        F.zero.inverse()
    with pytest.raises(DivisionByZero):
        F.one / F.zero


def test_bad_construction():
    with pytest.raises(NonPrime):
        build_field(6, 1)
    with pytest.raises(DegreeOutOfRange):
        build_field(2, 30)
    with pytest.raises(DegreeOutOfRange):
        build_field(3, 0)


def test_context_mismatch():
    A, B = build_field(3, 1), build_field(3, 2)
    with pytest.raises(ContextMismatch):
        A.one + B.one


def test_prime_power():
    assert prime_power(9) == (3, 2)
    assert prime_power(8) == (2, 3)
    assert prime_power(7) == (7, 1)
    assert prime_power(6) is None and prime_power(1) is None


def test_is_irreducible_fp_small():
    assert is_irreducible_fp([1, 1, 1], 2)  # T^2 + T + 1
    assert not is_irreducible_fp([1, 0, 1], 2)  # (T + 1)^2


def test_frobenius_and_subfields():
    F = build_field(2, 4)
    x = F.from_int(7)
    assert frobenius(x, 4) == x**4
    sub4 = [y for y in F.elements() if in_subfield(y, 4)]
    assert len(sub4) == 4
    with pytest.raises(BadBase):
        frobenius(x, 3)
    with pytest.raises(BadBase):
        in_subfield(x, 8)  # F_8 is not inside F_16


def test_poly_roots_with_multiplicity():
    F = build_field(5, 1)
    T = Poly.monomial(F, 1)
    f = (T - Poly(F, [F(2)])) ** 2 * (T - Poly(F, [F(3)]))
    assert sorted((r.n, m) for r, m in poly_roots(f)) == [(2, 2), (3, 1)]
    with pytest.raises(ZeroPolynomial):
        poly_roots(Poly(F, []))


def test_poly_roots_artin_schreier_over_f9():
    F = build_field(3, 2)
    # T^3 - T - a has 3 roots in F_9 iff a lies in the trace-zero subspace
    for a in F.elements():
        f = Poly(F, [-a, -1, 0, 1])
        roots = poly_roots(f)
        if a + a**3 == F.zero:
            assert len(roots) == 3
        else:
            assert roots == []


@pytest.mark.parametrize("p,e", [(3, 6), (2, 10), (5, 4)])
@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_large_field_roots_match_exhaustive(p, e, data):
    """Splitting-based roots in fields past the exhaustive cutoff agree with evaluation."""
    K = build_field(p, e)
    elem = st.integers(0, K.cardinality - 1)
    roots = data.draw(st.lists(elem, min_size=0, max_size=4))
    noise = data.draw(st.lists(elem, min_size=1, max_size=5))
    f = Poly(K, [1])
    for r in roots + roots[:1]:
        f = f * Poly(K, [K.neg(r), 1])
    f = f * Poly(K, noise + [1]) if data.draw(st.booleans()) else f
    want = [x.n for x in K.elements() if f(x).is_zero()]
    assert [r.n for r, _ in poly_roots(f)] == want


def test_poly_roots_context_mismatch():
    F, K = build_field(3, 1), build_field(3, 2)
    with pytest.raises(ContextMismatch):
        poly_roots(Poly(F, [1, 1]), K)


@pytest.mark.parametrize("p,e", [(3, 1), (2, 2), (3, 2), (2, 3)])
def test_tower_embeddings_are_homomorphisms(p, e):
    T = FieldTower(p, e)
    rng = random.Random(1)
    for j, k in [(1, 2), (1, 3), (2, 4), (1, 4)]:
        if not T.can_build(k):
            continue
        A, B = T.field(j), T.field(k)
        for _ in range(50):
            x, y = A.random(rng), A.random(rng)
            assert T.embed(x + y, B) == T.embed(x, B) + T.embed(y, B)
            assert T.embed(x * y, B) == T.embed(x, B) * T.embed(y, B)
        assert T.embed(A.one, B) == B.one


def test_tower_embeddings_commute():
    T = FieldTower(2, 2)
    F, K2, K4 = T.field(1), T.field(2), T.field(4)
    for x in F.elements():
        assert T.embed(T.embed(x, K2), K4) == T.embed(x, K4)


def test_tower_descend_and_level():
    T = FieldTower(3, 1)
    K = T.field(2)
    for x in T.base.elements():
        y = T.embed(x, K)
        assert T.descend(y, 1) == x
        assert T.minimal_level(y) == 1
    z = next(v for v in K.elements() if v**3 != v)
    assert T.minimal_level(z) == 2
    with pytest.raises(ValueError):
        T.descend(z, 1)


def test_tower_common():
    T = FieldTower(2, 2)
    assert T.degree(T.common(T.field(2), T.field(3))) == 6
