"""Truncated power series over a finite field.

A series is a plain list of N FieldElements, coefficient i of t**i first.
"""

from __future__ import annotations

from .errors import DivisionByZero, PrecisionExhausted
from .finite_field import FieldCtx, FieldElement

Series = list


def zeros(ctx: FieldCtx, n: int) -> Series:
    return [ctx.zero] * n


def const(c: FieldElement, n: int) -> Series:
    return [c] + [c.ctx.zero] * (n - 1)


def monomial(ctx: FieldCtx, k: int, n: int, coeff: FieldElement | None = None) -> Series:
    s = zeros(ctx, n)
    if k < n:
        s[k] = ctx.one if coeff is None else coeff
    return s


def add(a: Series, b: Series) -> Series:
    return [x + y for x, y in zip(a, b)]


def sub(a: Series, b: Series) -> Series:
    return [x - y for x, y in zip(a, b)]


def scale(a: Series, c: FieldElement) -> Series:
    return [x * c for x in a]


def mul(a: Series, b: Series) -> Series:
    n = len(a)
    ctx = a[0].ctx
    cadd, cmul = ctx.add, ctx.mul
    av = [x.n for x in a]
    bv = [x.n for x in b]
    out = [0] * n
    for i, x in enumerate(av):
        if x:
            for j in range(n - i):
                y = bv[j]
                if y:
                    out[i + j] = cadd(out[i + j], cmul(x, y))
    return [FieldElement(ctx, v) for v in out]


def inverse(a: Series) -> Series:
    """1/a for a with nonzero constant term."""
    if a[0].is_zero():
        raise DivisionByZero("series with zero constant term is not invertible")
    n = len(a)
    inv0 = a[0].inverse()
    out = [inv0]
    for k in range(1, n):
        acc = a[0].ctx.zero
        for i in range(1, k + 1):
            if a[i]:
                acc = acc + a[i] * out[k - i]
        out.append(-acc * inv0)
    return out


def frobenius(a: Series, s: int) -> Series:
    """a(t)**s for s a power of the characteristic: sum a_i^s t^(i s)."""
    n = len(a)
    out = zeros(a[0].ctx, n)
    for i, x in enumerate(a):
        if i * s >= n:
            break
        out[i * s] = x**s
    return out


def artin_schreier(s: Series, q: int) -> Series:
    """The solution u with u(0) = 0 of u**q - u = s, for s(0) = 0.

    u = -(s + s^q + s^(q^2) + ...); the sum is finite modulo t**N.
    """
    if s[0]:
        raise ValueError("Artin-Schreier iteration needs s(0) = 0")
    n = len(s)
    u = zeros(s[0].ctx, n)
    term = s
    while any(term):
        u = sub(u, term)
        term = frobenius(term, q)
    return u


def order(a: Series) -> int:
    """Index of the first nonzero coefficient; raises if a vanishes to precision."""
    for i, x in enumerate(a):
        if x:
            return i
    raise PrecisionExhausted(f"series vanishes to precision {len(a)}")


def truncate_eq(a: Series, b: Series) -> bool:
    return all(x == y for x, y in zip(a, b))
