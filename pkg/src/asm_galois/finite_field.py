"""Exact arithmetic in F_p, F_q = F_{p^e} and the extensions F_{q^k}.

Elements are stored as integers: the coefficient vector (c_0, ..., c_{e-1})
relative to the power basis of the modulus is packed as sum(c_i * p**i).
Multiplication goes through discrete log / antilog tables and addition
through Zech logarithms (XOR in characteristic 2), so every field built here
is limited to ``DEFAULT_MAX_CARDINALITY`` elements.
"""

from __future__ import annotations

import math
import random
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import (
    BadBase,
    ContextMismatch,
    DegreeOutOfRange,
    DivisionByZero,
    NonPrime,
    ZeroPolynomial,
)

DEFAULT_MAX_CARDINALITY = 2**20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(n: int) -> tuple[int, int] | None:
    """Return (p, e) with n = p**e, or None."""
    if n < 2:
        return None
    fs = prime_factors(n)
    if len(fs) != 1:
        return None
    p = fs[0]
    e = 0
    while n > 1:
        n //= p
        e += 1
    return p, e


# -- dense polynomials over F_p as little-endian int lists -----------------

def _digits(n: int, p: int, length: int) -> list[int]:
    out = []
    for _ in range(length):
        n, r = divmod(n, p)
        out.append(r)
    return out


def _undigits(v: Sequence[int], p: int) -> int:
    n = 0
    for c in reversed(v):
        n = n * p + c
    return n


def _fp_rem(a: list[int], b: Sequence[int], p: int) -> list[int]:
    """Remainder of a by the monic polynomial b over F_p."""
    a = list(a)
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] % p
        if c:
            off = i - db
            for j in range(db + 1):
                a[off + j] = (a[off + j] - c * b[j]) % p
    r = [c % p for c in a[:db]]
    while r and r[-1] == 0:
        r.pop()
    return r


def _monic_polys(p: int, d: int) -> Iterator[list[int]]:
    for n in range(p**d):
        yield _digits(n, p, d) + [1]


def is_irreducible_fp(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    e = len(poly) - 1
    if e < 1:
        return False
    if e == 1:
        return True
    for d in range(1, e // 2 + 1):
        for m in _monic_polys(p, d):
            if not _fp_rem(list(poly), m, p):
                return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree e over F_p.

    Candidates are ordered by the integer packing of their lower
    coefficients, so the constant term varies fastest.
    """
    for n in range(p**e):
        cand = _digits(n, p, e) + [1]
        if is_irreducible_fp(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# -- table construction ----------------------------------------------------

class _Tables:
    """Log/antilog/Zech tables for one (p, modulus) pair."""

    def __init__(self, p: int, modulus: tuple[int, ...]):
        self.p = p
        self.e = e = len(modulus) - 1
        self.size = p**e
        self.order = self.size - 1
        self.modulus = modulus
        gen, step = self._find_primitive()
        self.primitive = gen
        exp = [0] * self.order
        log = [-1] * self.size
        x = 1
        for i in range(self.order):
            exp[i] = x
            log[x] = i
            x = step(x)
        assert x == 1, "primitive element has wrong order"
        self.exp = exp
        self.log = log
        self.zech: list[int] | None = None
        if p != 2 and e > 1:
            zech = [-1] * self.order
            for i in range(self.order):
                v = exp[i]
                low = v % p
                w = v - low + (low + 1) % p
                zech[i] = log[w] if w else -1
            self.zech = zech

    # multiplication of packed vectors, used only while bootstrapping
    def _mulvec(self, a: int, b: int) -> int:
        p, e, mod = self.p, self.e, self.modulus
        av, bv = _digits(a, p, e), _digits(b, p, e)
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(av):
            if x:
                for j, y in enumerate(bv):
                    prod[i + j] += x * y
        return _undigits(_fp_rem(prod, mod, p), p)

    def _powvec(self, a: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self._mulvec(r, a)
            a = self._mulvec(a, a)
            n >>= 1
        return r

    def _is_primitive(self, g: int) -> bool:
        if self.order == 1:
            return g == 1
        return all(self._powvec(g, self.order // r) != 1 for r in prime_factors(self.order))

    def _find_primitive(self):
        for g in range(1, self.size):
            if self._is_primitive(g):
                return g, self._stepper(_digits(g, self.p, self.e))
        raise AssertionError("no primitive element")  # pragma: no cover

    def _stepper(self, g: list[int]):
        """Multiplication by the fixed element g, as shift-and-accumulate."""
        p, e, mod = self.p, self.e, self.modulus
        if e == 1:
            g0 = g[0]
            return lambda x: (x * g0) % p
        terms = [(i, c) for i, c in enumerate(g) if c]
        if p == 2:
            top = 1 << e
            mod_int = _undigits(mod, 2)
            shifts = [i for i, _ in terms]
            last = shifts[-1]

            def step2(x: int) -> int:
                acc = 0
                for i in range(last + 1):
                    if i in shifts:
                        acc ^= x
                    x <<= 1
                    if x & top:
                        x ^= mod_int
                return acc

            return step2
        low = mod[:e]
        last = terms[-1][0]
        coeff = dict(terms)

        def step(x: int) -> int:
            v = _digits(x, p, e)
            acc = [0] * e
            for i in range(last + 1):
                c = coeff.get(i)
                if c:
                    acc = [(a + c * b) % p for a, b in zip(acc, v)]
                if i < last:
                    h = v[-1]
                    v = [0] + v[:-1]
                    if h:
                        v = [(v[j] - h * low[j]) % p for j in range(e)]
            return _undigits(acc, p)

        return step


@lru_cache(maxsize=None)
def _tables(p: int, modulus: tuple[int, ...]) -> _Tables:
    return _Tables(p, modulus)


# -- contexts and elements -------------------------------------------------

class FieldCtx:
    """The field F_p[T]/(modulus) with p**e elements.

    ``parent`` optionally names a subfield context; ``parent_gen_image`` is then
    the packed image of the subfield generator T under the fixed embedding.
    """

    def __init__(self, p: int, modulus: Sequence[int], parent: FieldCtx | None = None,
                 parent_gen_image: int | None = None):
        self.p = p
        self.modulus = tuple(modulus)
        self.e = len(self.modulus) - 1
        self.cardinality = p**self.e
        self.parent = parent
        self.parent_gen_image = parent_gen_image
        t = _tables(p, self.modulus)
        self._exp = t.exp
        self._log = t.log
        self._zech = t.zech
        self._order = t.order
        self._key = (p, self.modulus)
        self.zero = FieldElement(self, 0)
        self.one = FieldElement(self, 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldCtx) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.e})"

    def describe(self) -> dict:
        return {"p": self.p, "e": self.e, "modulus": list(self.modulus)}

    # raw packed-int arithmetic; hot loops use these directly

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.e == 1:
            return (a + b) % self.p
        if a == 0:
            return b
        if b == 0:
            return a
        log = self._log
        la = log[a]
        z = self._zech[(log[b] - la) % self._order]
        if z < 0:
            return 0
        return self._exp[(la + z) % self._order]

    def neg(self, a: int) -> int:
        if self.p == 2 or a == 0:
            return a
        if self.e == 1:
            return self.p - a
        return self._exp[(self._log[a] + self._order // 2) % self._order]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % self._order]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"inverse of zero in {self!r}")
        return self._exp[-self._log[a] % self._order]

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inv(a), -n
        if a == 0:
            return 1 if n == 0 else 0
        return self._exp[(self._log[a] * n) % self._order]

    def log(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("log of zero")
        return self._log[a]

    # element construction

    def __call__(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.ctx == self:
                return value
            raise ContextMismatch(f"{value.ctx!r} element given to {self!r}")
        if isinstance(value, int):
            return FieldElement(self, value % self.p)
        return self.from_coords(value)

    def from_int(self, n: int) -> FieldElement:
        if not 0 <= n < self.cardinality:
            raise ValueError(f"packed value {n} out of range for {self!r}")
        return FieldElement(self, n)

    def from_coords(self, coords: Sequence[int]) -> FieldElement:
        coords = list(coords)
        if len(coords) > self.e:
            raise ValueError("too many coordinates")
        return FieldElement(self, _undigits([c % self.p for c in coords], self.p))

    @property
    def gen(self) -> FieldElement:
        """The class of T (the power-basis generator)."""
        return self.from_coords([0, 1]) if self.e > 1 else FieldElement(self, 0)

    @property
    def primitive(self) -> FieldElement:
        return FieldElement(self, self._exp[1 % self._order] if self._order > 1 else 1)

    def elements(self) -> Iterator[FieldElement]:
        for n in range(self.cardinality):
            yield FieldElement(self, n)

    def nonzero(self) -> Iterator[FieldElement]:
        for n in range(1, self.cardinality):
            yield FieldElement(self, n)

    def random(self, rng: random.Random, nonzero: bool = False) -> FieldElement:
        lo = 1 if nonzero else 0
        return FieldElement(self, rng.randrange(lo, self.cardinality))


class FieldElement:
    __slots__ = ("ctx", "n")

    def __init__(self, ctx: FieldCtx, n: int):
        self.ctx = ctx
        self.n = n

    @property
    def coords(self) -> list[int]:
        return _digits(self.n, self.ctx.p, self.ctx.e)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx!r} vs {other.ctx!r}")
            return other.n
        if isinstance(other, int):
            return other % self.ctx.p
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.ctx, self.ctx.add(self.n, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.ctx, self.ctx.sub(self.n, b))

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.ctx, self.ctx.sub(b, self.n))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.n))

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.ctx, self.ctx.mul(self.n, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.ctx, self.ctx.mul(self.n, self.ctx.inv(b)))

    def __rtruediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.ctx, self.ctx.mul(b, self.ctx.inv(self.n)))

    def __pow__(self, k: int):
        return FieldElement(self.ctx, self.ctx.pow(self.n, k))

    def inverse(self) -> FieldElement:
        return FieldElement(self.ctx, self.ctx.inv(self.n))

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.n == other.n and (self.ctx is other.ctx or self.ctx == other.ctx)
        if isinstance(other, int):
            return self.n == other % self.ctx.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.n, self.ctx._key))

    def __lt__(self, other: FieldElement) -> bool:
        return self.n < other.n

    def __bool__(self) -> bool:
        return self.n != 0

    def is_zero(self) -> bool:
        return self.n == 0

    def __repr__(self) -> str:
        return f"{self.ctx!r}({self})"

    def __str__(self) -> str:
        if self.ctx.e == 1:
            return str(self.n)
        terms = []
        for i, c in enumerate(self.coords):
            if c == 0:
                continue
            mono = "" if i == 0 else ("w" if i == 1 else f"w^{i}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}{mono}")
        return "+".join(reversed(terms)) or "0"


# -- public operations -----------------------------------------------------

def build_field(p: int, e: int, max_cardinality: int = DEFAULT_MAX_CARDINALITY) -> FieldCtx:
    """F_{p^e} with the lexicographically smallest monic irreducible modulus."""
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if e < 1 or p**e > max_cardinality:
        raise DegreeOutOfRange(f"p^e = {p}^{e} outside [p, {max_cardinality}]")
    return FieldCtx(p, smallest_irreducible(p, e))


def _check_power_of_p(ctx: FieldCtx, s: int) -> int:
    pe = prime_power(s)
    if pe is None or pe[0] != ctx.p:
        raise BadBase(f"{s} is not a power of {ctx.p}")
    return pe[1]


def frobenius(x: FieldElement, s: int) -> FieldElement:
    """x**s for s a power of the characteristic."""
    _check_power_of_p(x.ctx, s)
    return x**s


def in_subfield(x: FieldElement, s: int) -> bool:
    """True iff x lies in the subfield with s elements."""
    d = _check_power_of_p(x.ctx, s)
    if x.ctx.e % d:
        raise BadBase(f"F_{s} is not a subfield of {x.ctx!r}")
    return x**s == x


class Poly:
    """Dense univariate polynomial, coefficients low degree first."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs: Iterable):
        cs = [ctx(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.ctx = ctx
        self.coeffs = tuple(cs)

    @classmethod
    def monomial(cls, ctx: FieldCtx, deg: int, coeff=1) -> Poly:
        return cls(ctx, [0] * deg + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Poly(0)"
        terms = [f"({c})*T^{i}" for i, c in enumerate(self.coeffs) if c]
        return "Poly(" + " + ".join(reversed(terms)) + ")"

    def __call__(self, x: FieldElement) -> FieldElement:
        ctx = x.ctx
        acc = 0
        for c in reversed(self.coeffs):
            acc = ctx.add(ctx.mul(acc, x.n), c.n)
        return FieldElement(ctx, acc)

    def __add__(self, other: Poly) -> Poly:
        n = max(len(self.coeffs), len(other.coeffs))
        z = self.ctx.zero
        a = self.coeffs + (z,) * (n - len(self.coeffs))
        b = other.coeffs + (z,) * (n - len(other.coeffs))
        return Poly(self.ctx, [x + y for x, y in zip(a, b)])

    def __neg__(self) -> Poly:
        return Poly(self.ctx, [-c for c in self.coeffs])

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other) -> Poly:
        if isinstance(other, FieldElement):
            return Poly(self.ctx, [c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return Poly(self.ctx, [])
        out = [self.ctx.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
        return Poly(self.ctx, out)

    def __pow__(self, n: int) -> Poly:
        r = Poly(self.ctx, [1])
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        rem = list(self.coeffs)
        d = other.degree
        lead_inv = other.coeffs[-1].inverse()
        quo = [self.ctx.zero] * max(len(rem) - d, 0)
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i] * lead_inv
            if c:
                quo[i - d] = c
                for j in range(d + 1):
                    rem[i - d + j] = rem[i - d + j] - c * other.coeffs[j]
        return Poly(self.ctx, quo), Poly(self.ctx, rem[:d])

    def map(self, fn) -> Poly:
        return Poly(fn(self.ctx.zero).ctx, [fn(c) for c in self.coeffs])


# -- root finding on raw coefficient lists (low degree first) -------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(ctx: FieldCtx, a: list[int], m: list[int]) -> list[int]:
    a = list(a)
    d = len(m) - 1
    inv = ctx.inv(m[-1])
    for i in range(len(a) - 1, d - 1, -1):
        c = ctx.mul(a[i], inv)
        if c:
            for j in range(d + 1):
                a[i - d + j] = ctx.sub(a[i - d + j], ctx.mul(c, m[j]))
    return _trim(a[:d])


def _pmulmod(ctx: FieldCtx, a: list[int], b: list[int], m: list[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = ctx.add(out[i + j], ctx.mul(x, y))
    return _pmod(ctx, out, m)


def _ppowmod(ctx: FieldCtx, a: list[int], n: int, m: list[int]) -> list[int]:
    r, b = [1], _pmod(ctx, a, m)
    while n:
        if n & 1:
            r = _pmulmod(ctx, r, b, m)
        b = _pmulmod(ctx, b, b, m)
        n >>= 1
    return r


def _pgcd(ctx: FieldCtx, a: list[int], b: list[int]) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(ctx, a, b)
    inv = ctx.inv(a[-1])
    return [ctx.mul(x, inv) for x in a]


def _pdiv_exact(ctx: FieldCtx, a: list[int], m: list[int]) -> list[int]:
    a = list(a)
    d = len(m) - 1
    inv = ctx.inv(m[-1])
    quo = [0] * (len(a) - d)
    for i in range(len(a) - 1, d - 1, -1):
        c = ctx.mul(a[i], inv)
        quo[i - d] = c
        if c:
            for j in range(d + 1):
                a[i - d + j] = ctx.sub(a[i - d + j], ctx.mul(c, m[j]))
    return quo


def _split_roots(ctx: FieldCtx, g: list[int], rng: random.Random, out: list[int]) -> None:
    """Roots of a monic squarefree g that splits into distinct linear factors."""
    d = len(g) - 1
    if d == 0:
        return
    if d == 1:
        out.append(ctx.neg(g[0]))
        return
    Q = ctx.cardinality
    while True:
        a = rng.randrange(Q)
        if ctx.p == 2:
            # absolute trace of a*T: sum of (aT)^(2^i), i < e
            t = _pmod(ctx, [0, a], g) if a else []
            acc = list(t)
            for _ in range(ctx.e - 1):
                t = _pmulmod(ctx, t, t, g)
                n = max(len(acc), len(t))
                acc = _trim([ctx.add(x, y) for x, y in
                             zip(acc + [0] * (n - len(acc)), t + [0] * (n - len(t)))])
            h = acc
        else:
            h = _ppowmod(ctx, [a, 1], (Q - 1) // 2, g)
            h = (h + [0]) if not h else h
            h[0] = ctx.sub(h[0], 1)
            h = _trim(h)
        if not h:
            continue
        f1 = _pgcd(ctx, g, h)
        if 0 < len(f1) - 1 < d:
            _split_roots(ctx, f1, rng, out)
            _split_roots(ctx, _pdiv_exact(ctx, g, f1), rng, out)
            return


def _roots_exhaustive(ctx: FieldCtx, cs_high_first: list[int]) -> list[int]:
    add, mul = ctx.add, ctx.mul
    out = []
    for x in range(ctx.cardinality):
        acc = 0
        for c in cs_high_first:
            acc = add(mul(acc, x), c)
        if acc == 0:
            out.append(x)
    return out


def _roots_split(ctx: FieldCtx, f: list[int]) -> list[int]:
    """Distinct roots via gcd with T^Q - T and equal-degree splitting."""
    inv = ctx.inv(f[-1])
    f = [ctx.mul(x, inv) for x in f]
    xq = _ppowmod(ctx, [0, 1], ctx.cardinality, f)
    xq = xq + [0] * max(0, 2 - len(xq))
    xq[1] = ctx.sub(xq[1], 1)
    g = _pgcd(ctx, f, _trim(xq)) if _trim(xq) else f
    out: list[int] = []
    _split_roots(ctx, g, random.Random(hash(tuple(f))), out)
    return sorted(out)


EXHAUSTIVE_ROOTS_MAX = 512


def poly_roots(f: Poly, ctx: FieldCtx | None = None) -> list[tuple[FieldElement, int]]:
    """All roots of f in ctx with multiplicities, sorted by packed value.

    Small fields are searched exhaustively; larger ones use gcd with T^Q - T
    followed by random equal-degree splitting.  f must already have
    coefficients in ctx (lift with ``FieldTower.embed``).
    """
    if f.is_zero():
        raise ZeroPolynomial("roots of the zero polynomial")
    ctx = ctx or f.ctx
    if f.ctx != ctx:
        raise ContextMismatch(f"polynomial over {f.ctx!r}, roots requested in {ctx!r}")
    raw = [c.n for c in f.coeffs]
    if len(raw) == 1:
        out = []
    elif ctx.cardinality <= EXHAUSTIVE_ROOTS_MAX:
        out = _roots_exhaustive(ctx, raw[::-1])
    else:
        out = _roots_split(ctx, raw)
    roots = []
    for x in out:
        r = FieldElement(ctx, x)
        lin = Poly(ctx, [-r, 1])
        g, m = f, 0
        while True:
            q, rem = g.divmod(lin)
            if not rem.is_zero():
                break
            g, m = q, m + 1
        roots.append((r, m))
    return roots


class FieldTower:
    """F_q together with extensions F_{q^k} and compatible embeddings.

    Every context is an absolute extension of F_p.  The embedding of F_{q^j}
    into F_{q^k} (j | k) sends the generator of F_{q^j} to the smallest root of
    its modulus in F_{q^k} that also agrees with the chosen embedding of F_q.
    """

    def __init__(self, p: int, e: int, max_cardinality: int = DEFAULT_MAX_CARDINALITY):
        self.p = p
        self.e = e
        self.q = p**e
        self.max_cardinality = max_cardinality
        self.base = build_field(p, e, max_cardinality)
        self._fields: dict[int, FieldCtx] = {1: self.base}
        self._images: dict[tuple[int, int], int] = {}
        self._maps: dict[tuple[int, int], list[int]] = {}

    def __repr__(self) -> str:
        return f"FieldTower(q={self.q})"

    def can_build(self, k: int) -> bool:
        return self.q**k <= self.max_cardinality

    def field(self, k: int) -> FieldCtx:
        ctx = self._fields.get(k)
        if ctx is None:
            if k < 1 or not self.can_build(k):
                raise DegreeOutOfRange(f"F_{{{self.q}^{k}}} exceeds the field size bound")
            modulus = smallest_irreducible(self.p, self.e * k)
            plain = FieldCtx(self.p, modulus)
            img = self._subfield_root(self.base, plain, None) if self.e > 1 else None
            ctx = FieldCtx(self.p, modulus, parent=self.base, parent_gen_image=img)
            self._fields[k] = ctx
        return ctx

    def degree(self, ctx: FieldCtx) -> int:
        """k such that ctx is F_{q^k}."""
        if ctx.p != self.p or ctx.e % self.e:
            raise ContextMismatch(f"{ctx!r} is not in {self!r}")
        return ctx.e // self.e

    def _subfield_root(self, small: FieldCtx, big: FieldCtx, constraint) -> int:
        """Smallest root in big of small.modulus, optionally subject to constraint(r)."""
        n_small = small.cardinality
        step = (big.cardinality - 1) // (n_small - 1)
        cands = [0] + [big.pow(big.primitive.n, step * i) for i in range(n_small - 1)]
        cands.sort()
        for r in cands:
            acc = 0
            for c in reversed(small.modulus):
                acc = big.add(big.mul(acc, r), c)
            if acc == 0 and (constraint is None or constraint(r)):
                return r
        raise AssertionError("subfield modulus has no compatible root")  # pragma: no cover

    def _image(self, j: int, k: int) -> int:
        key = (j, k)
        if key not in self._images:
            small, big = self.field(j), self.field(k)
            if small.e == 1:
                img = 0
            elif j == 1:
                img = big.parent_gen_image
            elif self.e == 1:
                img = self._subfield_root(small, big, None)
            else:
                # the map must restrict to the fixed embedding of F_q
                src = _digits(small.parent_gen_image, self.p, small.e)
                target = big.parent_gen_image

                def agrees(r: int) -> bool:
                    acc = 0
                    for c in reversed(src):
                        acc = big.add(big.mul(acc, r), c)
                    return acc == target

                img = self._subfield_root(small, big, agrees)
            self._images[key] = img
        return self._images[key]

    def embed(self, x: FieldElement, target: FieldCtx) -> FieldElement:
        """Image of x under the fixed embedding into target."""
        if x.ctx == target:
            return x if x.ctx is target else FieldElement(target, x.n)
        j, k = self.degree(x.ctx), self.degree(target)
        if k % j:
            raise ContextMismatch(f"{x.ctx!r} does not embed in {target!r}")
        key = (j, k)
        table = self._maps.get(key)
        if table is None:
            small = self.field(j)
            r = self._image(j, k)
            table = []
            for n in range(small.cardinality):
                acc = 0
                for c in reversed(_digits(n, self.p, small.e)):
                    acc = target.add(target.mul(acc, r), c)
                table.append(acc)
            self._maps[key] = table
        return FieldElement(target, table[x.n])

    def common(self, *ctxs: FieldCtx) -> FieldCtx:
        k = 1
        for c in ctxs:
            k = math.lcm(k, self.degree(c))
        return self.field(k)

    def lift_all(self, xs: Iterable[FieldElement], target: FieldCtx) -> list[FieldElement]:
        return [self.embed(x, target) for x in xs]

    def descend(self, x: FieldElement, j: int) -> FieldElement:
        """Preimage of x in F_{q^j}; raises ValueError if x is not in the image."""
        small = self.field(j)
        if x.ctx == small:
            return x
        k = self.degree(x.ctx)
        self.embed(small.zero, x.ctx)  # build the table
        table = self._maps[(j, k)]
        try:
            return FieldElement(small, table.index(x.n))
        except ValueError:
            raise ValueError(f"{x!r} does not lie in F_{{{self.q}^{j}}}") from None

    def minimal_level(self, x: FieldElement) -> int:
        """Smallest j with x in F_{q^j}."""
        k = self.degree(x.ctx)
        for j in range(1, k + 1):
            if k % j == 0 and x ** (self.q**j) == x:
                return j
        return k  # pragma: no cover
