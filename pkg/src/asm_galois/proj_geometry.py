"""Points, hyperplanes and lines of P^3 over a finite field.

Lines are stored as a pencil of hyperplanes in reduced row-echelon form, so
two lines are equal exactly when their echelon bases agree.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence

from .errors import CoincidentPoints, ContextMismatch, DegenerateSubspace
from .finite_field import FieldCtx, FieldElement, FieldTower, in_subfield

VARS = ("X", "Y", "Z", "W")


def rref(rows: Sequence[Sequence[FieldElement]]) -> tuple[list[list[FieldElement]], list[int]]:
    """Reduced row-echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][col].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence[FieldElement]]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[FieldElement]], ncols: int, ctx: FieldCtx) -> list[list[FieldElement]]:
    """Basis of {v : rows . v = 0}."""
    red, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ctx.zero] * ncols
        v[f] = ctx.one
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def _normalize(coords: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
    for c in coords:
        if c:
            inv = c.inverse()
            return tuple(x * inv for x in coords)
    raise DegenerateSubspace("all coordinates are zero")


def _render_form(coeffs: Sequence[FieldElement]) -> str:
    """Human-readable linear form, e.g. 'W - 2*X = 0'."""
    terms = []
    for c, v in zip(coeffs, VARS):
        if not c:
            continue
        sign = "+"
        if c.ctx.e == 1 and 2 * c.n > c.ctx.p:
            sign, c = "-", -c
        if c == 1:
            body = v
        else:
            s = str(c)
            body = f"({s})*{v}" if "+" in s else f"{s}*{v}"
        terms.append((sign, body))
    out = ""
    for i, (sign, body) in enumerate(terms):
        if i == 0:
            out = body if sign == "+" else "-" + body
        else:
            out += f" {sign} {body}"
    return out + " = 0"


class ProjPoint3:
    """(X:Y:Z:W) with the first nonzero coordinate scaled to 1."""

    __slots__ = ("coords",)

    def __init__(self, coords: Sequence[FieldElement]):
        if len(coords) != 4:
            raise ValueError("a point of P^3 has four coordinates")
        self.coords = _normalize(coords)

    @property
    def ctx(self) -> FieldCtx:
        return self.coords[0].ctx

    @classmethod
    def of(cls, ctx: FieldCtx, *values) -> ProjPoint3:
        return cls([ctx(v) for v in values])

    def __eq__(self, other) -> bool:
        return isinstance(other, ProjPoint3) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(tuple(c.n for c in self.coords))

    def __repr__(self) -> str:
        return "(" + ":".join(str(c) for c in self.coords) + ")"

    def lift(self, tower: FieldTower, ctx: FieldCtx) -> ProjPoint3:
        return ProjPoint3(tower.lift_all(self.coords, ctx))

    def to_json(self) -> list[list[int]]:
        return [c.coords for c in self.coords]


class Hyperplane:
    """h_X X + h_Y Y + h_Z Z + h_W W = 0, normalized like a point."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[FieldElement]):
        if len(coeffs) != 4:
            raise ValueError("a hyperplane of P^3 has four coefficients")
        self.coeffs = _normalize(coeffs)

    @property
    def ctx(self) -> FieldCtx:
        return self.coeffs[0].ctx

    @classmethod
    def of(cls, ctx: FieldCtx, *values) -> Hyperplane:
        return cls([ctx(v) for v in values])

    def __call__(self, v: Sequence[FieldElement]) -> FieldElement:
        return sum((h * x for h, x in zip(self.coeffs, v)), self.ctx.zero)

    def contains(self, P: ProjPoint3) -> bool:
        _same_ctx(self.ctx, P.ctx)
        return self(P.coords).is_zero()

    def __eq__(self, other) -> bool:
        return isinstance(other, Hyperplane) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(tuple(c.n for c in self.coeffs))

    def __repr__(self) -> str:
        return _render_form(self.coeffs)

    def lift(self, tower: FieldTower, ctx: FieldCtx) -> Hyperplane:
        return Hyperplane(tower.lift_all(self.coeffs, ctx))

    def to_json(self) -> list[list[int]]:
        return [c.coords for c in self.coeffs]


class Line3:
    """A line of P^3 given by two hyperplanes in reduced row-echelon form."""

    __slots__ = ("H1", "H2", "_points")

    def __init__(self, h1: Sequence[FieldElement] | Hyperplane, h2: Sequence[FieldElement] | Hyperplane):
        a = h1.coeffs if isinstance(h1, Hyperplane) else tuple(h1)
        b = h2.coeffs if isinstance(h2, Hyperplane) else tuple(h2)
        red, _ = rref([a, b])
        if len(red) != 2:
            raise DegenerateSubspace("hyperplanes do not meet in a line")
        self.H1 = Hyperplane(red[0])
        self.H2 = Hyperplane(red[1])
        self._points = None

    @property
    def ctx(self) -> FieldCtx:
        return self.H1.ctx

    @classmethod
    def of(cls, ctx: FieldCtx, h1: Sequence, h2: Sequence) -> Line3:
        return cls([ctx(v) for v in h1], [ctx(v) for v in h2])

    def canonical(self) -> Line3:
        return Line3(self.H1, self.H2)

    def pencil(self) -> tuple[Hyperplane, Hyperplane]:
        return self.H1, self.H2

    def member(self, lam: FieldElement, mu: FieldElement) -> Hyperplane:
        """The pencil hyperplane lam*H1 + mu*H2."""
        return Hyperplane([lam * a + mu * b for a, b in zip(self.H1.coeffs, self.H2.coeffs)])

    def spanning_points(self) -> tuple[ProjPoint3, ProjPoint3]:
        if self._points is None:
            ker = nullspace([self.H1.coeffs, self.H2.coeffs], 4, self.ctx)
            red, _ = rref(ker)
            self._points = (ProjPoint3(red[0]), ProjPoint3(red[1]))
        return self._points

    def rational_points(self) -> Iterator[ProjPoint3]:
        """All points of the line over its coefficient field."""
        A, B = self.spanning_points()
        yield A
        for t in self.ctx.elements():
            yield ProjPoint3([t * a + b for a, b in zip(A.coords, B.coords)])

    def contains(self, P: ProjPoint3) -> bool:
        return self.H1.contains(P) and self.H2.contains(P)

    def inside(self, H: Hyperplane) -> bool:
        _same_ctx(self.ctx, H.ctx)
        return rank([self.H1.coeffs, self.H2.coeffs, H.coeffs]) == 2

    def lift(self, tower: FieldTower, ctx: FieldCtx) -> Line3:
        return Line3(self.H1.lift(tower, ctx), self.H2.lift(tower, ctx))

    def key(self) -> tuple[int, ...]:
        return tuple(c.n for c in self.H1.coeffs + self.H2.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Line3) and self.H1 == other.H1 and self.H2 == other.H2

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"{_render_form(self.H1.coeffs)}, {_render_form(self.H2.coeffs)}"

    def equations(self) -> str:
        return repr(self)

    def to_json(self) -> dict:
        return {"H1": self.H1.to_json(), "H2": self.H2.to_json()}


def _same_ctx(a: FieldCtx, b: FieldCtx) -> None:
    if a != b:
        raise ContextMismatch(f"{a!r} vs {b!r}")


def line_through(P: ProjPoint3, Q: ProjPoint3) -> Line3:
    _same_ctx(P.ctx, Q.ctx)
    if P == Q:
        raise CoincidentPoints(f"{P} and {Q} coincide")
    ker = nullspace([P.coords, Q.coords], 4, P.ctx)
    return Line3(ker[0], ker[1])


def pencil_basis(line: Line3) -> tuple[Hyperplane, Hyperplane]:
    return line.pencil()


def incidence(a, b) -> bool:
    """Point-on-hyperplane, point-on-line or line-in-hyperplane."""
    if isinstance(a, ProjPoint3) and isinstance(b, Hyperplane):
        return b.contains(a)
    if isinstance(a, Hyperplane) and isinstance(b, ProjPoint3):
        return a.contains(b)
    if isinstance(a, ProjPoint3) and isinstance(b, Line3):
        _same_ctx(a.ctx, b.ctx)
        return b.contains(a)
    if isinstance(a, Line3) and isinstance(b, ProjPoint3):
        _same_ctx(a.ctx, b.ctx)
        return a.contains(b)
    if isinstance(a, Line3) and isinstance(b, Hyperplane):
        return a.inside(b)
    if isinstance(a, Hyperplane) and isinstance(b, Line3):
        return b.inside(a)
    raise TypeError(f"no incidence relation between {type(a).__name__} and {type(b).__name__}")


def is_fq_line(line: Line3, q: int) -> bool:
    return all(in_subfield(c, q) for c in line.H1.coeffs + line.H2.coeffs)


def is_fq_point(P: ProjPoint3, q: int) -> bool:
    return all(in_subfield(c, q) for c in P.coords)


def enumerate_points(ctx: FieldCtx) -> Iterator[ProjPoint3]:
    """All points of P^3 over ctx, normalized, in lexicographic order."""
    one, zero = ctx.one, ctx.zero
    for lead in range(4):
        for tail in itertools.product(list(ctx.elements()), repeat=3 - lead):
            yield ProjPoint3([zero] * lead + [one] + list(tail))


def enumerate_hyperplanes(ctx: FieldCtx) -> Iterator[Hyperplane]:
    for P in enumerate_points(ctx):
        yield Hyperplane(P.coords)


def enumerate_lines(ctx: FieldCtx) -> list[Line3]:
    """All lines of P^3 over ctx, by echelon pattern."""
    elems = list(ctx.elements())
    zero, one = ctx.zero, ctx.one
    out = []
    for i, j in itertools.combinations(range(4), 2):
        free1 = [c for c in range(i + 1, 4) if c != j]
        free2 = [c for c in range(j + 1, 4)]
        for vals1 in itertools.product(elems, repeat=len(free1)):
            for vals2 in itertools.product(elems, repeat=len(free2)):
                r1 = [zero] * 4
                r2 = [zero] * 4
                r1[i] = one
                r2[j] = one
                for c, v in zip(free1, vals1):
                    r1[c] = v
                for c, v in zip(free2, vals2):
                    r2[c] = v
                out.append(Line3(r1, r2))
    out.sort(key=Line3.key)
    return out


def enumerate_plane_fq_lines(ctx: FieldCtx, plane: Hyperplane | None = None) -> list[Line3]:
    """The q^2+q+1 lines over ctx contained in ``plane`` (default {Z=0})."""
    if plane is None:
        plane = Hyperplane.of(ctx, 0, 0, 1, 0)
    seen = {}
    for H in enumerate_hyperplanes(ctx):
        if H == plane:
            continue
        L = Line3(plane, H)
        seen.setdefault(L.key(), L)
    return [seen[k] for k in sorted(seen)]
