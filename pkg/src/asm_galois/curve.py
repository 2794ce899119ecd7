"""The Artin-Schreier-Mumford curve (x^q - x)(y^q - y) = c and its embedding in P^3.

The smooth model X has the affine points of the plane curve plus 2q points
at infinity: P_alpha (pole of x where y -> alpha) and Q_alpha (pole of y
where x -> alpha), alpha in F_q.  X is embedded by (x : y : 1 : xy), which
lands on the quadric XY = ZW.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Sequence

from . import series as S
from .errors import (
    DegenerateConstraint,
    ExtensionBoundExceeded,
    NotOnHyperplane,
    PrecisionExhausted,
    PrecisionTooSmall,
)
from .finite_field import (
    DEFAULT_MAX_CARDINALITY,
    FieldCtx,
    FieldElement,
    FieldTower,
    Poly,
    poly_roots,
    prime_power,
)
from .proj_geometry import Hyperplane, Line3, ProjPoint3, nullspace

DEFAULT_K_MAX = 3
# largest field searched exhaustively for intersection points
DEFAULT_SEARCH_BOUND = 2**16


@dataclass(frozen=True)
class CurvePoint:
    """A point of the smooth model: affine (x, y), P_alpha or Q_alpha."""

    kind: str
    x: FieldElement | None = None
    y: FieldElement | None = None
    alpha: FieldElement | None = None

    @classmethod
    def affine(cls, x: FieldElement, y: FieldElement) -> CurvePoint:
        return cls("affine", x=x, y=y)

    @classmethod
    def P(cls, alpha: FieldElement) -> CurvePoint:
        return cls("P", alpha=alpha)

    @classmethod
    def Q(cls, alpha: FieldElement) -> CurvePoint:
        return cls("Q", alpha=alpha)

    @property
    def is_affine(self) -> bool:
        return self.kind == "affine"

    @property
    def ctx(self) -> FieldCtx:
        return self.x.ctx if self.is_affine else self.alpha.ctx

    def __repr__(self) -> str:
        if self.is_affine:
            return f"({self.x}, {self.y})"
        return f"{self.kind}_{self.alpha}"

    def to_json(self, tower: FieldTower | None = None) -> dict:
        if self.is_affine:
            k = tower.degree(self.ctx) if tower else self.ctx.e
            return {"kind": "affine", "k": k, "x": self.x.coords, "y": self.y.coords}
        return {"kind": self.kind, "alpha": self.alpha.coords}


@dataclass(frozen=True)
class LocalExpansion:
    point: CurvePoint
    parameter: str
    series: tuple  # four truncated series, one per coordinate of phi
    precision: int


def on_quadric(P: ProjPoint3) -> bool:
    """True iff XY - ZW = 0."""
    return _quad(P).is_zero()


def _quad(P: ProjPoint3) -> FieldElement:
    X, Y, Z, W = P.coords
    return X * Y - Z * W


def _bilinear(A: ProjPoint3, B: ProjPoint3) -> FieldElement:
    a, b = A.coords, B.coords
    return a[0] * b[1] + a[1] * b[0] - a[2] * b[3] - a[3] * b[2]


class ASMCurve:
    """Curve parameters (p, q, c) plus the tower of fields F_{q^k}."""

    def __init__(self, q: int, c: int | FieldElement = 1, k_max: int = DEFAULT_K_MAX,
                 max_cardinality: int = DEFAULT_MAX_CARDINALITY,
                 search_bound: int = DEFAULT_SEARCH_BOUND):
        pe = prime_power(q)
        if pe is None:
            raise ValueError(f"q = {q} is not a prime power")
        if q < 3:
            raise ValueError("the curve needs q >= 3")
        self.p, self.e = pe
        self.q = q
        self.tower = FieldTower(self.p, self.e, max_cardinality)
        self.F = self.tower.base
        if isinstance(c, FieldElement):
            c = self.tower.embed(c, self.F) if c.ctx != self.F else c
        else:
            c = self.F.from_int(c % q)
        if c.is_zero():
            raise ValueError("c must be nonzero")
        self.c = c
        self.k_max = k_max
        self.search_bound = search_bound
        self.default_precision = 2 * q + 2
        self.max_precision = 8 * q
        self._lock = threading.Lock()
        self._affine: dict[int, list[CurvePoint]] = {}
        self._as_tables: dict[int, dict[int, list[int]]] = {}
        self._expansions: dict = {}

    def __repr__(self) -> str:
        return f"ASMCurve(q={self.q}, c={self.c})"

    def describe(self) -> dict:
        return {"p": self.p, "q": self.q, "c": self.c.coords, "field": self.F.describe()}

    # -- fields ------------------------------------------------------------

    def field(self, k: int) -> FieldCtx:
        return self.tower.field(k)

    def lift(self, x: FieldElement, ctx: FieldCtx) -> FieldElement:
        return self.tower.embed(x, ctx)

    def level(self, ctx: FieldCtx) -> int:
        return self.tower.degree(ctx)

    def c_in(self, ctx: FieldCtx) -> FieldElement:
        return self.tower.embed(self.c, ctx)

    def is_in_fq(self, x: FieldElement) -> bool:
        return x**self.q == x

    def to_fq(self, x: FieldElement) -> FieldElement:
        return self.tower.descend(x, 1)

    # -- points --------------------------------------------------------------

    def infinite_points(self) -> list[CurvePoint]:
        return [CurvePoint.P(a) for a in self.F.elements()] + [CurvePoint.Q(a) for a in self.F.elements()]

    def contains(self, P: CurvePoint) -> bool:
        if not P.is_affine:
            return P.alpha.ctx == self.F
        q, c = self.q, self.c_in(P.ctx)
        return ((P.x**q - P.x) * (P.y**q - P.y)) == c

    def _as_table(self, ctx: FieldCtx) -> dict[int, list[int]]:
        """Preimages of z under y -> y^q - y, keyed by packed z."""
        k = self.level(ctx)
        table = self._as_tables.get(k)
        if table is None:
            table = {}
            q = self.q
            for y in range(ctx.cardinality):
                z = ctx.sub(ctx.pow(y, q), y)
                table.setdefault(z, []).append(y)
            with self._lock:
                self._as_tables[k] = table
        return table

    def affine_points(self, k: int) -> list[CurvePoint]:
        """Every affine point over F_{q^k}, by direct enumeration over x."""
        pts = self._affine.get(k)
        if pts is None:
            ctx = self.field(k)
            table = self._as_table(ctx)
            c = self.c_in(ctx).n
            pts = []
            for x in range(ctx.cardinality):
                u = ctx.sub(ctx.pow(x, self.q), x)
                if u == 0:
                    continue
                d = ctx.mul(c, ctx.inv(u))
                for y in table.get(d, ()):
                    pts.append(CurvePoint.affine(FieldElement(ctx, x), FieldElement(ctx, y)))
            with self._lock:
                self._affine[k] = pts
        return pts

    def all_points(self, k: int) -> list[CurvePoint]:
        return self.affine_points(k) + self.infinite_points()

    def embed(self, P: CurvePoint, ctx: FieldCtx | None = None) -> ProjPoint3:
        """phi(P) = (x : y : 1 : xy), with phi(P_a) = (1:0:0:a), phi(Q_a) = (0:1:0:a)."""
        ctx = ctx or P.ctx
        one, zero = ctx.one, ctx.zero
        if P.is_affine:
            x, y = self.lift(P.x, ctx), self.lift(P.y, ctx)
            return ProjPoint3([x, y, one, x * y])
        a = self.lift(P.alpha, ctx)
        if P.kind == "P":
            return ProjPoint3([one, zero, zero, a])
        return ProjPoint3([zero, one, zero, a])

    def lift_point(self, P: CurvePoint, ctx: FieldCtx) -> CurvePoint:
        if not P.is_affine or P.ctx == ctx:
            return P
        return CurvePoint.affine(self.lift(P.x, ctx), self.lift(P.y, ctx))

    def point_from_proj(self, R: ProjPoint3) -> CurvePoint | None:
        """The smooth-model point over R, or None if R is not on phi(X)."""
        X, Y, Z, W = R.coords
        if Z:
            x, y = X / Z, Y / Z
            if W / Z != x * y:
                return None
            P = CurvePoint.affine(x, y)
            return P if self.contains(P) else None
        if X and not Y and self.is_in_fq(W / X):
            return CurvePoint.P(self.to_fq(W / X))
        if Y and not X and self.is_in_fq(W / Y):
            return CurvePoint.Q(self.to_fq(W / Y))
        return None

    # -- constrained point search ------------------------------------------

    def solve_affine_points(self, constraint: tuple, k: int) -> list[CurvePoint]:
        """Affine points over F_{q^k} meeting a constraint.

        constraint is ("x", x0), ("y", y0) or ("bilinear", (hX, hY, hZ, hW)),
        the last meaning hX*x + hY*y + hZ + hW*x*y = 0 (a hyperplane section).
        """
        ctx = self.field(k)
        kind, data = constraint
        if kind in ("x", "y"):
            v = self.lift(data, ctx)
            u = v**self.q - v
            if u.is_zero():
                return []
            # the other coordinate solves T^q - T - c/u
            f = Poly(ctx, [-(self.c_in(ctx) / u), -1] + [0] * (self.q - 2) + [1])
            roots = [r for r, _ in poly_roots(f, ctx)]
            if kind == "x":
                return [CurvePoint.affine(v, r) for r in roots]
            return [CurvePoint.affine(r, v) for r in roots]
        if kind != "bilinear":
            raise ValueError(f"unknown constraint kind {kind!r}")
        hX, hY, hZ, hW = (self.lift(h, ctx) for h in data)
        if not (hX or hY or hZ or hW):
            raise DegenerateConstraint("the zero form contains the whole curve")
        if not hW and not hY:
            if not hX:
                return []
            return self.solve_affine_points(("x", -hZ / hX), k)
        if not hW and not hX:
            return self.solve_affine_points(("y", -hZ / hY), k)
        if hW and hX * hY == hZ * hW:
            # hW (x + hY/hW)(y + hX/hW): union of two rulings
            a = self.solve_affine_points(("x", -hY / hW), k)
            b = self.solve_affine_points(("y", -hX / hW), k)
            return a + [P for P in b if P not in a]
        num = Poly(ctx, [-hZ, -hX])
        den = Poly(ctx, [hY, hW])
        q = self.q
        xq_x = Poly.monomial(ctx, q) - Poly.monomial(ctx, 1)
        f = xq_x * (num**q - num * den ** (q - 1)) - den**q * self.c_in(ctx)
        if f.is_zero():  # pragma: no cover - impossible for an irreducible curve
            raise DegenerateConstraint("hyperplane section contains the curve")
        out = []
        for x0, _ in poly_roots(f, ctx):
            d = den(x0)
            if d.is_zero():
                continue
            P = CurvePoint.affine(x0, num(x0) / d)
            if self.contains(P):
                out.append(P)
        return out

    # -- local expansions ----------------------------------------------------

    def local_expansion(self, P: CurvePoint, N: int | None = None,
                        ctx: FieldCtx | None = None) -> LocalExpansion:
        """Truncated expansion of phi around P in a local parameter.

        Affine points use x - x0 (f_y = -(x^q - x) never vanishes on the curve);
        P_alpha uses t = 1/x with phi = (1 : y t : t : y); Q_alpha uses s = 1/y.
        """
        N = self.default_precision if N is None else N
        if N < 1:
            raise PrecisionTooSmall(f"precision {N} < 1")
        ctx = ctx or P.ctx
        key = (P, N, ctx)
        hit = self._expansions.get(key)
        if hit is not None:
            return hit
        q = self.q
        c = self.c_in(ctx)
        one = ctx.one
        if P.is_affine:
            x0, y0 = self.lift(P.x, ctx), self.lift(P.y, ctx)
            # x = x0 + s, x^q - x = (x0^q - x0) - s + s^q
            A = S.zeros(ctx, N)
            A[0] = x0**q - x0
            if N > 1:
                A[1] = A[1] - one
            if q < N:
                A[q] = A[q] + one
            B = S.scale(S.inverse(A), c)
            D = list(B)
            D[0] = ctx.zero
            y = S.artin_schreier(D, q)
            y[0] = y0
            x = S.monomial(ctx, 1, N)
            x[0] = x0
            coords = (x, y, S.const(one, N), S.mul(x, y))
            param = "x-x0"
        else:
            a = self.lift(P.alpha, ctx)
            # y^q - y = c t^q / (1 - t^(q-1))
            geo = S.zeros(ctx, N)
            for i in range(0, N, q - 1):
                geo[i] = one
            s = S.mul(S.monomial(ctx, q, N, c), geo)
            u = S.artin_schreier(s, q)
            u[0] = a
            t = S.monomial(ctx, 1, N)
            if P.kind == "P":
                coords = (S.const(one, N), S.mul(u, t), t, u)
                param = "t=1/x"
            else:
                coords = (S.mul(u, t), S.const(one, N), t, u)
                param = "s=1/y"
        exp = LocalExpansion(P, param, coords, N)
        with self._lock:
            self._expansions[key] = exp
        return exp

    def expansion_residual(self, exp: LocalExpansion) -> list[FieldElement]:
        """The curve equation evaluated on an expansion (all zero when consistent)."""
        q = self.q
        X, Y, Z, W = exp.series
        ctx = X[0].ctx
        c = self.c_in(ctx)
        N = exp.precision
        if exp.point.is_affine:
            fx = S.sub(S.frobenius(X, q), X)
            fy = S.sub(S.frobenius(Y, q), Y)
            return S.sub(S.mul(fx, fy), S.const(c, N))
        # at infinity: (1 - t^(q-1)) (u^q - u) - c t^q with u the finite coordinate
        u = W
        lhs = S.mul(S.sub(S.const(ctx.one, N), S.monomial(ctx, q - 1, N)),
                    S.sub(S.frobenius(u, q), u))
        return S.sub(lhs, S.monomial(ctx, q, N, c))

    def pullback(self, P: CurvePoint, H: Hyperplane, N: int | None = None) -> S.Series:
        """H composed with the local expansion of phi at P."""
        ctx = self.tower.common(P.ctx, H.ctx)
        h = [self.lift(v, ctx) for v in H.coeffs]
        exp = self.local_expansion(P, N, ctx)
        out = S.zeros(ctx, exp.precision)
        for coeff, ser in zip(h, exp.series):
            if coeff:
                out = S.add(out, S.scale(ser, coeff))
        return out

    def _with_escalation(self, fn, N: int | None):
        if N is not None:
            return fn(N)
        N = self.default_precision
        while True:
            try:
                return fn(N)
            except PrecisionExhausted:
                if 2 * N > self.max_precision:
                    raise
                N *= 2

    def ord_hyperplane(self, P: CurvePoint, H: Hyperplane, N: int | None = None) -> int:
        """Order of vanishing at P of the pullback of H (H must pass through phi(P))."""
        ctx = self.tower.common(P.ctx, H.ctx)
        if not H.lift(self.tower, ctx).contains(self.embed(P, ctx)):
            raise NotOnHyperplane(f"{H} does not pass through phi({P})")
        return self._with_escalation(lambda n: S.order(self.pullback(P, H, n)), N)

    def pencil_data(self, P: CurvePoint, line: Line3, N: int | None = None):
        """(m, a, b): m = min order of the pencil basis at P, (a : b) their t^m coefficients.

        (a : b) is the value at P of the projection from the line, extended to
        the smooth model.
        """
        def go(n):
            h1 = self.pullback(P, line.H1, n)
            h2 = self.pullback(P, line.H2, n)
            for i in range(n):
                if h1[i] or h2[i]:
                    return i, h1[i], h2[i]
            raise PrecisionExhausted("pencil vanishes to precision")

        return self._with_escalation(go, N)

    # -- lines -------------------------------------------------------------

    def ruling(self, line: Line3):
        """Identify line as a ruling of XY = ZW.

        Returns ("y", a) for {Y - aZ = W - aX = 0} (a=None meaning L2 = {X=Z=0}),
        ("x", a) for {X - aZ = W - aY = 0} (a=None meaning L1 = {Y=Z=0}), or None.
        """
        A, B = line.spanning_points()
        if not (on_quadric(A) and on_quadric(B) and _bilinear(A, B).is_zero()):
            return None

        def member(support):
            rows = [[h[i] for h in (line.H1.coeffs, line.H2.coeffs)] for i in range(4) if i not in support]
            ker = nullspace(rows, 2, line.ctx)
            if len(ker) != 1:
                return None
            lam, mu = ker[0]
            return [lam * a + mu * b for a, b in zip(line.H1.coeffs, line.H2.coeffs)]

        for fam, (fin, other) in (("y", ((1, 2), (0, 3))), ("x", ((0, 2), (1, 3)))):
            m1, m2 = member(fin), member(other)
            if m1 is None or m2 is None:
                continue
            coord, zc = m1[fin[0]], m1[2]
            if not coord:
                return fam, None
            return fam, -zc / coord
        return None

    def _quadric_points(self, line: Line3):
        """Points of line on XY = ZW over the line field or its quadratic extension.

        Returns None if the line lies on the quadric.
        """
        F = line.ctx
        A, B = line.spanning_points()
        qa, qb, bil = _quad(A), _quad(B), _bilinear(A, B)
        if not (qa or qb or bil):
            return None
        # (lam A + B): qa lam^2 + bil lam + qb; plus lam = infinity iff qa = 0
        j = self.level(F)
        for ctx in (F, self.field(2 * j)):
            f = Poly(F, [qb, bil, qa]).map(lambda v: self.lift(v, ctx))
            roots = poly_roots(f, ctx)
            total = sum(m for _, m in roots) + (1 if qa.is_zero() else 0)
            if total == 2 or (qa.is_zero() and bil.is_zero()):
                break
        pts = []
        Al, Bl = A.lift(self.tower, ctx), B.lift(self.tower, ctx)
        if qa.is_zero():
            pts.append(Al)
        for r, _ in roots:
            pts.append(ProjPoint3([r * a + b for a, b in zip(Al.coords, Bl.coords)]))
        return pts

    def multiplicity(self, P: CurvePoint, line: Line3, N: int | None = None) -> int:
        """Intersection multiplicity: min over the pencil basis of ord_P."""
        return self.pencil_data(P, line, N)[0]

    def intersection_data(self, line: Line3, k_max: int | None = None):
        """(points-with-multiplicity, expected total multiplicity).

        For a ruling y = a the intersection is the fiber of y over a, of total
        multiplicity q (y has degree q); points beyond the searched fields are
        then missing from the explicit list.  Any other line meets the quadric
        in at most two points, all found in a quadratic extension.
        """
        k_max = self.k_max if k_max is None else k_max
        ruling = self.ruling(line)
        if ruling is None:
            out = []
            for R in self._quadric_points(line):
                P = self.point_from_proj(R)
                if P is not None and all(P != Q for Q, _ in out):
                    out.append((P, self.multiplicity(P, line)))
            return out, sum(m for _, m in out)
        fam, a = ruling
        if a is None:
            pts = [P for P in self.infinite_points() if P.kind == ("Q" if fam == "y" else "P")]
            return [(P, self.multiplicity(P, line)) for P in pts], self.q
        if self.is_in_fq(a):
            P = CurvePoint.P(self.to_fq(a)) if fam == "y" else CurvePoint.Q(self.to_fq(a))
            return [(P, self.multiplicity(P, line))], self.q
        j = self.level(line.ctx)
        found: list = []
        for m in range(1, k_max + 1):
            k = j * m
            if self.q**k > self.search_bound or not self.tower.can_build(k):
                break
            ctx = self.field(k)
            pts = self.solve_affine_points((fam, self.lift(a, ctx)), k)
            if pts:
                found = [(P, self.multiplicity(P, line)) for P in pts]
                break
        return found, self.q

    def line_curve_intersections(self, line: Line3, k_max: int | None = None) -> list[tuple[CurvePoint, int]]:
        pts, expected = self.intersection_data(line, k_max)
        found = sum(m for _, m in pts)
        if found != expected:
            raise ExtensionBoundExceeded(
                f"found multiplicity {found} of {expected} for {line}", found, expected)
        return pts
