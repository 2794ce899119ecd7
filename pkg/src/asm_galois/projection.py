"""Projection from a line: degree, fibers, stabilizer in Aut(X), Galois verdict.

A line is Galois exactly when the subgroup of Aut(X) commuting with the
projection has order equal to the projection degree; every automorphism of
the function field extension is a curve automorphism and Aut(X) is known
explicitly, so no function-field factorization is needed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from . import series as S
from .automorphisms import (
    AutElement,
    Subgroup,
    act_on_point,
    enumerate_aut,
    group_type,
    orbit,
    point_stabilizer,
    subgroup_generated,
    to_matrix,
)
from .curve import ASMCurve, CurvePoint
from .errors import (
    BaseOnBranchTooSmallField,
    ContextMismatch,
    ExtensionBoundExceeded,
    UnknownClass,
)
from .finite_field import FieldCtx, FieldElement
from .proj_geometry import Hyperplane, Line3, ProjPoint3, is_fq_line, nullspace, rank

TYPE_A_CENTER = "type-a-through-center"
TYPE_A_AVOID = "type-a-avoiding-center"
TYPE_B = "type-b"
TANGENT_B = "tangent-type-b"
NON_GALOIS = "non-galois"

GALOIS_CLASSES = (TYPE_A_CENTER, TYPE_A_AVOID, TYPE_B, TANGENT_B)


@dataclass(frozen=True)
class FiberPoint:
    point: CurvePoint
    ramification_index: int


@dataclass
class GaloisAnalysis:
    line: Line3
    degree: int
    intersections: list
    unresolved: int
    stabilizer: Subgroup
    is_galois: bool
    group_type: str
    classification: str
    certificates: list = field(default_factory=list)

    @property
    def stabilizer_order(self) -> int:
        return self.stabilizer.order

    def to_json(self, tower=None) -> dict:
        return {
            "line": self.line.to_json(),
            "equations": self.line.equations(),
            "degree": self.degree,
            "stabilizer_order": self.stabilizer.order,
            "group_type": self.group_type,
            "is_galois": self.is_galois,
            "classification": self.classification,
            "intersections": [
                {"point": P.to_json(tower), "multiplicity": m} for P, m in self.intersections
            ],
            "unresolved_multiplicity": self.unresolved,
            "certificates": self.certificates,
        }


def normalize_p1(lam: FieldElement, mu: FieldElement) -> tuple[FieldElement, FieldElement]:
    if mu:
        return lam / mu, mu.ctx.one
    return lam.ctx.one, lam.ctx.zero


class ProjectionMap:
    """pi(P) = (H1(phi P) : H2(phi P)) for the echelon pencil of a line."""

    def __init__(self, curve: ASMCurve, line: Line3):
        self.curve = curve
        self.line = line
        self.H1, self.H2 = line.pencil()

    def __call__(self, P: CurvePoint) -> tuple[FieldElement, FieldElement]:
        curve = self.curve
        ctx = curve.tower.common(P.ctx, self.line.ctx)
        v = curve.embed(P, ctx).coords
        h1 = self.H1.lift(curve.tower, ctx)(v)
        h2 = self.H2.lift(curve.tower, ctx)(v)
        if h1 or h2:
            return normalize_p1(h1, h2)
        # base point of the pencil: use leading series terms
        _, a, b = curve.pencil_data(P, self.line)
        return normalize_p1(a, b)


class GaloisAnalyzer:
    """Shared state for analysing many lines of one curve."""

    def __init__(self, curve: ASMCurve):
        self.curve = curve
        self.F = curve.F
        self.aut = enumerate_aut(curve.F)
        self._matrices: dict[int, list] = {}
        self._stabilizers: dict = {}
        self.quadric_space_dim = self._verify_unique_quadric()

    # -- the quadric-kernel commutation test ---------------------------------

    def _verify_unique_quadric(self) -> int:
        """Dimension of the space of quadrics through sampled curve points (must be 1)."""
        curve = self.curve
        pts = curve.affine_points(2)[:: max(1, len(curve.affine_points(2)) // 40)]
        pts = pts + curve.infinite_points()
        rows = []
        idx = [(i, j) for i in range(4) for j in range(i, 4)]
        for P in pts:
            v = curve.embed(P, curve.field(2)).coords
            rows.append([v[i] * v[j] for i, j in idx])
        dim = 10 - rank(rows)
        if dim != 1:
            raise AssertionError(f"quadrics through the curve form a space of dimension {dim}")
        return dim

    def _mats(self, ctx: FieldCtx) -> list:
        k = self.curve.level(ctx)
        mats = self._matrices.get(k)
        if mats is None:
            lift = self.curve.lift
            mats = []
            for s in self.aut:
                M = to_matrix(s)
                mats.append(tuple(tuple(lift(x, ctx).n for x in row) for row in M))
            self._matrices[k] = mats
        return mats

    @staticmethod
    def _kernel_test(ctx: FieldCtx, M, h1: Sequence[int], h2: Sequence[int]) -> bool:
        """H1(Mv)H2(v) - H2(Mv)H1(v) lies in the span of XY - ZW."""
        add, mul, sub = ctx.add, ctx.mul, ctx.sub

        def row_times(h):
            out = []
            for j in range(4):
                acc = 0
                for i in range(4):
                    if h[i] and M[i][j]:
                        acc = add(acc, mul(h[i], M[i][j]))
                out.append(acc)
            return out

        a, c = row_times(h1), row_times(h2)
        b, d = h2, h1
        # diagonal coefficients
        for i in range(4):
            if sub(mul(a[i], b[i]), mul(c[i], d[i])):
                return False

        def off(i, j):
            return sub(add(mul(a[i], b[j]), mul(a[j], b[i])), add(mul(c[i], d[j]), mul(c[j], d[i])))

        for i, j in ((0, 2), (0, 3), (1, 2), (1, 3)):
            if off(i, j):
                return False
        return add(off(0, 1), off(2, 3)) == 0

    def commutes_with_projection(self, sigma: AutElement, line: Line3) -> bool:
        ctx = line.ctx
        M = tuple(tuple(self.curve.lift(x, ctx).n for x in row) for row in to_matrix(sigma))
        return self._kernel_test(ctx, M, [h.n for h in line.H1.coeffs], [h.n for h in line.H2.coeffs])

    def pointwise_points(self, line: Line3) -> list[CurvePoint]:
        """More than 4q distinct curve points over the smallest F_{q^k} containing
        both F_{q^3} and the line's field and having that many affine points
        (F_{q^3} itself has none for some q, e.g. 5 and 8)."""
        curve = self.curve
        step = math.lcm(curve.level(line.ctx), 3)
        need = 4 * curve.q + 1
        k = step
        while len(curve.affine_points(k)) < need:
            k += step
        pts = curve.affine_points(k)
        step = max(1, len(pts) // need)
        return pts[::step][:need]

    def commutes_pointwise(self, sigma: AutElement, line: Line3, points: Sequence[CurvePoint] | None = None) -> bool:
        """pi(sigma P) = pi(P) on > 4q points; a nonzero quadric restricted to
        the degree-2q curve vanishes at no more than 4q points."""
        curve = self.curve
        pts = points if points is not None else self.pointwise_points(line)
        ctx = curve.tower.common(pts[0].ctx, line.ctx)
        H1, H2 = line.H1.lift(curve.tower, ctx), line.H2.lift(curve.tower, ctx)
        for P in pts:
            v = curve.embed(P, ctx).coords
            w = curve.embed(act_on_point(sigma, P, curve), ctx).coords
            if H1(w) * H2(v) != H2(w) * H1(v):
                return False
        return True

    def stabilizer(self, line: Line3, pointwise: bool = False) -> Subgroup:
        key = (line, pointwise)
        hit = self._stabilizers.get(key)
        if hit is not None:
            return hit
        if pointwise:
            pts = self.pointwise_points(line)
            elems = [s for s in self.aut if self.commutes_pointwise(s, line, pts)]
        else:
            ctx = line.ctx
            h1 = [h.n for h in line.H1.coeffs]
            h2 = [h.n for h in line.H2.coeffs]
            elems = [s for s, M in zip(self.aut, self._mats(ctx)) if self._kernel_test(ctx, M, h1, h2)]
        G = Subgroup(elems)
        self._stabilizers[key] = G
        return G

    # -- degree, classification, verdict -------------------------------------

    def projection_degree(self, line: Line3) -> tuple[int, list, int]:
        """(degree, explicit intersections, multiplicity of unlocated intersections)."""
        pts, expected = self.curve.intersection_data(line)
        found = sum(m for _, m in pts)
        degree = 2 * self.curve.q - expected
        return degree, pts, expected - found

    def classify(self, line: Line3) -> str:
        return line_class(self.curve, line)[0]

    def analyze(self, line: Line3) -> GaloisAnalysis:
        degree, pts, unresolved = self.projection_degree(line)
        G = self.stabilizer(line)
        return GaloisAnalysis(
            line=line,
            degree=degree,
            intersections=pts,
            unresolved=unresolved,
            stabilizer=G,
            is_galois=G.order == degree,
            group_type=group_type(G),
            classification=self.classify(line),
        )

    # -- fibers --------------------------------------------------------------

    def fiber(self, line: Line3, base: tuple[FieldElement, FieldElement], k: int,
              require_complete: bool = False) -> list[FiberPoint]:
        """Points over F_{q^k} with pi-value base, with ramification indices."""
        curve = self.curve
        ctx = curve.field(k)
        if k % curve.level(line.ctx):
            raise ContextMismatch("fiber field must contain the line's field")
        lam, mu = (curve.lift(v, ctx) for v in base)
        L = line.lift(curve.tower, ctx)
        M = Hyperplane([mu * a - lam * b for a, b in zip(L.H1.coeffs, L.H2.coeffs)])
        hX, hY, hZ, hW = M.coeffs
        cands = list(curve.solve_affine_points(("bilinear", (hX, hY, hZ, hW)), k))
        for P in curve.infinite_points():
            if M.contains(curve.embed(P, ctx)):
                cands.append(P)
        out = []
        for P in cands:
            vP = curve.embed(P, ctx)
            if L.contains(vP):
                m, a, b = curve.pencil_data(P, L)
                if (a * mu - b * lam).is_zero():
                    e = curve._with_escalation(
                        lambda n: _order(curve, P, M, n) - m, None)
                    out.append(FiberPoint(P, e))
            else:
                out.append(FiberPoint(P, curve.ord_hyperplane(P, M)))
        if require_complete:
            degree = self.projection_degree(line)[0]
            total = sum(f.ramification_index for f in out)
            if total < degree:
                raise BaseOnBranchTooSmallField(f"fiber over {base} has {total} of {degree} points over F_q^{k}")
        return out

    def fiber_level(self, line: Line3, min_bases: int = 14) -> int:
        """Field degree for sampling fibers.

        Starts at the line's field (F_{q^2} for F_q-lines, which have no affine
        F_q-points) and doubles until the curve points over it give at least
        min_bases distinct pi-values.  Fields past the search bound are taken
        as soon as the tower can build them: they carry about q^k points.
        """
        curve = self.curve
        j = curve.level(line.ctx)
        k = 2 if j == 1 else j
        while curve.tower.can_build(2 * k):
            if curve.q**k > curve.search_bound:
                return k
            pi = ProjectionMap(curve, line)
            values = {tuple(v.n for v in pi(P)) for P in curve.all_points(k)}
            if len(values) >= min_bases:
                return k
            k *= 2
        return k

    def _affine_sample(self, k: int, rng: random.Random) -> Iterator[CurvePoint]:
        """Affine points over F_{q^k} in random order.

        Enumerates the field under the search bound; above it draws random x
        and solves for y.
        """
        curve = self.curve
        if curve.q**k <= curve.search_bound:
            pts = list(curve.affine_points(k))
            rng.shuffle(pts)
            yield from pts
            return
        ctx = curve.field(k)
        for _ in range(64 * ctx.cardinality.bit_length() * curve.q):
            yield from curve.solve_affine_points(("x", ctx.random(rng)), k)

    def sample_bases(self, line: Line3, k: int, n: int, rng: random.Random,
                     include_infinite: bool = True) -> list[tuple[FieldElement, FieldElement]]:
        """Distinct pi-values of curve points over F_{q^k} (ramified ones first)."""
        curve = self.curve
        pi = ProjectionMap(curve, line)
        ctx = curve.field(k)
        seen: dict = {}
        if include_infinite:
            for P in curve.infinite_points():
                b = tuple(curve.lift(v, ctx) for v in pi(P))
                seen.setdefault((b[0].n, b[1].n), b)
        for P in self._affine_sample(k, rng):
            if len(seen) >= n:
                break
            b = pi(P)
            seen.setdefault((b[0].n, b[1].n), b)
        return list(seen.values())[:n]

    def ramification_consistency(self, line: Line3, bases: Sequence, k: int,
                                 analysis: GaloisAnalysis | None = None) -> dict:
        """Check the Galois-cover fiber facts on sampled fibers.

        For a Galois line: indices are uniform on each complete fiber, the
        stabilizer acts transitively on it, and point stabilizers have order
        equal to the index.  For other lines, mixed-index fibers are recorded
        as certificates of non-Galois-ness.
        """
        analysis = analysis or self.analyze(line)
        G = analysis.stabilizer
        report = {"line": line.equations(), "is_galois": analysis.is_galois, "fibers": 0,
                  "complete": 0, "uniform": True, "transitive": True,
                  "stabilizer_matches_index": True, "certificates": []}
        for base in bases:
            fib = self.fiber(line, base, k)
            report["fibers"] += 1
            total = sum(f.ramification_index for f in fib)
            if total != analysis.degree:
                continue
            report["complete"] += 1
            indices = {f.ramification_index for f in fib}
            if analysis.is_galois:
                if len(indices) != 1:
                    report["uniform"] = False
                pts = {f.point for f in fib}
                if orbit(G, fib[0].point, self.curve) != pts:
                    report["transitive"] = False
                for f in fib:
                    if len(point_stabilizer(G, f.point, self.curve)) != f.ramification_index:
                        report["stabilizer_matches_index"] = False
            elif len(indices) > 1:
                report["certificates"].append({
                    "base": [base[0].coords, base[1].coords],
                    "indices": sorted(f.ramification_index for f in fib),
                })
        report["ok"] = (not analysis.is_galois) or (
            report["uniform"] and report["transitive"] and report["stabilizer_matches_index"])
        return report

    # -- expected generators ---------------------------------------------------

    def expected_subgroup(self, line: Line3) -> Subgroup:
        tag, params = line_class(self.curve, line)
        return subgroup_generated(expected_generators(tag, params, self.F), self.F)


def _order(curve: ASMCurve, P: CurvePoint, H: Hyperplane, n: int) -> int:
    return S.order(curve.pullback(P, H, n))


# -- structural line classes ---------------------------------------------------

def line_class(curve: ASMCurve, line: Line3) -> tuple[str, dict]:
    """Pattern-match a line against the Galois families.

    Returns (tag, params).  params carries 'family' ('L1'/'L2' meaning the
    projection is y resp. x up to translation) and the family parameters.
    """
    F = line.ctx
    Z = Hyperplane.of(F, 0, 0, 1, 0)
    if line.inside(Z):
        if not is_fq_line(line, curve.q):
            return NON_GALOIS, {}
        # the pencil member with zero Z-coefficient
        (lam, mu), = nullspace([[line.H1.coeffs[2], line.H2.coeffs[2]]], 2, F)
        h = line.member(lam, mu).coeffs
        hX, hY, _, hW = (curve.to_fq(v) for v in h)
        if not hW:
            if not hX:
                return TYPE_A_CENTER, {"family": "L1"}  # Y = Z = 0
            if not hY:
                return TYPE_A_CENTER, {"family": "L2"}  # X = Z = 0
            return TYPE_A_CENTER, {"family": "diagonal", "alpha": -hY / hX}  # X - alpha Y
        return TYPE_A_AVOID, {"alpha": hX / hW, "beta": hY / hW}
    ruling = curve.ruling(line)
    if ruling is not None:
        fam, a = ruling
        family = "L2" if fam == "y" else "L1"
        if curve.is_in_fq(a):
            return TANGENT_B, {"family": family, "a": a}
        return TYPE_B, {"family": family, "a": a}
    return NON_GALOIS, {}


def expected_generators(tag: str, params: dict, F: FieldCtx) -> list[AutElement]:
    """Generators of the Galois group for each family, as read off the explicit
    actions that leave the projection invariant."""
    basis = [F.from_coords([0] * i + [1]) for i in range(F.e)]
    zero, one = F.zero, F.one
    if tag in (TYPE_A_CENTER, TYPE_B, TANGENT_B) and params.get("family") in ("L1", "L2"):
        if params["family"] == "L2":  # projection is x: y -> y + beta
            return [AutElement.translation(zero, v) for v in basis]
        return [AutElement.translation(v, zero) for v in basis]
    if tag == TYPE_A_CENTER:
        alpha = params["alpha"]
        # t = x - alpha y is fixed by (x, y) -> (x + alpha beta, y + beta) and by
        # the swap-type involution (x, y) -> (-alpha y, -x / alpha)
        gens = [AutElement.translation(alpha * v, v) for v in basis]
        return gens + [AutElement(-alpha, zero, zero, 1)]
    if tag == TYPE_A_AVOID:
        alpha, beta = params["alpha"], params["beta"]
        # alpha x + beta y + xy = (x + beta)(y + alpha) - alpha beta
        g = F.primitive
        return [
            AutElement(g, (g - 1) * beta, (g.inverse() - 1) * alpha, 0),
            AutElement(one, alpha - beta, beta - alpha, 1),
        ]
    raise UnknownClass(tag)
