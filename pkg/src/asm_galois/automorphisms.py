"""The automorphism group of the ASM curve, of order 2q^2(q-1).

An element is a tuple (gamma, a, b, swap) acting on points by

    swap = 0:  (x, y) -> (gamma x + a, y / gamma + b)
    swap = 1:  (x, y) -> (gamma y + a, x / gamma + b)

i.e. sigma = T_{a,b} o D_gamma o W^swap with W the coordinate swap.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .curve import ASMCurve, CurvePoint
from .errors import NotClosed
from .finite_field import FieldCtx, FieldElement

TRIVIAL = "trivial"
FQ = "F_q"
FQ_C2 = "F_q:C2"
FQSTAR_C2 = "F_q*:C2"


@dataclass(frozen=True)
class AutElement:
    gamma: FieldElement
    a: FieldElement
    b: FieldElement
    swap: int = 0

    @classmethod
    def identity(cls, F: FieldCtx) -> AutElement:
        return cls(F.one, F.zero, F.zero, 0)

    @classmethod
    def translation(cls, a: FieldElement, b: FieldElement) -> AutElement:
        return cls(a.ctx.one, a, b, 0)

    @classmethod
    def scaling(cls, gamma: FieldElement) -> AutElement:
        F = gamma.ctx
        return cls(gamma, F.zero, F.zero, 0)

    @classmethod
    def swap_map(cls, F: FieldCtx) -> AutElement:
        return cls(F.one, F.zero, F.zero, 1)

    def key(self) -> tuple[int, int, int, int]:
        return (self.swap, self.gamma.n, self.a.n, self.b.n)

    def __lt__(self, other: AutElement) -> bool:
        return self.key() < other.key()

    def __mul__(self, other: AutElement) -> AutElement:
        return compose(self, other)

    def is_identity(self) -> bool:
        return self.swap == 0 and self.gamma == 1 and not self.a and not self.b

    def inverse(self) -> AutElement:
        g, a, b = self.gamma, self.a, self.b
        gi = g.inverse()
        if self.swap == 0:
            return AutElement(gi, -gi * a, -g * b, 0)
        return AutElement(g, -g * b, -gi * a, 1)

    def order(self) -> int:
        n, x = 1, self
        while not x.is_identity():
            x = compose(x, self)
            n += 1
        return n

    def __repr__(self) -> str:
        return f"Aut(gamma={self.gamma}, a={self.a}, b={self.b}, swap={self.swap})"

    def to_json(self) -> dict:
        return {"gamma": self.gamma.coords, "a": self.a.coords, "b": self.b.coords, "swap": self.swap}


def compose(sigma: AutElement, tau: AutElement) -> AutElement:
    """sigma o tau (apply tau first)."""
    if sigma.swap:
        c, d, delta = tau.b, tau.a, tau.gamma.inverse()
    else:
        c, d, delta = tau.a, tau.b, tau.gamma
    g = sigma.gamma
    return AutElement(g * delta, sigma.a + g * c, sigma.b + d / g, sigma.swap ^ tau.swap)


def act_on_point(sigma: AutElement, P: CurvePoint, curve: ASMCurve) -> CurvePoint:
    if P.is_affine:
        ctx = P.ctx
        g, a, b = (curve.lift(v, ctx) for v in (sigma.gamma, sigma.a, sigma.b))
        x, y = (P.y, P.x) if sigma.swap else (P.x, P.y)
        return CurvePoint.affine(g * x + a, y / g + b)
    g, a, b, al = sigma.gamma, sigma.a, sigma.b, P.alpha
    lands_in_P = (P.kind == "P") != bool(sigma.swap)
    # a pole of x keeps y finite (and vice versa); the finite coordinate moves affinely
    if lands_in_P:
        return CurvePoint.P(al / g + b)
    return CurvePoint.Q(g * al + a)


def to_matrix(sigma: AutElement) -> tuple[tuple[FieldElement, ...], ...]:
    """4x4 matrix M with phi(sigma P) = M phi(P), first nonzero entry scaled to 1."""
    g, a, b = sigma.gamma, sigma.a, sigma.b
    F = g.ctx
    z, one = F.zero, F.one
    gi = g.inverse()
    if sigma.swap == 0:
        rows = [
            [g, z, a, z],
            [z, gi, b, z],
            [z, z, one, z],
            [g * b, gi * a, a * b, one],
        ]
    else:
        rows = [
            [z, g, a, z],
            [gi, z, b, z],
            [z, z, one, z],
            [gi * a, g * b, a * b, one],
        ]
    return normalize_matrix(rows)


def normalize_matrix(rows: Sequence[Sequence[FieldElement]]) -> tuple[tuple[FieldElement, ...], ...]:
    flat = [x for r in rows for x in r]
    lead = next(x for x in flat if x)
    inv = lead.inverse()
    return tuple(tuple(x * inv for x in r) for r in rows)


def matmul(A, B):
    n = len(A)
    return tuple(
        tuple(sum((A[i][k] * B[k][j] for k in range(n)), A[0][0].ctx.zero) for j in range(n))
        for i in range(n)
    )


def apply_matrix(M, v: Sequence[FieldElement]) -> list[FieldElement]:
    return [sum((m * x for m, x in zip(row, v)), v[0].ctx.zero) for row in M]


class Subgroup:
    """A finite set of automorphisms closed under composition."""

    def __init__(self, elements: Iterable[AutElement], generators: Sequence[AutElement] | None = None,
                 check: bool = True):
        self.elements = sorted(set(elements))
        self._set = frozenset(self.elements)
        if check:
            self.verify_closed()
        self.generators = list(generators) if generators is not None else self._greedy_generators()

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x: AutElement) -> bool:
        return x in self._set

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self._set == other._set

    def __hash__(self) -> int:
        return hash(self._set)

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order})"

    def verify_closed(self) -> None:
        """Pairwise closure and inverse closure; raises NotClosed."""
        if not self.elements:
            raise NotClosed("empty set")
        for s in self.elements:
            if s.inverse() not in self._set:
                raise NotClosed(f"inverse of {s} missing")
            for t in self.elements:
                if compose(s, t) not in self._set:
                    raise NotClosed(f"{s} o {t} missing")

    def _greedy_generators(self) -> list[AutElement]:
        gens: list[AutElement] = []
        span: set[AutElement] = {e for e in self.elements if e.is_identity()}
        for x in self.elements:
            if x not in span:
                gens.append(x)
                span = set(generate(gens))
        return gens

    def is_abelian(self) -> bool:
        return all(compose(s, t) == compose(t, s) for s, t in itertools.combinations(self.elements, 2))

    def exponent(self) -> int:
        out = 1
        for x in self.elements:
            n = x.order()
            out = out * n // math.gcd(out, n)
        return out

    def to_json(self) -> dict:
        return {"order": self.order, "type": group_type(self),
                "generators": [g.to_json() for g in self.generators]}


def generate(gens: Sequence[AutElement]) -> list[AutElement]:
    """Closure of gens under composition (breadth-first)."""
    if not gens:
        return []
    ident = compose(gens[0], gens[0].inverse())
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


def subgroup_generated(gens: Sequence[AutElement], F: FieldCtx) -> Subgroup:
    elems = generate(gens) if gens else [AutElement.identity(F)]
    return Subgroup(elems, generators=list(gens), check=False)


def enumerate_aut(F: FieldCtx, pairwise: bool = False) -> Subgroup:
    """All 2 q^2 (q-1) elements over F = F_q.

    Built from the explicit families; closure is certified by comparing with
    the subgroup generated by F_p-basis translations, a primitive scaling and
    the swap.  ``pairwise`` additionally checks every product.
    """
    elems = [AutElement(g, a, b, s)
             for s in (0, 1) for g in F.nonzero() for a in F.elements() for b in F.elements()]
    gens = ([AutElement.translation(v, F.zero) for v in _fp_basis(F)]
            + [AutElement.translation(F.zero, v) for v in _fp_basis(F)]
            + [AutElement.scaling(F.primitive), AutElement.swap_map(F)])
    if set(generate(gens)) != set(elems):
        raise NotClosed("explicit families do not form a group")
    return Subgroup(elems, generators=gens, check=pairwise)


def _fp_basis(F: FieldCtx) -> list[FieldElement]:
    return [F.from_coords([0] * i + [1]) for i in range(F.e)]


def point_stabilizer(G: Subgroup, P: CurvePoint, curve: ASMCurve) -> list[AutElement]:
    return [s for s in G if act_on_point(s, P, curve) == P]


def orbit(G: Iterable[AutElement], P: CurvePoint, curve: ASMCurve) -> set[CurvePoint]:
    return {act_on_point(s, P, curve) for s in G}


# -- isomorphism type ------------------------------------------------------

def _is_fq_like(elems: Sequence[AutElement], p: int) -> bool:
    """Elementary abelian p-group (the additive group of F_q)."""
    for s, t in itertools.combinations(elems, 2):
        if compose(s, t) != compose(t, s):
            return False
    return all(x.order() in (1, p) for x in elems)


def _normal(sub: set[AutElement], G: Subgroup) -> bool:
    return all(compose(compose(g, n), g.inverse()) in sub for g in G for n in sub)


def group_type(G: Subgroup) -> str:
    """Tag the subgroup as trivial, F_q, F_q:C2, F_q*:C2 or other(...)."""
    if G.order == 1:
        return TRIVIAL
    F = G.elements[0].gamma.ctx
    p, q = F.p, F.cardinality
    n = G.order
    if n == q and _is_fq_like(G.elements, p):
        return FQ
    if n == 2 * q and _find_fq_normal(G, p, F.e) is not None:
        return FQ_C2
    if n == 2 * (q - 1) and _dihedral_witness(G, q) is not None:
        return FQSTAR_C2
    return f"other(order={n},abelian={G.is_abelian()},exponent={G.exponent()})"


def _find_fq_normal(G: Subgroup, p: int, e: int):
    """A normal elementary abelian subgroup of order p^e, or None."""
    q = p**e
    pelems = [x for x in G if x.order() == p]
    for combo in itertools.combinations(pelems, e):
        N = generate(list(combo))
        if len(N) == q and _is_fq_like(N, p) and _normal(set(N), G):
            return N
    return None


def _dihedral_witness(G: Subgroup, q: int):
    """(g, tau): g of order q-1 and an involution tau outside <g> inverting it."""
    for g in G:
        if g.order() != q - 1:
            continue
        C = set(generate([g]))
        gi = g.inverse()
        for tau in G:
            if tau in C or tau.order() != 2:
                continue
            if compose(compose(tau, g), tau) == gi:
                return g, tau
    return None
