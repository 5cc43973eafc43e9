"""Wall loci on the (u, t) slice: vertical rays, semicircles, and their relative position.

The locus where Z(v) and Z(w) are real-proportional is

    A (u^2 + t^2) + B u + C = 0

after dividing Re Z(v) Im Z(w) - Re Z(w) Im Z(v) by t.  ``WallQuadratic`` keeps
the raw coefficients (the discriminant is read off them) and compares
projectively.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .mukai import MukaiVector
from .quadext import PositiveRoot, QuadExt
from .slice import SliceSpec


class WallKind(str, enum.Enum):
    VERTICAL = "vertical"
    SEMICIRCLE = "semicircle"
    EMPTY = "empty"
    EVERYWHERE = "everywhere"


@dataclass(frozen=True)
class WallQuadratic:
    A: QuadExt
    B: QuadExt
    C: QuadExt

    def coefficients(self) -> tuple[QuadExt, QuadExt, QuadExt]:
        return (self.A, self.B, self.C)

    def is_zero(self) -> bool:
        return not (self.A or self.B or self.C)

    def canonical(self) -> WallQuadratic:
        """Scale so the first nonzero coefficient is 1."""
        for x in self.coefficients():
            if x:
                return WallQuadratic(self.A / x, self.B / x, self.C / x)
        return self

    def scaled(self, k) -> WallQuadratic:
        return WallQuadratic(self.A * k, self.B * k, self.C * k)

    def evaluate(self, u, t_sq) -> QuadExt:
        u, t_sq = QuadExt.coerce(u), QuadExt.coerce(t_sq)
        return self.A * (u * u + t_sq) + self.B * u + self.C

    def to_json(self) -> dict:
        return {"A": self.A.to_json(), "B": self.B.to_json(), "C": self.C.to_json()}


@dataclass(frozen=True)
class WallGeometry:
    kind: WallKind
    u0: Optional[QuadExt] = None
    center: Optional[QuadExt] = None
    radius_sq: Optional[QuadExt] = None
    quadratic: Optional[WallQuadratic] = None

    def to_json(self) -> dict:
        out: dict = {"type": self.kind.value}
        if self.kind is WallKind.VERTICAL:
            out["u0"] = self.u0.to_json()
        elif self.kind is WallKind.SEMICIRCLE:
            out["center"] = self.center.to_json()
            out["radius_sq"] = self.radius_sq.to_json()
        return out

    @property
    def is_semicircle(self) -> bool:
        return self.kind is WallKind.SEMICIRCLE


def quadratic_from_parts(p1: tuple, p2: tuple, slice: SliceSpec) -> WallQuadratic:
    """Wall between classes given as ``(rank, H.c1, h4)`` triples.

    ``h4`` is whatever enters Re Z linearly (ch2 or the Mukai H^4 entry,
    according to ``slice.todd``).
    """
    r1, h1, s1 = p1
    r2, h2, s2 = p2
    hh = slice.h_square
    A = hh * (h2 * r1 - h1 * r2) / 2
    B = hh * (QuadExt.coerce(s1) * r2 - QuadExt.coerce(s2) * r1)
    C = QuadExt.coerce(h1) * s2 - QuadExt.coerce(h2) * s1
    return WallQuadratic(QuadExt.coerce(A), QuadExt.coerce(B), QuadExt.coerce(C))


def charge_triple(v: MukaiVector, slice: SliceSpec) -> tuple:
    return (v.r, slice.h_degree(v.c1), slice.h4_term(v))


def wall_quadratic(v: MukaiVector, w: MukaiVector, slice: SliceSpec) -> WallQuadratic:
    if v.is_zero() and w.is_zero():
        raise ValueError("wall of two zero classes is undefined")
    return quadratic_from_parts(charge_triple(v, slice), charge_triple(w, slice), slice)


def geometry(q: WallQuadratic) -> WallGeometry:
    A, B, C = q.coefficients()
    if A:
        center = -B / (2 * A)
        radius_sq = discriminant(q) / (4 * A * A)
        if radius_sq.sign() > 0:
            return WallGeometry(WallKind.SEMICIRCLE, center=center, radius_sq=radius_sq, quadratic=q)
        return WallGeometry(WallKind.EMPTY, quadratic=q)
    if B:
        return WallGeometry(WallKind.VERTICAL, u0=-C / B, quadratic=q)
    if C:
        return WallGeometry(WallKind.EMPTY, quadratic=q)
    return WallGeometry(WallKind.EVERYWHERE, quadratic=q)


def wall_locus(v: MukaiVector, w: MukaiVector, slice: SliceSpec) -> WallGeometry:
    return geometry(wall_quadratic(v, w, slice))


def discriminant(q: WallQuadratic) -> QuadExt:
    if not q.A:
        raise ValueError("a vertical or degenerate wall has no discriminant")
    return q.B * q.B - 4 * q.A * q.C


def t_squared_at(wg: WallGeometry, u) -> Optional[QuadExt]:
    """t^2 of the wall point above ``u``, or None if the wall does not pass over ``u``."""
    if wg.kind is not WallKind.SEMICIRCLE:
        return None
    du = QuadExt.coerce(u) - wg.center
    t_sq = wg.radius_sq - du * du
    return t_sq if t_sq.sign() > 0 else None


def t_intercept(wg: WallGeometry) -> Optional[PositiveRoot]:
    t_sq = t_squared_at(wg, 0)
    return PositiveRoot(t_sq) if t_sq is not None else None


def _lt_two_root(x: QuadExt, p: QuadExt) -> int:
    """Sign of x - 2 sqrt(p) for p >= 0."""
    if x.sign() < 0:
        return -1
    return (x * x - 4 * p).sign()


def _require_semicircles(*walls: WallGeometry) -> None:
    for wg in walls:
        if wg.kind is not WallKind.SEMICIRCLE:
            raise ValueError(f"nesting is only defined for semicircles, got {wg.kind.value}")


def is_nested(inner: WallGeometry, outer: WallGeometry) -> bool:
    """Strict containment of the inner disk in the outer one."""
    _require_semicircles(inner, outer)
    if not inner.radius_sq < outer.radius_sq:
        return False
    dc = inner.center - outer.center
    # sqrt(R) - sqrt(rho) > |dc|  <=>  R + rho - dc^2 > 2 sqrt(R rho)
    x = outer.radius_sq + inner.radius_sq - dc * dc
    return _lt_two_root(x, outer.radius_sq * inner.radius_sq) > 0


def semicircles_intersect(w1: WallGeometry, w2: WallGeometry) -> bool:
    """Whether two semicircles share a point with t > 0."""
    _require_semicircles(w1, w2)
    dc = w1.center - w2.center
    d_sq = dc * dc
    prod = w1.radius_sq * w2.radius_sq
    total = w1.radius_sq + w2.radius_sq
    # |r1 - r2| < d < r1 + r2
    below_sum = _lt_two_root(d_sq - total, prod) < 0
    above_diff = _lt_two_root(total - d_sq, prod) < 0
    return below_sum and above_diff


def walls_disjoint(w1: WallGeometry, w2: WallGeometry) -> bool:
    """No common point in t > 0 and neither disk contains the other.

    A vertical wall is disjoint from a semicircle that does not pass over it,
    and from any other vertical wall.
    """
    kinds = {w1.kind, w2.kind}
    if kinds == {WallKind.VERTICAL}:
        return w1.u0 != w2.u0
    if kinds == {WallKind.VERTICAL, WallKind.SEMICIRCLE}:
        vert, semi = (w1, w2) if w1.kind is WallKind.VERTICAL else (w2, w1)
        return t_squared_at(semi, vert.u0) is None
    return not semicircles_intersect(w1, w2) and not is_nested(w1, w2) and not is_nested(w2, w1)


def walls_coincide(q1: WallQuadratic, q2: WallQuadratic) -> bool:
    if q1.is_zero() or q2.is_zero():
        return q1.is_zero() and q2.is_zero()
    a, b = q1.coefficients(), q2.coefficients()
    return all(not (a[i] * b[j] - a[j] * b[i]) for i in range(3) for j in range(i + 1, 3))


def point_on_wall(wg: WallGeometry, u, t) -> bool:
    t = QuadExt.coerce(t)
    if t.sign() <= 0:
        raise ValueError(f"t must be positive, got {t}")
    u = QuadExt.coerce(u)
    if wg.kind is WallKind.EVERYWHERE:
        return True
    if wg.kind is WallKind.EMPTY:
        return False
    if wg.kind is WallKind.VERTICAL:
        return u == wg.u0
    du = u - wg.center
    return du * du + t * t == wg.radius_sq

