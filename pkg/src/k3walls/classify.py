"""Rank-two hyperbolic lattices attached to walls, and the totally-semistable test.

A wall W determines the primitive sublattice H_W of Mukai vectors whose
central charges are real-proportional along W.  Effective classes are those
of self-pairing >= -2 whose charge points in the same direction as Z(v) at a
chosen point of the wall.  The wall is totally semistable for v when H_W
holds an effective spherical class s with (v, s) < 0, or an effective
isotropic class w with (v, w) = 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .mukai import MukaiVector, pairing, reflect
from .quadext import QuadExt
from .slice import SliceSpec, VanishingChargeError, charge_parts
from .walls import WallGeometry, WallKind, t_squared_at


class NotHyperbolicError(ValueError):
    pass


class ReflectionCapError(RuntimeError):
    def __init__(self, message: str, trace: list):
        super().__init__(message)
        self.trace = trace


def _det2(a, b, c, d):
    return a * d - b * c


def _minors(v: Sequence[int], w: Sequence[int]) -> list[int]:
    return [_det2(v[i], v[j], w[i], w[j]) for i in range(4) for j in range(i + 1, 4)]


def _column_hnf_basis(rows: list[list[int]]) -> list[list[int]]:
    """Basis of (Q-span of rows) intersected with Z^4.

    Column operations bring the 2x4 matrix M to [L | 0] while the inverse
    operations are applied to the rows of U, keeping M = M_cur U.  Then
    M = L U[:2] and U is unimodular, so U[:2] spans the saturation.
    """
    m = [row[:] for row in rows]
    k = len(m[0])
    u = [[int(i == j) for j in range(k)] for i in range(k)]

    def add_col(dst, src, mult):
        for row in m:
            row[dst] += mult * row[src]
        for j in range(k):
            u[src][j] -= mult * u[dst][j]

    def swap_col(a, b):
        for row in m:
            row[a], row[b] = row[b], row[a]
        u[a], u[b] = u[b], u[a]

    for i, _ in enumerate(m):
        col0 = i
        while True:
            nz = [j for j in range(col0, k) if m[i][j] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda j: abs(m[i][j]))
            if piv != col0:
                swap_col(piv, col0)
            done = True
            for j in range(col0 + 1, k):
                if m[i][j]:
                    add_col(j, col0, -(m[i][j] // m[i][col0]))
                    if m[i][j]:
                        done = False
            if done:
                break
    return [u[0], u[1]]


@dataclass(frozen=True)
class HyperbolicLattice:
    basis: tuple[MukaiVector, MukaiVector]
    gram: tuple[tuple[int, int], tuple[int, int]]

    @property
    def det(self) -> int:
        (a, b), (_, d) = self.gram
        return a * d - b * b

    def vector(self, x: int, y: int) -> MukaiVector:
        return self.basis[0] * x + self.basis[1] * y

    def form(self, x: int, y: int) -> int:
        (a, b), (_, d) = self.gram
        return a * x * x + 2 * b * x * y + d * y * y

    def coordinates(self, v: MukaiVector) -> tuple[int, int]:
        """Integer coordinates of a lattice vector in ``basis``."""
        e1, e2 = (b.coords() for b in self.basis)
        vc = v.coords()
        for i in range(4):
            for j in range(i + 1, 4):
                den = _det2(e1[i], e2[i], e1[j], e2[j])
                if den:
                    x = Fraction(_det2(vc[i], e2[i], vc[j], e2[j]), den)
                    y = Fraction(_det2(e1[i], vc[i], e1[j], vc[j]), den)
                    if self.vector(int(x), int(y)) != v or x.denominator != 1 or y.denominator != 1:
                        raise ValueError(f"{v} is not in the lattice")
                    return int(x), int(y)
        raise ValueError("degenerate basis")

    def has_isotropic(self) -> bool:
        disc = -self.det
        return disc >= 0 and math.isqrt(disc) ** 2 == disc

    def to_json(self) -> dict:
        return {"basis": [b.to_json() for b in self.basis], "gram": [list(r) for r in self.gram]}


def _gram(b1: MukaiVector, b2: MukaiVector):
    return ((pairing(b1, b1), pairing(b1, b2)), (pairing(b2, b1), pairing(b2, b2)))


def hyperbolic_lattice(v: MukaiVector, w: MukaiVector) -> HyperbolicLattice:
    """The saturation of span{v, w}, with a basis containing v when v is primitive."""
    minors = _minors(v.coords(), w.coords())
    if not any(minors):
        raise NotHyperbolicError(f"{v} and {w} are linearly dependent")
    if math.gcd(*minors) == 1:
        basis = (v, w)
    else:
        e1, e2 = (MukaiVector.from_coords(r) for r in _column_hnf_basis([list(v.coords()), list(w.coords())]))
        basis = (e1, e2)
        lat = HyperbolicLattice(basis, _gram(*basis))
        if math.gcd(*v.coords()) == 1:
            a, b = lat.coordinates(v)
            # extend (a, b) to a unimodular matrix
            g, x, y = _ext_gcd(a, b)
            basis = (v, e1 * (-y) + e2 * x)
    lat = HyperbolicLattice(basis, _gram(*basis))
    if lat.det >= 0:
        raise NotHyperbolicError(f"span of {v} and {w} is not hyperbolic (Gram determinant {lat.det})")
    return lat


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _solve_form(h: HyperbolicLattice, value: int, bound: int) -> list[tuple[int, int]]:
    """Integer (x, y) with |x|, |y| <= bound and form(x, y) = value."""
    (a, b), (_, d) = h.gram
    out = []
    for y in range(-bound, bound + 1):
        if a == 0:
            # 2 b x y + d y^2 = value
            if b * y == 0:
                if d * y * y == value:
                    out.extend((x, y) for x in range(-bound, bound + 1))
                continue
            num = value - d * y * y
            if num % (2 * b * y) == 0:
                out.append((num // (2 * b * y), y))
            continue
        # a x^2 + 2 b y x + (d y^2 - value) = 0
        disc = (b * y) ** 2 - a * (d * y * y - value)
        if disc < 0:
            continue
        root = math.isqrt(disc)
        if root * root != disc:
            continue
        for sgn in ((1, -1) if root else (1,)):
            num = -b * y + sgn * root
            if num % a == 0:
                out.append((num // a, y))
    return sorted({p for p in out if abs(p[0]) <= bound})


def enumerate_spherical(h: HyperbolicLattice, bound: int) -> list[MukaiVector]:
    if bound <= 0:
        raise ValueError("bound must be positive")
    return [h.vector(x, y) for x, y in _solve_form(h, -2, bound)]


def enumerate_isotropic(h: HyperbolicLattice, bound: int) -> list[MukaiVector]:
    if bound <= 0:
        raise ValueError("bound must be positive")
    return [h.vector(x, y) for x, y in _solve_form(h, 0, bound) if (x, y) != (0, 0)]


@dataclass(frozen=True)
class EffectivenessContext:
    """A wall point (u, t^2) and the class whose charge orients the effective cone."""

    u: QuadExt
    t_sq: QuadExt
    reference: MukaiVector

    def to_json(self) -> dict:
        return {"u": self.u.to_json(), "t_sq": self.t_sq.to_json(), "reference": self.reference.to_json()}


def wall_point(wg: WallGeometry) -> tuple[QuadExt, QuadExt]:
    """The t-axis crossing when there is one, else the top of the arc."""
    if wg.kind is not WallKind.SEMICIRCLE:
        raise ValueError(f"no canonical interior point on a {wg.kind.value} wall")
    t_sq = t_squared_at(wg, 0)
    if t_sq is not None:
        return QuadExt(0), t_sq
    return wg.center, wg.radius_sq


def make_context(reference: MukaiVector, wg: WallGeometry, slice: SliceSpec, u=None, t_sq=None) -> EffectivenessContext:
    if u is None:
        u, t_sq = wall_point(wg)
    ctx = EffectivenessContext(QuadExt.coerce(u), QuadExt.coerce(t_sq), reference)
    re, im = charge_parts(reference, ctx.u, ctx.t_sq, slice)
    if not re and not im:
        raise VanishingChargeError(f"Z({reference}) vanishes at the chosen wall point")
    return ctx


def _ratio(x: MukaiVector, ctx: EffectivenessContext, slice: SliceSpec) -> tuple[QuadExt, QuadExt]:
    """(cross, dot) of Z(x) against Z(reference), both divided by t where needed."""
    rx, ix = charge_parts(x, ctx.u, ctx.t_sq, slice)
    rv, iv = charge_parts(ctx.reference, ctx.u, ctx.t_sq, slice)
    cross = rx * iv - rv * ix
    dot = rx * rv + ctx.t_sq * ix * iv
    return cross, dot


def is_effective(x: MukaiVector, ctx: EffectivenessContext, slice: SliceSpec) -> bool:
    rx, ix = charge_parts(x, ctx.u, ctx.t_sq, slice)
    if not rx and not ix:
        raise VanishingChargeError(f"Z({x}) vanishes at the wall point")
    if pairing(x, x) < -2:
        return False
    cross, dot = _ratio(x, ctx, slice)
    return not cross and dot.sign() > 0


def certified_bound(h: HyperbolicLattice, v: MukaiVector, ctx: EffectivenessContext, slice: SliceSpec) -> Optional[int]:
    """A coordinate bound beyond which no witness for ``classify_wall`` can exist.

    Along the wall, Z restricted to H_W is l(x) Z(v) for a real linear form l
    with l(v) = 1.  Its kernel e is a negative vector, and writing a witness
    as a v + b e, the conditions l > 0, (x, x) in {-2, 0} and (v, x) < 0 or
    (v, x) = 1 bound a and b.  Returns None when the point is not a genuine
    wall point for h (then no certificate is available).
    """
    P = pairing(v, v)
    if P <= 0:
        return None
    b1, b2 = h.basis
    ells = []
    for b in (b1, b2):
        cross, dot = _ratio(b, ctx, slice)
        if cross:
            return None
        ells.append(float(dot))
    rv, iv = charge_parts(v, ctx.u, ctx.t_sq, slice)
    norm = float(rv * rv + ctx.t_sq * iv * iv)
    l1, l2 = ells[0] / norm, ells[1] / norm
    # kernel of l in basis coordinates
    ex, ey = l2, -l1
    (g11, g12), (_, g22) = h.gram
    N = g11 * ex * ex + 2 * g12 * ex * ey + g22 * ey * ey
    if N >= 0:
        return None
    vx, vy = h.coordinates(v)
    a_max = max(math.sqrt(2.0 / P), 2.0 / P)
    b_max = max(math.sqrt(2.0 / -N), math.sqrt(1.0 / (P * -N)))
    coord = max(a_max * abs(vx) + b_max * abs(ex), a_max * abs(vy) + b_max * abs(ey))
    return int(math.ceil(coord)) + 1


class Kind(str, enum.Enum):
    SPHERICAL = "spherical"
    HILBERT_CHOW = "hilbert_chow"
    NONE = "none"


@dataclass(frozen=True)
class WallClassification:
    totally_semistable: bool
    kind: Kind
    isotropic_wall: bool
    witnesses: tuple[MukaiVector, ...] = ()
    hc_multiplicity: Optional[int] = None
    status: str = "ok"
    searched_bound: int = 0
    certified_bound: Optional[int] = None

    def to_json(self) -> dict:
        out = {
            "totally_semistable": self.totally_semistable,
            "kind": self.kind.value,
            "isotropic_wall": self.isotropic_wall,
            "witnesses": [w.to_json() for w in self.witnesses],
            "status": self.status,
            "searched_bound": self.searched_bound,
            "certified_bound": self.certified_bound,
        }
        if self.hc_multiplicity is not None:
            out["hc_multiplicity"] = self.hc_multiplicity
        return out


def negative_sphericals(v: MukaiVector, h: HyperbolicLattice, ctx: EffectivenessContext, slice: SliceSpec, bound: int) -> list[MukaiVector]:
    return [s for s in enumerate_spherical(h, bound) if pairing(v, s) < 0 and is_effective(s, ctx, slice)]


def classify_wall(v: MukaiVector, h: HyperbolicLattice, ctx: EffectivenessContext, slice: SliceSpec, bound: int) -> WallClassification:
    vv = pairing(v, v)
    if vv <= 0:
        raise ValueError(f"classification needs (v, v) > 0, got {vv}")
    if math.gcd(*v.coords()) != 1:
        raise ValueError(f"{v} is not primitive")
    h.coordinates(v)
    iso_wall = h.has_isotropic()
    cert = certified_bound(h, v, ctx, slice)
    search = bound
    common = dict(isotropic_wall=iso_wall, searched_bound=search, certified_bound=cert)

    for w in enumerate_isotropic(h, search) if iso_wall else []:
        if pairing(v, w) == 1 and is_effective(w, ctx, slice):
            n = (vv + 2) // 2
            s = v - w * n
            return WallClassification(True, Kind.HILBERT_CHOW, witnesses=(s, w), hc_multiplicity=n, **common)
    sph = negative_sphericals(v, h, ctx, slice, search)
    if sph:
        sph.sort(key=lambda s: (pairing(v, s), s.coords()), reverse=False)
        return WallClassification(True, Kind.SPHERICAL, witnesses=tuple(sph), **common)
    status = "ok" if cert is not None and cert <= bound else "bound_exhausted"
    return WallClassification(False, Kind.NONE, status=status, **common)


@dataclass
class MinimalClassResult:
    v0: MukaiVector
    reflections: list[MukaiVector] = field(default_factory=list)
    status: str = "ok"

    def replay(self) -> MukaiVector:
        """Undo the reflections in reverse order; returns the starting class."""
        x = self.v0
        for s in reversed(self.reflections):
            x = reflect(x, s)
        return x

    def to_json(self) -> dict:
        return {"v0": self.v0.to_json(), "reflections": [s.to_json() for s in self.reflections], "status": self.status}


def minimal_class(
    v: MukaiVector,
    h: HyperbolicLattice,
    ctx: EffectivenessContext,
    slice: SliceSpec,
    bound: int,
    choose: Optional[Callable[[list[MukaiVector]], MukaiVector]] = None,
    cap: int = 64,
) -> MinimalClassResult:
    """Reflect by effective spherical classes pairing negatively until none remain."""
    if pairing(v, v) <= 0:
        raise ValueError("minimal class needs (v, v) > 0")
    pick = choose or (lambda cands: cands[0])
    sph = [s for s in enumerate_spherical(h, bound) if is_effective(s, ctx, slice)]
    cur, trace = v, []
    for _ in range(cap + 1):
        cands = [s for s in sph if pairing(cur, s) < 0]
        if not cands:
            cert = certified_bound(h, cur, ctx, slice)
            status = "ok" if cert is not None and cert <= bound else "bound_exhausted"
            return MinimalClassResult(cur, trace, status)
        if len(trace) == cap:
            break
        s = pick(cands)
        cur = reflect(cur, s)
        trace.append(s)
    raise ReflectionCapError(f"no minimal class after {cap} reflections", trace)


def spherical_pairing_positivity_check(h: HyperbolicLattice, r: int, n: int, bound: int) -> bool:
    """Every spherical class on the effective side pairs non-negatively with v_{r-1}.

    ``h`` must have basis (s_{r-1}, v_r).  A spherical class x s + y v lies on
    the branch of s exactly when (x s + y v, s) = -2x - y < 0; the classes
    that can be effective are those on that branch with y >= 0, and those on
    the opposite branch with y > 0 and 2x + y <= -3.
    """
    s_prev, v_r = h.basis
    v_prev = v_r - s_prev
    for x, y in _solve_form(h, -2, bound):
        same_branch = 2 * x + y > 0
        if (same_branch and y >= 0) or (not same_branch and y > 0 and 2 * x + y <= -3):
            if pairing(h.vector(x, y), v_prev) < 0:
                return False
    return True
