"""The tower v_1, v_2, ... of Mukai vectors obtained by repeatedly adding O(2rf).

Starting from the ideal sheaf of n points twisted by C = c + n f, each level
is v_r = v_{r-1} + s_{r-1} with s_r = v(O(2rf)) = (1, 2rf, 1).  The routines
here build the tower, produce its walls on the normalized slice for H = c + m f,
and run the numerical checks behind the claim that each W_r is the first
totally semistable wall of v_r.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .mukai import (
    F,
    O_X,
    DivisorClass,
    MukaiVector,
    SheafData,
    euler_characteristic,
    ideal_sheaf,
    intersect,
    line_bundle,
    pairing,
    reflect,
    twist,
)
from .quadext import PositiveRoot, QuadExt
from .slice import SliceSpec, charge_parts
from .walls import (
    WallGeometry,
    WallKind,
    WallQuadratic,
    discriminant,
    geometry,
    quadratic_from_parts,
    t_squared_at,
    wall_locus,
    wall_quadratic,
    walls_coincide,
)

EPSILON_N2 = Fraction(1, 8)


class TowerInvariantError(ValueError):
    def __init__(self, level: int, message: str):
        super().__init__(f"level {level}: {message}")
        self.level = level


@dataclass(frozen=True)
class TowerSpec:
    n: int
    m: Fraction
    R: int

    def __post_init__(self):
        object.__setattr__(self, "m", Fraction(self.m))
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if self.m < self.n:
            raise ValueError(f"need m >= n, got m = {self.m}, n = {self.n}")
        if self.R < 1:
            raise ValueError(f"R must be at least 1, got {self.R}")

    @property
    def slice(self) -> SliceSpec:
        return SliceSpec(self.m, normalized=True)


def curve_class(n: int) -> DivisorClass:
    return DivisorClass(1, n)


def s_class(r: int) -> MukaiVector:
    """v(O(2rf))."""
    return line_bundle(F * (2 * r))


def v_closed(n: int, r: int) -> MukaiVector:
    return MukaiVector(r, DivisorClass(1, n + r * (r - 1)), r - 1)


def v_first(n: int) -> MukaiVector:
    return twist(ideal_sheaf(n), curve_class(n))


@dataclass(frozen=True)
class TowerLevel:
    r: int
    v: MukaiVector
    s_prev: MukaiVector
    s: MukaiVector
    wall: WallGeometry
    pairing_check: int

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "v": self.v.to_json(),
            "s_prev": self.s_prev.to_json(),
            "s": self.s.to_json(),
            "pairing_check": self.pairing_check,
            "chi": euler_characteristic(self.v),
            "wall": self.wall.to_json(),
        }


def tower_vectors(n: int, R: int) -> list[MukaiVector]:
    """v_1..v_R by the recursion v_r = reflect(v_{r-1}, s_{r-1})."""
    out = []
    v = v_first(n)
    for r in range(1, R + 1):
        if r > 1:
            s = s_class(r - 1)
            if pairing(v, s) != 1:
                raise TowerInvariantError(r, f"(v_{r-1}, s_{r-1}) = {pairing(v, s)}, expected 1")
            v = reflect(v, s)
        out.append(v)
    return out


def build_tower(spec: TowerSpec) -> list[TowerLevel]:
    sl = spec.slice
    levels = []
    for r, v in enumerate(tower_vectors(spec.n, spec.R), start=1):
        s_prev = s_class(r - 1)
        if v != v_closed(spec.n, r):
            raise TowerInvariantError(r, f"recursion gave {v}, closed form {v_closed(spec.n, r)}")
        check = pairing(v, s_prev)
        if check != -1:
            raise TowerInvariantError(r, f"(v_r, s_(r-1)) = {check}, expected -1")
        if pairing(v, v) != 2 * spec.n - 2:
            raise TowerInvariantError(r, f"(v_r, v_r) = {pairing(v, v)}, expected {2 * spec.n - 2}")
        levels.append(TowerLevel(r, v, s_prev, s_class(r), wall_locus(v, s_prev, sl), check))
    return levels


def f_variant(n: int, R: int) -> list[tuple[MukaiVector, MukaiVector]]:
    """Pairs (v(F_r), v(F~_r)) with F_r = E_r(-2(r-1)f) and F~_r = F_r(-2f).

    Euler characteristics alternate 1 / -1 and v(F_{r+1}) = v(F~_r) + v(O_X).
    """
    out = []
    for r, v in enumerate(tower_vectors(n, R), start=1):
        fr = twist(v, F * (-2 * (r - 1)))
        out.append((fr, twist(fr, F * -2)))
    for r in range(len(out) - 1):
        if out[r + 1][0] != out[r][1] + O_X:
            raise TowerInvariantError(r + 1, "F-variant extension identity fails")
    return out


def wall_Wr(spec: TowerSpec, r: int) -> WallQuadratic:
    if not 1 <= r <= spec.R:
        raise ValueError(f"r must lie in 1..{spec.R}")
    return wall_quadratic(v_closed(spec.n, r), s_class(r - 1), spec.slice)


def tower_wall_closed_form(n: int, m, r: int) -> WallQuadratic:
    D = QuadExt.sqrt(2 * Fraction(m) - 2)
    return WallQuadratic(QuadExt(r * r - r + 2 - n) - Fraction(m), D * -2, QuadExt(4 * (r - 1)))


def t_intercept_closed(n: int, m, r: int) -> Optional[PositiveRoot]:
    """2 sqrt((r-1)/(n+m+r-2-r^2)) when it is a positive real number."""
    den = n + Fraction(m) + r - 2 - r * r
    if r < 2 or den <= 0:
        return None
    return PositiveRoot(4 * Fraction(r - 1) / den)


def arcara_miles_closed_form(m, r: int) -> WallQuadratic:
    m = Fraction(m)
    D = QuadExt.sqrt(2 * m - 2)
    return WallQuadratic(QuadExt(2 - m), D * (2 * (2 * r - 1)), QuadExt(-4 * (2 * r - 1) * (r - 1)))


def arcara_miles_wall(spec: TowerSpec, r: int) -> WallQuadratic:
    """Wall where O(2(r-1)f) is destabilized by O(2(r-1)f - c)."""
    if r < 1:
        raise ValueError("r must be positive")
    s = s_class(r - 1)
    return wall_quadratic(s, twist(s, DivisorClass(-1, 0)), spec.slice)


def tower_walls_admissible(n: int, m, R: int) -> bool:
    """All of W_1..W_R are semicircles centred left of u = 0 (leading coefficient negative)."""
    return n + Fraction(m) > R * R - R + 2


# -- ideal sheaf walls -----------------------------------------------------


def sheaf_parts(d: SheafData, slice: SliceSpec) -> tuple:
    h4 = d.ch2 + d.r if slice.todd else d.ch2
    return (d.r, slice.h_degree(d.c1), h4)


def ideal_sheaf_wall(n: int, destabilizer: SheafData, slice: SliceSpec) -> WallQuadratic:
    iz = SheafData(1, DivisorClass(0, 0), Fraction(-n))
    return quadratic_from_parts(sheaf_parts(iz, slice), sheaf_parts(destabilizer, slice), slice)


def ideal_sheaf_wall_closed_form(n: int, r: int, d_h, ch2) -> WallQuadratic:
    d_h = QuadExt.coerce(d_h)
    return WallQuadratic(d_h, QuadExt(-2 * (n * r + Fraction(ch2))), d_h * (2 * n))


def first_wall_slice(n: int, epsilon: Fraction = EPSILON_N2) -> SliceSpec:
    """H = c + n f, nudged to c + (2 + epsilon) f when n = 2 (c + 2f is not ample)."""
    return SliceSpec(Fraction(n) + (epsilon if n == 2 else 0), normalized=True)


def o_minus_c(n: int) -> MukaiVector:
    return line_bundle(-curve_class(n))


def admissible_ray(n: int, slice: SliceSpec) -> Fraction:
    """A rational u strictly inside the O(-C) wall's footprint, near its centre."""
    wg = wall_locus(ideal_sheaf(n), o_minus_c(n), slice)
    if wg.kind is not WallKind.SEMICIRCLE:
        raise ValueError("the O(-C) wall is not a semicircle on this slice")
    approx = Fraction(float(wg.center)).limit_denominator(1000)
    for den in (1000, 10**6, 10**9):
        approx = Fraction(float(wg.center)).limit_denominator(den)
        if t_squared_at(wg, approx) is not None:
            return approx
    raise ValueError("could not place a rational ray inside the O(-C) wall")


# -- first wall scan -------------------------------------------------------

REASONS = ("nonnegative_pairing", "rank_bound", "discriminant", "vertical", "sub_degree_sign", "quotient_degree_sign", "misses_ray", "heart")


@dataclass(frozen=True)
class Candidate:
    vector: MukaiVector
    side: str
    pairing: int
    reason: Optional[str]
    discriminant: Optional[QuadExt] = None
    t_sq: Optional[QuadExt] = None

    def to_json(self) -> dict:
        out = {"vector": self.vector.to_json(), "side": self.side, "pairing": self.pairing, "reason": self.reason}
        if self.discriminant is not None:
            out["discriminant"] = self.discriminant.to_json()
        if self.t_sq is not None:
            out["t_sq"] = self.t_sq.to_json()
        return out


@dataclass
class ScanReport:
    n: int
    slice: SliceSpec
    u_ray: Fraction
    rank_bound: int
    coeff_bound: int
    total: int = 0
    excluded: dict = field(default_factory=dict)
    candidates: list = field(default_factory=list)
    survivors: list = field(default_factory=list)
    selected: Optional[Candidate] = None
    selected_wall: Optional[WallGeometry] = None
    selected_is_o_minus_c: bool = False
    status: str = "inconclusive"

    @property
    def certification(self) -> str:
        return f"certified up to (rank_bound={self.rank_bound}, coeff_bound={self.coeff_bound})"

    def to_json(self, verbose: bool = False) -> dict:
        out = {
            "n": self.n,
            "slice": self.slice.to_json(),
            "u_ray": str(self.u_ray),
            "rank_bound": self.rank_bound,
            "coeff_bound": self.coeff_bound,
            "status": self.status,
            "certification": self.certification,
            "total_candidates": self.total,
            "excluded": {k: self.excluded.get(k, 0) for k in REASONS},
            "survivors": [c.to_json() for c in self.survivors],
            "selected": self.selected.to_json() if self.selected else None,
            "selected_wall": self.selected_wall.to_json() if self.selected_wall else None,
            "selected_is_o_minus_c": self.selected_is_o_minus_c,
        }
        if verbose:
            out["candidates"] = [c.to_json() for c in self.candidates]
        return out


def spherical_classes(rank: int, coeff_bound: int) -> Iterable[MukaiVector]:
    """Spherical (r, alpha c + beta f, s) with |alpha|, |beta| <= coeff_bound.

    At rank 0 the class only constrains c1^2 = -2, so s also runs over
    |s| <= coeff_bound.
    """
    for a in range(-coeff_bound, coeff_bound + 1):
        for b in range(-coeff_bound, coeff_bound + 1):
            num = intersect(DivisorClass(a, b), DivisorClass(a, b)) + 2
            if rank == 0:
                if num == 0:
                    for s in range(-coeff_bound, coeff_bound + 1):
                        yield MukaiVector(0, DivisorClass(a, b), s)
                continue
            if num % (2 * rank) == 0:
                yield MukaiVector(rank, DivisorClass(a, b), num // (2 * rank))


def _raw_degree(c1: DivisorClass, slice: SliceSpec) -> Fraction:
    """H.c1 before dividing by the normalization factor."""
    return (slice.m - 2) * c1.alpha + c1.beta


def _raw_scale_sq(slice: SliceSpec) -> Fraction:
    return 2 * slice.m - 2 if slice.normalized else Fraction(1)


def _judge(w: MukaiVector, S: MukaiVector, slice: SliceSpec, u_ray: Fraction) -> Candidate:
    side = "sub" if S.r > 0 else "quotient"
    p = pairing(w, S)
    if p >= 0:
        return Candidate(S, side, p, "nonnegative_pairing")
    if side == "sub" and p <= -4 * S.r:
        return Candidate(S, side, p, "rank_bound")
    # rational shortcut: on the normalized slice, A and C carry one factor
    # 1/sqrt(2m-2) each and B none, so the discriminant is rational
    x_w, x_s = _raw_degree(w.c1, slice), _raw_degree(S.c1, slice)
    a_num = w.r * x_s - S.r * x_w
    if not a_num:
        return Candidate(S, side, p, "vertical")
    s_w, s_s = slice.h4_term(w), slice.h4_term(S)
    hh = slice.h_square.to_fraction()
    b = hh * (s_w * S.r - s_s * w.r)
    delta = QuadExt(b * b - 2 * hh * a_num * (s_s * x_w - s_w * x_s) / _raw_scale_sq(slice))
    if delta.sign() <= 0:
        return Candidate(S, side, p, "discriminant", delta)
    if side == "sub" and x_s >= 0:
        return Candidate(S, side, p, "sub_degree_sign", delta)
    if side == "quotient" and x_s <= 0:
        return Candidate(S, side, p, "quotient_degree_sign", delta)
    # t^2 = -u^2 - (B u + C)/A, with C/A rational and B/A a rational multiple of the scale
    c_over_a = 2 * (s_s * x_w - s_w * x_s) / (hh * a_num)
    b_over_a = slice.scale * (2 * b / (hh * a_num))
    t_sq = b_over_a * -u_ray - (u_ray * u_ray + c_over_a)
    if t_sq.sign() <= 0:
        t_sq = None
    if t_sq is None:
        return Candidate(S, side, p, "misses_ray", delta)
    for x in (S, w - S):
        _, im_t = charge_parts(x, u_ray, t_sq, slice)
        if im_t.sign() < 0:
            return Candidate(S, side, p, "heart", delta, t_sq)
    return Candidate(S, side, p, None, delta, t_sq)


def _scan_rank(args) -> list[Candidate]:
    n, slice, u_ray, rank, coeff_bound = args
    w = ideal_sheaf(n)
    return [_judge(w, S, slice, u_ray) for S in spherical_classes(rank, coeff_bound)]


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("K3WALLS_THREADS", "1")))
    except ValueError:
        return 1


def first_wall_scan(
    n: int,
    slice: Optional[SliceSpec] = None,
    u_ray: Optional[Fraction] = None,
    rank_bound: int = 5,
    coeff_bound: int = 30,
) -> ScanReport:
    """Scan spherical sub/quotient classes of v(I_Z) and pick the highest wall along u = u_ray."""
    if rank_bound < 1 or coeff_bound < 1:
        raise ValueError("bounds must be positive")
    slice = slice or first_wall_slice(n)
    u_ray = Fraction(u_ray) if u_ray is not None else admissible_ray(n, slice)
    ranks = list(range(-rank_bound, rank_bound + 1))
    jobs = [(n, slice, u_ray, r, coeff_bound) for r in ranks]
    workers = _workers()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_rank, jobs))
    else:
        results = [_scan_rank(j) for j in jobs]
    report = ScanReport(n, slice, u_ray, rank_bound, coeff_bound)
    for cands in results:
        for c in cands:
            report.total += 1
            if c.reason is not None:
                report.excluded[c.reason] = report.excluded.get(c.reason, 0) + 1
            if c.reason != "nonnegative_pairing":
                report.candidates.append(c)
            if c.reason is None:
                report.survivors.append(c)
    report.survivors.sort(key=lambda c: c.vector.coords())
    if report.survivors:
        best = report.survivors[0]
        for c in report.survivors[1:]:
            if c.t_sq > best.t_sq:
                best = c
        report.selected = best
        report.selected_wall = wall_locus(ideal_sheaf(n), best.vector, slice)
        target = wall_quadratic(ideal_sheaf(n), o_minus_c(n), slice)
        report.selected_is_o_minus_c = walls_coincide(report.selected_wall.quadratic, target)
        report.status = "ok"
    return report


def rank2_discriminant_bound(n: int, r: int) -> int:
    """Upper bound for the discriminant of a rank-r spherical subobject obeying the pairing bounds."""
    return -4 * (n - 1) * r * r - 4 * r + (4 * n + 1)


# -- Hilbert-Chow decompositions ---------------------------------------------


@dataclass(frozen=True)
class HCDecomposition:
    w_prime: MukaiVector
    spherical: MukaiVector
    wall: WallGeometry
    delta: Optional[QuadExt]
    d_g: QuadExt


def hilbert_chow_decompositions(n: int, slice: SliceSpec, bound: int, coeff_bound: Optional[int] = None) -> list[HCDecomposition]:
    """All v(I_Z) = s + n w' with w' = (r, alpha c + beta f, p) primitive isotropic.

    Ranks run over |r| <= bound and coefficients over |alpha|, |beta| <= coeff_bound
    (default: bound).
    """
    cb = bound if coeff_bound is None else coeff_bound
    v = ideal_sheaf(n)
    out = []
    for r in range(-bound, bound + 1):
        p = n * r - r - 1
        for a in range(-cb, cb + 1):
            for b in range(-cb, cb + 1):
                c1 = DivisorClass(a, b)
                if intersect(c1, c1) != 2 * r * p:
                    continue
                if math.gcd(r, a, b, p) != 1:
                    continue
                wp = MukaiVector(r, c1, p)
                s = v - wp * n
                q = wall_quadratic(v, wp, slice)
                delta = discriminant(q) if q.A else None
                out.append(HCDecomposition(wp, s, geometry(q), delta, slice.g_degree(c1)))
    return out


# -- deformation in m --------------------------------------------------------


def coincidence_value(n: int, m, d_h, ch2) -> QuadExt:
    m = Fraction(m)
    return QuadExt.sqrt(2 * m - 2) * QuadExt.coerce(d_h) + (m + n - 2) * Fraction(ch2)


def cokernel_class(n: int) -> MukaiVector:
    """v(O_C(-Z) (x) O(C)) = v_1 - v(O_X)."""
    return v_first(n) - O_X


def w_prime_quadratic(n: int, m, r: int, d_h, ch2) -> WallQuadratic:
    """Wall of the cokernel class against a class with (rank, H.c1, ch2) = (r, d_h, ch2)."""
    sl = SliceSpec(Fraction(m), normalized=True)
    q0 = cokernel_class(n)
    return quadratic_from_parts((0, sl.h_degree(q0.c1), q0.ch2), (r, QuadExt.coerce(d_h), Fraction(ch2)), sl)


def spherical_quotient_lhs(n: int, m: int, k: int) -> int:
    return -(m - 1) * k * k + n + k * (m - n)


def eq9_solutions(m_range, n_range, r_range, k_range) -> list[tuple[int, int, int, int]]:
    out = []
    for m in m_range:
        for n in n_range:
            if m < n:
                continue
            for r in r_range:
                if r < 1:
                    continue
                for k in k_range:
                    if spherical_quotient_lhs(n, m, k) == r * (r + 1):
                        out.append((m, n, r, k))
    return out


def quotient_class(n: int, m: int, r: int, k: int) -> MukaiVector:
    """v(Q') for a subobject of class (r, k(c + (2-m) f), r) of the cokernel."""
    return cokernel_class(n) - MukaiVector(r, DivisorClass(k, k * (2 - m)), r)


@dataclass
class PersistenceReport:
    n: int
    ms: list
    transport_ok: bool = False
    coincidence_ok: bool = True
    integrality_ok: bool = True
    quotient_ok: bool = True
    geometry_ok: bool = True
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.transport_ok and self.coincidence_ok and self.integrality_ok and self.quotient_ok and self.geometry_ok


def w1_persistence_check(n: int, m_range, rank_bound: int = 3, coeff_bound: int = 6, report: bool = False):
    """Check the lattice-level content of W_1 staying first as m grows from n.

    1. At m = n, twisting by O(C) carries the O(-C) wall of I_Z onto W_1
       (a shift by sqrt(2n-2) in u), so the first-wall scan transports.
    2. For each m, W_1 is a semicircle through u = 0 with centre < 0.
    3. Every class (r >= 1, d_h, ch2) in the bounds whose wall against the
       cokernel class coincides with W_1 satisfies the linear relation
       (m+n-2) ch2 + sqrt(2m-2) d_h = 0.
    4. With 0 <= d_h < H.C, that relation forces ch2 = 0 = d_h.
    5. A spherical quotient then satisfies the quadratic relation in k, whose
       only solutions have k = 0 and n = r(r+1).
    """
    ms = [Fraction(m) for m in m_range]
    rep = PersistenceReport(n, ms)

    sl_n = SliceSpec(n, normalized=True)
    w_oc = wall_locus(ideal_sheaf(n), o_minus_c(n), sl_n)
    w1_n = wall_locus(v_first(n), O_X, sl_n)
    shift = QuadExt.sqrt(2 * n - 2)
    rep.transport_ok = (
        w_oc.is_semicircle
        and w1_n.is_semicircle
        and w_oc.center + shift == w1_n.center
        and w_oc.radius_sq == w1_n.radius_sq
        and twist(o_minus_c(n), curve_class(n)) == O_X
        and twist(ideal_sheaf(n), curve_class(n)) == v_first(n)
    )

    for m in ms:
        if m < n:
            raise ValueError(f"m = {m} is below n = {n}")
        sl = SliceSpec(m, normalized=True)
        w1 = wall_locus(v_first(n), O_X, sl)
        if not (w1.is_semicircle and w1.center.sign() < 0 and w1.radius_sq == w1.center * w1.center):
            rep.geometry_ok = False
        q0 = cokernel_class(n)
        h_coker = sl.h_degree(q0.c1)
        hh_f = float(sl.h_square)
        f1 = tuple(float(x) for x in w1.quadratic.coefficients())
        for r in range(1, rank_bound + 1):
            for a in range(-coeff_bound, coeff_bound + 1):
                for b in range(-coeff_bound, coeff_bound + 1):
                    d_h = sl.h_degree(DivisorClass(a, b))
                    for ch2 in range(-coeff_bound, coeff_bound + 1):
                        # cheap float screen before the exact projective comparison
                        fq = (-hh_f * r * float(h_coker) / 2, hh_f * q0.ch2 * r, float(h_coker) * ch2 - float(d_h) * q0.ch2)
                        if any(abs(fq[i] * f1[j] - fq[j] * f1[i]) > 1e-7 for i in range(3) for j in range(i + 1, 3)):
                            continue
                        q = quadratic_from_parts((0, h_coker, q0.ch2), (r, d_h, ch2), sl)
                        if not walls_coincide(q, w1.quadratic):
                            continue
                        if coincidence_value(n, m, d_h, ch2):
                            rep.coincidence_ok = False
                        if d_h.sign() >= 0 and d_h < h_coker and (ch2 != 0 or d_h):
                            rep.integrality_ok = False
                        if ch2 == 0 and not d_h and m.denominator == 1:
                            # d_h = 0 means c1 = k (c + (2 - m) f)
                            k = a
                            qv = quotient_class(n, int(m), r, k)
                            spherical = pairing(qv, qv) == -2
                            if spherical != (spherical_quotient_lhs(n, int(m), k) == r * (r + 1)):
                                rep.quotient_ok = False
                            if spherical and not (k == 0 and n == r * (r + 1)):
                                rep.quotient_ok = False
                            if spherical:
                                rep.details.append((int(m), r, k))
    return rep if report else rep.ok
