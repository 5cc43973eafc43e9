"""Central charges on the two-parameter slice of stability conditions sigma_{uH, tH}.

The polarization is H = c + m f, optionally normalized to H^2 = 1 by dividing
by sqrt(2m - 2).  Two normalizations of the H^4 term are supported:

* ``todd=False`` (default): Z(E) = -int e^{-(u+it)H} ch(E), i.e. the H^4
  entry of the Mukai vector is replaced by ch2 = s - r.  Every wall equation
  used by the tower and the first-wall scan is written in this form.
* ``todd=True``: Z(v) = (exp(uH + itH), v), pairing against the Mukai vector
  itself.  The two agree after the substitution t^2 -> t^2 + 2/H^2.

Only t^2 enters the real part and Im Z is t times a function of u, so most
routines take ``t_sq`` and never need a square root.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .mukai import DivisorClass, MukaiVector
from .quadext import QuadExt

Number = Union[int, Fraction, QuadExt]


class OffSliceError(ValueError):
    """Raised for points with t <= 0."""


class VanishingChargeError(ValueError):
    """The central charge of a class vanishes at the requested point."""


@dataclass(frozen=True)
class SliceSpec:
    m: Fraction
    normalized: bool = True
    todd: bool = False
    scale: QuadExt = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = Fraction(self.m)
        if m <= 1:
            raise ValueError(f"need m > 1 so that (c + m f)^2 = 2m - 2 > 0, got m = {m}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "scale", QuadExt.sqrt(2 * m - 2) if self.normalized else QuadExt(1))

    @property
    def d(self) -> int:
        """Squarefree radicand of the coefficient field."""
        return self.scale.d if self.normalized else 1

    @property
    def h_square(self) -> QuadExt:
        return QuadExt(1) if self.normalized else QuadExt(2 * self.m - 2)

    def h_degree(self, c1: DivisorClass) -> QuadExt:
        """H.c1 with H = (c + m f)/scale."""
        return QuadExt((self.m - 2) * c1.alpha + c1.beta) / self.scale

    def g_degree(self, c1: DivisorClass) -> QuadExt:
        """-G.c1 with G = (c + (2-m) f)/scale the unit negative class orthogonal to H."""
        return -QuadExt(-c1.alpha * self.m + c1.beta) / self.scale

    def divisor_from_hg(self, d_h: Number, d_g: Number) -> DivisorClass:
        """The integral divisor d_h H + d_g G; raises if it is not integral."""
        if not self.normalized:
            raise ValueError("the (d_h, d_g) frame is only defined on the normalized slice")
        d_h, d_g = QuadExt.coerce(d_h), QuadExt.coerce(d_g)
        alpha = (d_h + d_g) / self.scale
        beta = (d_h * self.m + d_g * (2 - self.m)) / self.scale
        out = []
        for x in (alpha, beta):
            if not x.is_rational() or x.to_fraction().denominator != 1:
                raise ValueError(f"d_h = {d_h}, d_g = {d_g} do not give an integral divisor")
            out.append(int(x.to_fraction()))
        return DivisorClass(*out)

    def h4_term(self, v: MukaiVector) -> int:
        return v.s if self.todd else v.s - v.r

    def to_json(self) -> dict:
        return {"m": str(self.m), "normalized": self.normalized, "todd": self.todd}


def tower_slice(m: Number) -> SliceSpec:
    return SliceSpec(Fraction(m), normalized=True)


@dataclass(frozen=True)
class CentralChargeValue:
    re: QuadExt
    im: QuadExt

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def to_json(self) -> dict:
        return {"re": self.re.to_json(), "im": self.im.to_json()}


def charge_parts(v: MukaiVector, u: Number, t_sq: Number, slice: SliceSpec) -> tuple[QuadExt, QuadExt]:
    """Return ``(Re Z, Im Z / t)`` at the point with parameters ``u`` and ``t^2``."""
    u, t_sq = QuadExt.coerce(u), QuadExt.coerce(t_sq)
    h = slice.h_degree(v.c1)
    h2 = slice.h_square
    re = u * h - slice.h4_term(v) - (u * u - t_sq) * h2 * Fraction(v.r, 2)
    im_t = h - u * h2 * v.r
    return re, im_t


def central_charge(v: MukaiVector, u: Number, t: Number, slice: SliceSpec) -> CentralChargeValue:
    t = QuadExt.coerce(t)
    if t.sign() <= 0:
        raise OffSliceError(f"t must be positive, got {t}")
    re, im_t = charge_parts(v, u, t * t, slice)
    return CentralChargeValue(re, im_t * t)


def slope(v: MukaiVector, slice: SliceSpec) -> Union[QuadExt, float]:
    if v.r == 0:
        return float("inf")
    return slice.h_degree(v.c1) / v.r


def numerically_in_heart(v: MukaiVector, u: Number, slice: SliceSpec, strict: bool = False) -> bool:
    """Sign test on Im Z(v) / t = H.c1 - r u H^2; closed unless ``strict``."""
    _, im_t = charge_parts(v, u, 0, slice)
    sign = im_t.sign()
    return sign > 0 if strict else sign >= 0


def _half(re: QuadExt, im: QuadExt) -> int:
    # 1 for arguments in (0, pi], 0 for (-pi, 0]
    s_im = im.sign()
    return 1 if s_im > 0 or (s_im == 0 and re.sign() < 0) else 0


def compare_phases(za: tuple[QuadExt, QuadExt], zb: tuple[QuadExt, QuadExt]) -> int:
    """-1, 0, 1 as arg(za) is less than, equal to, or greater than arg(zb)."""
    (ra, ia), (rb, ib) = za, zb
    if (not ra and not ia) or (not rb and not ib):
        raise VanishingChargeError("phase of a vanishing central charge")
    ha, hb = _half(ra, ia), _half(rb, ib)
    if ha != hb:
        return -1 if ha < hb else 1
    cross = (ra * ib - rb * ia).sign()
    return -cross


def phase_less(v: MukaiVector, w: MukaiVector, u: Number, t: Number, slice: SliceSpec) -> int:
    """Compare phi(v) with phi(w) at sigma_{uH, tH}; returns -1, 0 or 1."""
    zv = central_charge(v, u, t, slice)
    zw = central_charge(w, u, t, slice)
    if zv.is_zero():
        raise VanishingChargeError(f"Z({v}) = 0 at u = {u}, t = {t}")
    if zw.is_zero():
        raise VanishingChargeError(f"Z({w}) = 0 at u = {u}, t = {t}")
    return compare_phases((zv.re, zv.im), (zw.re, zw.im))
