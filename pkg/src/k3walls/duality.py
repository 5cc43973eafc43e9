"""Lattice bookkeeping for strange duality on the elliptic K3.

Pairs are parametrized as

    v = (r, c + (a + r p) f, p),    w = (s, c + (b + s q) f, q),

so (v, v) = 2a - 2, (w, w) = 2b - 2 and (v, w^dual) = 2 - a - b - (r+s)(p+q).
Verdicts about the duality map are conditional: they assume the map is an
isomorphism on the far side of whatever wall is crossed, which cannot be
decided from lattice data alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .classify import (
    EffectivenessContext,
    HyperbolicLattice,
    Kind,
    classify_wall,
    minimal_class,
)
from .mukai import F, O_X, DivisorClass, MukaiVector, dual, intersect, pairing, reflect, twist
from .slice import SliceSpec


class OrthogonalityError(ValueError):
    pass


class HypothesisError(ValueError):
    pass


class Verdict(str, enum.Enum):
    ISOMORPHISM = "isomorphism"
    ZERO = "zero"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SDPair:
    r: int
    s: int
    p: int
    q: int
    a: int
    b: int

    @property
    def v(self) -> MukaiVector:
        return MukaiVector(self.r, DivisorClass(1, self.a + self.r * self.p), self.p)

    @property
    def w(self) -> MukaiVector:
        return MukaiVector(self.s, DivisorClass(1, self.b + self.s * self.q), self.q)

    @property
    def total(self) -> int:
        """p + q + r + s."""
        return self.p + self.q + self.r + self.s

    def to_json(self) -> dict:
        return {
            "r": self.r, "s": self.s, "p": self.p, "q": self.q, "a": self.a, "b": self.b,
            "v": self.v.to_json(), "w": self.w.to_json(),
        }


def make_pair(r: int, s: int, p: int, q: int, a: int, b: int) -> SDPair:
    lhs, rhs = a + b - 2, -(r + s) * (p + q)
    if lhs != rhs:
        raise OrthogonalityError(
            f"(v, w^dual) != 0: a+b-2 = {lhs} but -(r+s)(p+q) = {rhs}"
        )
    pair = SDPair(r, s, p, q, a, b)
    v, w = pair.v, pair.w
    assert pairing(v, dual(w)) == 0
    assert pairing(v, v) == 2 * a - 2 and pairing(w, w) == 2 * b - 2
    return pair


def pair_from_vectors(v: MukaiVector, w: MukaiVector) -> SDPair:
    """Recover parameters from vectors of fiber degree one."""
    for x in (v, w):
        if x.c1.alpha != 1:
            raise ValueError(f"{x} does not have c1.f = 1")
    a = v.c1.beta - v.r * v.s
    b = w.c1.beta - w.r * w.s
    return make_pair(v.r, w.r, v.s, w.s, a, b)


@dataclass(frozen=True)
class SDStatus:
    mo_theorem: bool
    ex1: bool
    ex3: bool
    verdict: Verdict
    provenance: str
    quadratic_iii: bool
    linear_iii: Optional[bool]

    def to_json(self) -> dict:
        return {
            "mo_theorem": self.mo_theorem,
            "ex1": self.ex1,
            "ex3": self.ex3,
            "verdict": self.verdict.value,
            "provenance": self.provenance,
            "condition_iii_quadratic": self.quadratic_iii,
            "condition_iii_linear": self.linear_iii,
        }


def check_conditions(pair: SDPair) -> SDStatus:
    v, w = pair.v, pair.w
    r, s = pair.r, pair.s
    fiber_ok = intersect(v.c1, F) == 1 and intersect(w.c1, F) == 1
    self_sum = pairing(v, v) + pairing(w, w)
    quad = self_sum >= 2 * (r + s) ** 2
    # dividing by r + s is only legitimate when it is positive
    lin = pair.total <= 0 if r + s > 0 else None
    if lin is not None and lin != quad:
        raise ArithmeticError(f"condition (iii) forms disagree for {pair}")

    mo = r >= 2 and s >= 2 and fiber_ok and quad
    ex1 = r >= 0 and s >= 0 and r + s >= 4 and fiber_ok and self_sum == 2 * (r + s) ** 2
    ex3 = r >= 3 and s >= 3 and fiber_ok and self_sum == 2 * (r + s) * (r + s - 2)
    if mo:
        verdict, why = Verdict.ISOMORPHISM, "rank/fiber/self-pairing criterion"
    elif ex1:
        verdict, why = Verdict.ISOMORPHISM, "boundary case transported by rank-shifting steps"
    elif ex3:
        verdict, why = Verdict.ZERO, "one wall past the criterion; assumes isomorphism on the far side"
    else:
        verdict, why = Verdict.UNKNOWN, "no rule applies"
    return SDStatus(mo, ex1, ex3, verdict, why, quad, lin)


def normalize_v(pair: SDPair) -> MukaiVector:
    """Twist v by (-p-r+1) f so that chi = 1."""
    return twist(pair.v, F * (-pair.p - pair.r + 1))


def normalize_w(pair: SDPair) -> MukaiVector:
    return twist(pair.w, F * (-pair.q - pair.s + 1))


def propex_step_a(pair: SDPair) -> SDPair:
    """(r, s) -> (r+1, s-1) when p+q+r+s = 0."""
    if pair.total != 0:
        raise ValueError(f"step (a) needs p+q+r+s = 0, got {pair.total}")
    if pair.s < 1:
        raise ValueError("step (a) needs s >= 1")
    v_new = reflect(twist(normalize_v(pair), F * -2), O_X)
    w_new = reflect(normalize_w(pair), O_X)
    return pair_from_vectors(v_new, w_new)


@dataclass(frozen=True)
class StepBResult:
    pair: SDPair
    verdict: Verdict
    witness: MukaiVector
    witness_pairing: int


def propex_step_b(pair: SDPair) -> StepBResult:
    """(r, s) -> (r+1, s+1) when p+q+r+s = -2; the target's map is zero."""
    if pair.total != -2:
        raise ValueError(f"step (b) needs p+q+r+s = -2, got {pair.total}")
    v_new = reflect(twist(normalize_v(pair), F * -2), O_X)
    w_new = reflect(twist(normalize_w(pair), F * -2), O_X)
    out = pair_from_vectors(v_new, w_new)
    witness = twist(O_X, F * 2)
    return StepBResult(out, Verdict.ZERO, witness, pairing(dual(w_new), witness))


@dataclass(frozen=True)
class TransitionResult:
    verdict: Verdict
    minimal: MukaiVector
    pairing: int
    reflections: tuple
    provenance: str

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "minimal_class": self.minimal.to_json(),
            "pairing_with_minimal": self.pairing,
            "reflections": [s.to_json() for s in self.reflections],
            "provenance": self.provenance,
        }


def sd_wall_transition(
    v: MukaiVector,
    w: MukaiVector,
    wall_ctx: tuple[HyperbolicLattice, EffectivenessContext],
    slice: SliceSpec,
    bound: int,
) -> TransitionResult:
    """Effect on the duality map of crossing a totally semistable wall of ``w``.

    Uses the direct convention (v, w) = 0.  With w_0 the minimal class of w on
    the wall, the map becomes zero when (v, w_0) != 0 and stays an
    isomorphism otherwise.
    """
    h, ctx = wall_ctx
    if pairing(v, w) != 0:
        raise HypothesisError(f"(v, w) = {pairing(v, w)}, expected 0")
    if pairing(v, v) <= 0 or pairing(w, w) <= 0:
        raise HypothesisError("both classes need positive self-pairing")
    if h.has_isotropic():
        raise HypothesisError("hypotheses unmet: the wall lattice is isotropic")
    cls = classify_wall(w, h, ctx, slice, bound)
    if not cls.totally_semistable or cls.kind is not Kind.SPHERICAL:
        raise HypothesisError(f"hypotheses unmet: wall is not totally semistable for w (status {cls.status})")
    mc = minimal_class(w, h, ctx, slice, bound)
    pw = pairing(v, mc.v0)
    verdict = Verdict.ZERO if pw else Verdict.ISOMORPHISM
    return TransitionResult(verdict, mc.v0, pw, tuple(mc.reflections), "assumes the map is an isomorphism before the wall")


def sweep(rs_max: int, pq_min: int, pq_max: int = 0) -> list[tuple[SDPair, SDStatus]]:
    """All (r, s, p, q) in the box with a = ceil(total/2), b = rest."""
    out = []
    for r in range(0, rs_max + 1):
        for s in range(0, rs_max + 1):
            for p in range(pq_min, pq_max + 1):
                for q in range(pq_min, pq_max + 1):
                    ab = 2 - (r + s) * (p + q)
                    a = -(-ab // 2)
                    pair = make_pair(r, s, p, q, a, ab - a)
                    out.append((pair, check_conditions(pair)))
    return out
