"""Integer arithmetic in the algebraic Mukai lattice of an elliptic K3 surface.

NS(X) = Zc + Zf with c^2 = -2, c.f = 1, f^2 = 0.  A Mukai vector is a triple
(r, c1, s) in H^0 + NS + H^4 with the pairing

    (v, w) = c1(v).c1(w) - r(v) s(w) - r(w) s(v),

so that chi(E, F) = -(v(E), v(F)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "DivisorClass",
    "MukaiVector",
    "SheafData",
    "GranularityError",
    "NotSphericalError",
    "C",
    "F",
    "ZERO_DIVISOR",
    "O_X",
    "intersect",
    "pairing",
    "mukai_vector",
    "twist",
    "dual",
    "euler_characteristic",
    "reflect",
    "is_spherical",
    "is_isotropic",
    "is_primitive",
    "gram_matrix",
    "signature",
    "line_bundle",
    "ideal_sheaf",
]


class GranularityError(ValueError):
    """A Chern character whose H^4 part does not land on a lattice point."""


class NotSphericalError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class DivisorClass:
    """The divisor ``alpha*c + beta*f``."""

    alpha: int = 0
    beta: int = 0

    def __add__(self, other: DivisorClass) -> DivisorClass:
        return DivisorClass(self.alpha + other.alpha, self.beta + other.beta)

    def __sub__(self, other: DivisorClass) -> DivisorClass:
        return DivisorClass(self.alpha - other.alpha, self.beta - other.beta)

    def __neg__(self) -> DivisorClass:
        return DivisorClass(-self.alpha, -self.beta)

    def __mul__(self, k: int) -> DivisorClass:
        return DivisorClass(k * self.alpha, k * self.beta)

    __rmul__ = __mul__

    def dot(self, other: DivisorClass) -> int:
        return intersect(self, other)

    def square(self) -> int:
        return intersect(self, self)

    def __str__(self) -> str:
        a, b = self.alpha, self.beta
        if a == 0 and b == 0:
            return "0"
        parts = []
        if a:
            parts.append("c" if a == 1 else "-c" if a == -1 else f"{a}c")
        if b:
            term = "f" if abs(b) == 1 else f"{abs(b)}f"
            if parts:
                parts.append(("+ " if b > 0 else "- ") + term)
            else:
                parts.append(term if b > 0 else "-" + term)
        return " ".join(parts)


C = DivisorClass(1, 0)
F = DivisorClass(0, 1)
ZERO_DIVISOR = DivisorClass(0, 0)


def intersect(d1: DivisorClass, d2: DivisorClass) -> int:
    return -2 * d1.alpha * d2.alpha + d1.alpha * d2.beta + d2.alpha * d1.beta


@dataclass(frozen=True, order=True)
class MukaiVector:
    r: int
    c1: DivisorClass
    s: int

    @classmethod
    def of(cls, r: int, alpha: int, beta: int, s: int) -> MukaiVector:
        return cls(r, DivisorClass(alpha, beta), s)

    def coords(self) -> tuple[int, int, int, int]:
        return (self.r, self.c1.alpha, self.c1.beta, self.s)

    @classmethod
    def from_coords(cls, xs) -> MukaiVector:
        r, a, b, s = (int(x) for x in xs)
        return cls(r, DivisorClass(a, b), s)

    def __add__(self, other: MukaiVector) -> MukaiVector:
        return MukaiVector(self.r + other.r, self.c1 + other.c1, self.s + other.s)

    def __sub__(self, other: MukaiVector) -> MukaiVector:
        return MukaiVector(self.r - other.r, self.c1 - other.c1, self.s - other.s)

    def __neg__(self) -> MukaiVector:
        return MukaiVector(-self.r, -self.c1, -self.s)

    def __mul__(self, k: int) -> MukaiVector:
        return MukaiVector(k * self.r, self.c1 * k, k * self.s)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.r == 0 and self.s == 0 and self.c1 == ZERO_DIVISOR

    @property
    def ch2(self) -> int:
        """H^4 part of the Chern character, ``s - r`` (since sqrt td = (1, 0, 1))."""
        return self.s - self.r

    def to_json(self) -> dict:
        return {"r": self.r, "c": self.c1.alpha, "f": self.c1.beta, "s": self.s}

    @classmethod
    def from_json(cls, obj: dict) -> MukaiVector:
        return cls(int(obj["r"]), DivisorClass(int(obj["c"]), int(obj["f"])), int(obj["s"]))

    def __str__(self) -> str:
        return f"({self.r}, {self.c1}, {self.s})"


@dataclass(frozen=True)
class SheafData:
    """Chern character ``(ch0, ch1, ch2)``; ``ch2`` may be a half-integer."""

    r: int
    c1: DivisorClass
    ch2: Fraction

    def __post_init__(self):
        ch2 = Fraction(self.ch2)
        if (2 * ch2).denominator != 1:
            raise GranularityError(f"ch2 = {ch2} is not a half-integer")
        object.__setattr__(self, "ch2", ch2)


def pairing(v: MukaiVector, w: MukaiVector) -> int:
    return intersect(v.c1, w.c1) - v.r * w.s - w.r * v.s


def mukai_vector(d: SheafData) -> MukaiVector:
    s = d.ch2 + d.r
    if s.denominator != 1:
        raise GranularityError(f"H^4 component {s} of v = ch.sqrt(td) is not integral")
    return MukaiVector(d.r, d.c1, int(s))


def twist(v: MukaiVector, d: DivisorClass) -> MukaiVector:
    """Multiply by ``exp(d) = (1, d, d^2/2)``; models ``E -> E(d)``."""
    d_sq = intersect(d, d)
    # d^2 is even on this lattice, so the H^4 part stays integral
    return MukaiVector(v.r, v.c1 + d * v.r, v.s + intersect(v.c1, d) + v.r * d_sq // 2)


def dual(v: MukaiVector) -> MukaiVector:
    return MukaiVector(v.r, -v.c1, v.s)


def euler_characteristic(v: MukaiVector) -> int:
    return v.r + v.s


def reflect(v: MukaiVector, s: MukaiVector) -> MukaiVector:
    """Cohomological action ``v + (v, s) s`` of the (inverse) spherical twist by ``s``."""
    if pairing(s, s) != -2:
        raise NotSphericalError(f"{s} has self-pairing {pairing(s, s)}, expected -2")
    return v + s * pairing(v, s)


def is_spherical(v: MukaiVector) -> bool:
    return pairing(v, v) == -2


def is_isotropic(v: MukaiVector) -> bool:
    return pairing(v, v) == 0


def is_primitive(v: MukaiVector) -> bool:
    if v.is_zero():
        raise ValueError("the zero vector is neither primitive nor imprimitive")
    return math.gcd(*v.coords()) == 1


def line_bundle(d: DivisorClass) -> MukaiVector:
    return twist(MukaiVector(1, ZERO_DIVISOR, 1), d)


def ideal_sheaf(n: int) -> MukaiVector:
    """Mukai vector ``(1, 0, 1-n)`` of the ideal sheaf of ``n`` points."""
    return MukaiVector(1, ZERO_DIVISOR, 1 - n)


O_X = MukaiVector(1, ZERO_DIVISOR, 1)

_BASIS = (
    MukaiVector(1, ZERO_DIVISOR, 0),
    MukaiVector(0, C, 0),
    MukaiVector(0, F, 0),
    MukaiVector(0, ZERO_DIVISOR, 1),
)


def gram_matrix(basis=_BASIS) -> list[list[int]]:
    return [[pairing(x, y) for y in basis] for x in basis]


def _charpoly(m: list[list[int]]) -> list[Fraction]:
    # Faddeev-LeVerrier; returns coefficients of det(xI - M), highest degree first
    n = len(m)
    mat = [[Fraction(x) for x in row] for row in m]
    coeffs = [Fraction(1)]
    acc = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # acc <- M (acc + c_{k-1} I)
        shifted = [[acc[i][j] + (coeffs[-1] if i == j else 0) for j in range(n)] for i in range(n)]
        acc = [[sum(mat[i][t] * shifted[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs.append(-sum(acc[i][i] for i in range(n)) / k)
    return coeffs


def signature(m: list[list[int]]) -> tuple[int, int]:
    """(positive, negative) eigenvalue counts of a symmetric integer matrix.

    All roots of the characteristic polynomial are real, so Descartes' rule of
    signs is exact: sign changes of p(x) count positive roots and sign changes
    of p(-x) count negative ones.
    """
    coeffs = _charpoly(m)
    n = len(coeffs) - 1

    def changes(cs):
        nz = [c for c in cs if c != 0]
        return sum(1 for x, y in zip(nz, nz[1:]) if (x > 0) != (y > 0))

    pos = changes(coeffs)
    neg = changes([c * (-1) ** (n - i) for i, c in enumerate(coeffs)])
    return pos, neg
