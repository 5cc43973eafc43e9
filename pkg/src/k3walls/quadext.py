"""Exact arithmetic in real quadratic fields Q(sqrt d).

Central charges on a slice normalized to H^2 = 1 live in Q(sqrt(2m-2)), so
every comparison made by the wall code goes through this module.  Nothing here
touches floating point except ``__float__``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

Rational = Union[int, Fraction]


@lru_cache(maxsize=4096)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(k, d)`` with ``n == k*k*d`` and ``d`` squarefree, for ``n > 0``."""
    if n <= 0:
        raise ValueError(f"squarefree_split needs a positive integer, got {n}")
    root = math.isqrt(n)
    if root * root == n:
        return root, 1
    if n > 10**8:
        from sympy import factorint

        k, d = 1, 1
        for p, e in factorint(n).items():
            k *= p ** (e // 2)
            d *= p ** (e % 2)
        return k, d
    k, d, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            k *= p
        if n % p == 0:
            n //= p
            d *= p
        p += 1
    return k, d * n


def _frac(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


_ZERO = Fraction(0)


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


class QuadExt:
    """The number ``a + b*sqrt(d)`` with rational ``a, b`` and squarefree ``d``.

    ``d`` is canonicalized on construction, so ``QuadExt(0, 1, 8)`` is stored as
    ``2*sqrt(2)``; when ``d`` is a perfect square the value collapses to a
    rational with ``d == 1`` and ``b == 0``.  Numbers over different radicands
    only mix when one side is rational.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Rational = 0, b: Rational = 0, d: Rational = 1):
        a, b, dq = _frac(a), _frac(b), _frac(d)
        if dq <= 0:
            raise ValueError(f"radicand must be positive, got {d}")
        # sqrt(p/q) = sqrt(p*q)/q
        k, sf = squarefree_split(dq.numerator * dq.denominator)
        b = b * k / dq.denominator
        if sf == 1 or b == 0:
            a, b, sf = a + (b if sf == 1 else 0), Fraction(0), 1
        self.a, self.b, self.d = a, b, sf

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction, d: int) -> QuadExt:
        # trusted constructor: d already squarefree, a and b already Fractions
        out = object.__new__(cls)
        if b == 0:
            out.a, out.b, out.d = a, b, 1
        else:
            out.a, out.b, out.d = a, b, d
        return out

    @classmethod
    def sqrt(cls, x: Rational) -> QuadExt:
        """Exact square root of a non-negative rational."""
        x = _frac(x)
        if x < 0:
            raise ValueError(f"square root of negative rational {x}")
        if x == 0:
            return cls(0)
        return cls(0, 1, x)

    @staticmethod
    def coerce(x: Union[QuadExt, Rational]) -> QuadExt:
        if isinstance(x, QuadExt):
            return x
        return QuadExt._raw(_frac(x), _ZERO, 1)

    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is irrational")
        return self.a

    def _common(self, other: QuadExt) -> int:
        if self.b == 0:
            return other.d
        if other.b == 0 or other.d == self.d:
            return self.d
        raise ValueError(f"cannot mix Q(sqrt {self.d}) with Q(sqrt {other.d})")

    def conjugate(self) -> QuadExt:
        return QuadExt._raw(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def sign(self) -> int:
        sa, sb = _sign(self.a), _sign(self.b)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: the larger magnitude wins; a^2 == b^2 d is impossible
        return sa if self.a * self.a > self.b * self.b * self.d else sb

    def __add__(self, other):
        if not isinstance(other, (QuadExt, int, Fraction)):
            return NotImplemented
        other = QuadExt.coerce(other)
        d = self._common(other)
        return QuadExt._raw(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self) -> QuadExt:
        return QuadExt._raw(-self.a, -self.b, self.d)

    def __sub__(self, other):
        if not isinstance(other, (QuadExt, int, Fraction)):
            return NotImplemented
        return self + (-QuadExt.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, (QuadExt, int, Fraction)):
            return NotImplemented
        other = QuadExt.coerce(other)
        d = self._common(other)
        if not self.b and not other.b:
            return QuadExt._raw(self.a * other.a, _ZERO, 1)
        a = self.a * other.a + self.b * other.b * d
        b = self.a * other.b + self.b * other.a
        return QuadExt._raw(a, b, d)

    __rmul__ = __mul__

    def inverse(self) -> QuadExt:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt d)")
        return QuadExt._raw(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if not isinstance(other, (QuadExt, int, Fraction)):
            return NotImplemented
        return self * QuadExt.coerce(other).inverse()

    def __rtruediv__(self, other):
        return QuadExt.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> QuadExt:
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadExt(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadExt):
            return self.a == other.a and self.b == other.b and (self.b == 0 or self.d == other.d)
        return NotImplemented

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def _cmp(self, other) -> int:
        return (self - QuadExt.coerce(other)).sign()

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __abs__(self) -> QuadExt:
        return -self if self.sign() < 0 else self

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def sqrt_in_field(self) -> Optional[QuadExt]:
        """Non-negative square root if it lies in Q(sqrt d) (or is a rational surd)."""
        if self.sign() < 0:
            return None
        if self.b == 0:
            return QuadExt.sqrt(self.a)
        # (p + q sqrt d)^2 = p^2 + d q^2 + 2 p q sqrt d
        disc = self.norm()
        if disc < 0:
            return None
        root = _rational_sqrt(disc)
        if root is None:
            return None
        for p_sq in ((self.a + root) / 2, (self.a - root) / 2):
            p = _rational_sqrt(p_sq) if p_sq > 0 else None
            if p is None:
                continue
            cand = QuadExt(p, self.b / (2 * p), self.d)
            if cand.sign() < 0:
                cand = -cand
            if cand * cand == self:
                return cand
        return None

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b), "d": self.d}

    @classmethod
    def from_json(cls, obj: dict) -> QuadExt:
        return cls(Fraction(obj["a"]), Fraction(obj["b"]), int(obj["d"]))

    def __repr__(self) -> str:
        return f"QuadExt({self.a!s}, {self.b!s}, {self.d})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        surd = f"sqrt({self.d})"
        coef = "" if self.b == 1 else "-" if self.b == -1 else f"{self.b}*"
        if self.a == 0:
            return f"{coef}{surd}"
        sep = " - " if self.b < 0 else " + "
        coef = coef.lstrip("-")
        return f"{self.a}{sep}{coef}{surd}"


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    if x < 0:
        return None
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


class PositiveRoot:
    """A positive real ``sqrt(square)`` with ``square`` an exact element of Q(sqrt d).

    Wall t-intercepts such as ``2*sqrt((r-1)/(n+m+r-2-r^2))`` usually leave the
    coefficient field; they are carried by their squares and ordered exactly.
    """

    __slots__ = ("square",)

    def __init__(self, square: Union[QuadExt, Rational]):
        square = QuadExt.coerce(square)
        if square.sign() <= 0:
            raise ValueError(f"PositiveRoot needs a positive square, got {square}")
        self.square = square

    def exact(self) -> Optional[QuadExt]:
        return self.square.sqrt_in_field()

    def __eq__(self, other) -> bool:
        if isinstance(other, PositiveRoot):
            return self.square == other.square
        if isinstance(other, (int, Fraction, QuadExt)):
            other = QuadExt.coerce(other)
            return other.sign() > 0 and other * other == self.square
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("root", self.square))

    def _sq(self, other) -> QuadExt:
        if isinstance(other, PositiveRoot):
            return other.square
        other = QuadExt.coerce(other)
        if other.sign() < 0:
            raise ValueError("comparison with a negative number")
        return other * other

    def __lt__(self, other) -> bool:
        return self.square < self._sq(other)

    def __le__(self, other) -> bool:
        return self.square <= self._sq(other)

    def __gt__(self, other) -> bool:
        return self.square > self._sq(other)

    def __ge__(self, other) -> bool:
        return self.square >= self._sq(other)

    def __float__(self) -> float:
        return math.sqrt(float(self.square))

    def to_json(self) -> dict:
        out = {"square": self.square.to_json()}
        ex = self.exact()
        if ex is not None:
            out["value"] = ex.to_json()
        return out

    def __repr__(self) -> str:
        ex = self.exact()
        return f"PositiveRoot({ex if ex is not None else 'sqrt(' + str(self.square) + ')'})"
