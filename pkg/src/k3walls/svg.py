"""Deterministic SVG pictures of walls on the (u, t) half-plane and of the spherical hyperbola.

Exact values are converted to floats only here, and every coordinate is
rounded to six decimals when written out, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .walls import WallGeometry, WallKind

WIDTH = 800.0
HEIGHT = 480.0
MARGIN = 40.0
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _fmt(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Frame:
    """Affine map from the math window to SVG pixels, same scale on both axes."""

    def __init__(self, xmin: float, xmax: float, ymin: float, ymax: float):
        span_x, span_y = max(xmax - xmin, 1e-9), max(ymax - ymin, 1e-9)
        self.k = min((WIDTH - 2 * MARGIN) / span_x, (HEIGHT - 2 * MARGIN) / span_y)
        self.xmin, self.ymin, self.ymax = xmin, ymin, ymax

    def x(self, u: float) -> float:
        return MARGIN + (u - self.xmin) * self.k

    def y(self, t: float) -> float:
        return HEIGHT - MARGIN - (t - self.ymin) * self.k

    def pt(self, u: float, t: float) -> str:
        return f"{_fmt(self.x(u))},{_fmt(self.y(t))}"


def _header() -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(WIDTH)}" height="{_fmt(HEIGHT)}" '
        f'viewBox="0 0 {_fmt(WIDTH)} {_fmt(HEIGHT)}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="white"/>',
    ]


def _extent(walls: Sequence[WallGeometry], rays: Sequence[float]) -> tuple[float, float, float]:
    lo, hi, top = [], [], [1.0]
    for wg in walls:
        if wg.kind is WallKind.SEMICIRCLE:
            c, rad = float(wg.center), math.sqrt(float(wg.radius_sq))
            lo.append(c - rad)
            hi.append(c + rad)
            top.append(rad)
        elif wg.kind is WallKind.VERTICAL:
            lo.append(float(wg.u0))
            hi.append(float(wg.u0))
    lo.extend(rays)
    hi.extend(rays)
    if not lo:
        return -1.0, 1.0, 1.0
    umin, umax = min(lo + [0.0]), max(hi + [0.0])
    pad = 0.08 * max(umax - umin, 1.0)
    return umin - pad, umax + pad, max(top) * 1.15


def render_walls(
    walls: Sequence[WallGeometry],
    rays: Iterable = (),
    labels: Optional[Sequence[str]] = None,
    title: str = "",
) -> str:
    rays = [float(Fraction(r)) if not isinstance(r, float) else r for r in rays]
    umin, umax, tmax = _extent(walls, rays)
    fr = _Frame(umin, umax, 0.0, tmax)
    out = _header()
    if title:
        out.append(f'<title>{title}</title>')
    # axes
    out.append(f'<line x1="{_fmt(fr.x(umin))}" y1="{_fmt(fr.y(0))}" x2="{_fmt(fr.x(umax))}" y2="{_fmt(fr.y(0))}" stroke="black" stroke-width="1"/>')
    if umin <= 0 <= umax:
        out.append(f'<line x1="{_fmt(fr.x(0))}" y1="{_fmt(fr.y(0))}" x2="{_fmt(fr.x(0))}" y2="{_fmt(fr.y(tmax))}" stroke="black" stroke-width="1"/>')
    out.append(f'<text x="{_fmt(fr.x(umax) - 12)}" y="{_fmt(fr.y(0) + 16)}" font-size="12">u</text>')
    out.append(f'<text x="{_fmt(fr.x(0) + 6 if umin <= 0 <= umax else fr.x(umin) + 6)}" y="{_fmt(fr.y(tmax) + 12)}" font-size="12">t</text>')
    for i, wg in enumerate(walls):
        color = PALETTE[i % len(PALETTE)]
        label = labels[i] if labels and i < len(labels) else f"W{i + 1}"
        if wg.kind is WallKind.SEMICIRCLE:
            c, rad = float(wg.center), math.sqrt(float(wg.radius_sq))
            rpx = _fmt(rad * fr.k)
            out.append(
                f'<path d="M {fr.pt(c - rad, 0)} A {rpx} {rpx} 0 0 1 {fr.pt(c + rad, 0)}" '
                f'fill="none" stroke="{color}" stroke-width="1.5"><title>{label}</title></path>'
            )
            out.append(f'<text x="{_fmt(fr.x(c) - 8)}" y="{_fmt(fr.y(rad) - 4)}" font-size="11" fill="{color}">{label}</text>')
        elif wg.kind is WallKind.VERTICAL:
            u0 = float(wg.u0)
            out.append(
                f'<line x1="{_fmt(fr.x(u0))}" y1="{_fmt(fr.y(0))}" x2="{_fmt(fr.x(u0))}" y2="{_fmt(fr.y(tmax))}" '
                f'stroke="{color}" stroke-width="1.5"><title>{label}</title></line>'
            )
    for u in rays:
        out.append(
            f'<line x1="{_fmt(fr.x(u))}" y1="{_fmt(fr.y(0))}" x2="{_fmt(fr.x(u))}" y2="{_fmt(fr.y(tmax))}" '
            f'stroke="gray" stroke-width="1" stroke-dasharray="6,4"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_hyperbola(n: int, r: int, points: Sequence[tuple[int, int]], extent: int = 6) -> str:
    """The conic -2x^2 - 2xy + (2n-2)y^2 = -2, the line x + (2n-1)y = 0 and the half-plane 2x + y <= -3.

    Coordinates are (x, y) for the class x s_{r-1} + y v_r; ``points`` are
    marked as dots.
    """
    X = float(extent)
    fr = _Frame(-X, X, -X, X)
    out = _header()
    out.append(f"<title>spherical classes for n={n}, r={r}</title>")
    # half-plane 2x + y <= -3, clipped to the window
    poly = []
    for x, y in ((-X, -X), (X, -X), (X, X), (-X, X)):
        poly.append((x, y))
    clipped = _clip_halfplane(poly, lambda x, y: 2 * x + y + 3)
    if clipped:
        out.append('<polygon points="' + " ".join(fr.pt(x, y) for x, y in clipped) + '" fill="#ffdddd" stroke="none"/>')
    out.append(f'<line x1="{fr.pt(-X, 0).split(",")[0]}" y1="{_fmt(fr.y(0))}" x2="{_fmt(fr.x(X))}" y2="{_fmt(fr.y(0))}" stroke="black"/>')
    out.append(f'<line x1="{_fmt(fr.x(0))}" y1="{_fmt(fr.y(-X))}" x2="{_fmt(fr.x(0))}" y2="{_fmt(fr.y(X))}" stroke="black"/>')
    # the line x + (2n-1) y = 0
    k = 2 * n - 1
    out.append(f'<line x1="{_fmt(fr.x(-X))}" y1="{_fmt(fr.y(X / k))}" x2="{_fmt(fr.x(X))}" y2="{_fmt(fr.y(-X / k))}" stroke="#2ca02c" stroke-width="1.5"/>')
    # both branches, parametrized by y
    for sign, color in ((1, "#1f77b4"), (-1, "#d62728")):
        pts = []
        steps = 400
        for i in range(steps + 1):
            y = -X + 2 * X * i / steps
            disc = 4 * y * y + 8 * ((2 * n - 2) * y * y + 2)
            x = (-2 * y + sign * math.sqrt(disc)) / 4
            if -X <= x <= X:
                pts.append(fr.pt(x, y))
        if pts:
            out.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}" stroke-width="1.5"/>')
    for x, y in sorted(points):
        if abs(x) <= X and abs(y) <= X:
            out.append(f'<circle cx="{_fmt(fr.x(x))}" cy="{_fmt(fr.y(y))}" r="3" fill="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _clip_halfplane(poly, f):
    """Sutherland-Hodgman clip of a convex polygon to {f <= 0}."""
    out = []
    for i, (x1, y1) in enumerate(poly):
        x2, y2 = poly[(i + 1) % len(poly)]
        f1, f2 = f(x1, y1), f(x2, y2)
        if f1 <= 0:
            out.append((x1, y1))
        if (f1 < 0 < f2) or (f2 < 0 < f1):
            lam = f1 / (f1 - f2)
            out.append((x1 + lam * (x2 - x1), y1 + lam * (y2 - y1)))
    return out
