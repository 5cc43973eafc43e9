"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 search bounds too
small to reach a verdict.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import classify as cl
from . import duality as sd
from . import tower as tw
from .mukai import DivisorClass, MukaiVector, NotSphericalError, pairing, reflect, twist
from .slice import SliceSpec
from .svg import render_hyperbola, render_walls
from .walls import WallKind, discriminant, is_nested, t_intercept, wall_locus, wall_quadratic

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_INCONCLUSIVE = 0, 1, 2, 3
FORMATS = ("json", "text", "svg", "csv")


class UsageError(Exception):
    pass


class Inconclusive(Exception):
    def __init__(self, payload):
        super().__init__("inconclusive")
        self.payload = payload


@dataclass(frozen=True)
class CliConfig:
    fmt: str
    out: Optional[str]
    bounds: tuple[int, ...]

    def __post_init__(self):
        if self.fmt not in FORMATS:
            raise UsageError(f"unknown format {self.fmt!r}")
        if any(b <= 0 for b in self.bounds):
            raise UsageError("bounds must be positive")


# -- argument parsing --------------------------------------------------------


def _ints(text: str, count: int, what: str) -> list[int]:
    parts = text.split(",")
    if len(parts) != count:
        raise argparse.ArgumentTypeError(f"{what} needs {count} comma-separated integers, got {len(parts)} in {text!r}")
    out = []
    for i, p in enumerate(parts, start=1):
        try:
            out.append(int(p.strip()))
        except ValueError:
            raise argparse.ArgumentTypeError(f"{what} component {i} ({p!r}) is not an integer") from None
    return out


def parse_vector(text: str) -> MukaiVector:
    """``r,alpha,beta,s`` for (r, alpha c + beta f, s)."""
    return MukaiVector.of(*_ints(text, 4, "vector"))


def parse_divisor(text: str) -> DivisorClass:
    return DivisorClass(*_ints(text, 2, "divisor"))


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational number") from None


def parse_bounds(text: str) -> tuple[int, ...]:
    parts = text.split(",")
    if not 1 <= len(parts) <= 2:
        raise argparse.ArgumentTypeError("bounds are 'B' or 'R,B'")
    vals = tuple(_ints(text, len(parts), "bounds"))
    if any(b <= 0 for b in vals):
        raise argparse.ArgumentTypeError("bounds must be positive")
    return vals


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--format", choices=FORMATS, default=d, help="output format (default depends on command)")
    p.add_argument("--out", default=d, help="write output here instead of stdout")
    p.add_argument("--bounds", type=parse_bounds, default=d, help="enumeration bounds, 'B' or 'R,B'")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="k3walls", description="Exact wall computations for moduli of sheaves on an elliptic K3.")
    _globals(p, suppress=False)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def cmd(name, help):
        sp = sub.add_parser(name, help=help)
        _globals(sp, suppress=True)
        return sp

    sp = cmd("pair", "Mukai pairing")
    sp.add_argument("--v", type=parse_vector, required=True)
    sp.add_argument("--w", type=parse_vector, required=True)

    sp = cmd("twist", "tensor by a line bundle")
    sp.add_argument("--v", type=parse_vector, required=True)
    sp.add_argument("--d", type=parse_divisor, required=True)

    sp = cmd("reflect", "reflect in a spherical class")
    sp.add_argument("--v", type=parse_vector, required=True)
    sp.add_argument("--s", type=parse_vector, required=True)

    for name, help in (("wall", "wall of two classes"), ("classify", "classify the wall of v defined by w")):
        sp = cmd(name, help)
        sp.add_argument("--v", type=parse_vector, required=True)
        sp.add_argument("--w", type=parse_vector, required=True)
        sp.add_argument("--m", type=parse_rational, required=True, help="H = c + m f")
        sp.add_argument("--unnormalized", action="store_true", help="use H itself instead of H/sqrt(H^2)")
        sp.add_argument("--todd", action="store_true", help="Mukai-vector H^4 term in Re Z instead of ch2")

    sp = cmd("tower", "tower levels, walls and nesting")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=parse_rational, required=True)
    sp.add_argument("--R", type=int, required=True)

    sp = cmd("firstwall", "first wall of the ideal sheaf of n points")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--u", type=parse_rational, default=None, help="ray position (default: inside the O(-C) wall)")
    sp.add_argument("--epsilon", type=parse_rational, default=tw.EPSILON_N2, help="polarization nudge when n = 2")
    sp.add_argument("--verbose", action="store_true", help="list every judged candidate")

    sp = cmd("quotients", "integer solutions of the spherical-quotient equation")
    sp.add_argument("--n-max", type=int, default=30)
    sp.add_argument("--m-max", type=int, default=40)
    sp.add_argument("--r-max", type=int, default=5)
    sp.add_argument("--k-max", type=int, default=10)

    sp = cmd("sd", "strange duality conditions, or a sweep")
    sp.add_argument("mode", nargs="?", choices=("check", "sweep"), default="check")
    for k in ("r", "s", "p", "q", "a", "b"):
        sp.add_argument(f"--{k}", type=int)
    sp.add_argument("--rs-max", type=int, default=5)
    sp.add_argument("--pq-min", type=int, default=-8)
    sp.add_argument("--pq-max", type=int, default=0)

    sp = cmd("render", "SVG diagrams")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--tower", help="n,m,R")
    g.add_argument("--hyperbola", help="n,r")
    g.add_argument("--firstwall", type=int, metavar="N")
    return p


# -- output ------------------------------------------------------------------


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(f"{pad}- {json.dumps(x, sort_keys=True)}" for x in obj)
    return f"{pad}{obj}"


def _emit(cfg: CliConfig, payload, text: Optional[str] = None, svg: Optional[str] = None, table: Optional[str] = None) -> str:
    if cfg.fmt == "json":
        return dump_json(payload)
    if cfg.fmt == "text":
        return text if text is not None else _text(payload) + "\n"
    if cfg.fmt == "svg":
        if svg is None:
            raise UsageError("this command has no SVG output")
        return svg
    if table is None:
        raise UsageError("this command has no CSV output")
    return table


# -- commands ----------------------------------------------------------------


def _slice(args) -> SliceSpec:
    return SliceSpec(args.m, normalized=not args.unnormalized, todd=args.todd)


def cmd_pair(args, cfg):
    k = pairing(args.v, args.w)
    return _emit(cfg, {"v": args.v.to_json(), "w": args.w.to_json(), "pairing": k}, text=f"{k}\n")


def cmd_twist(args, cfg):
    out = twist(args.v, args.d)
    return _emit(cfg, {"v": args.v.to_json(), "d": [args.d.alpha, args.d.beta], "result": out.to_json()}, text=f"{out}\n")


def cmd_reflect(args, cfg):
    out = reflect(args.v, args.s)
    return _emit(cfg, {"v": args.v.to_json(), "s": args.s.to_json(), "result": out.to_json()}, text=f"{out}\n")


def _wall_payload(v, w, sl):
    q = wall_quadratic(v, w, sl)
    wg = wall_locus(v, w, sl)
    out = {
        "v": v.to_json(),
        "w": w.to_json(),
        "slice": sl.to_json(),
        "quadratic": q.to_json(),
        "canonical": q.canonical().to_json(),
        "geometry": wg.to_json(),
    }
    if q.A:
        out["discriminant"] = discriminant(q).to_json()
    ti = t_intercept(wg)
    out["t_intercept"] = ti.to_json() if ti is not None else None
    return out, wg


def cmd_wall(args, cfg):
    sl = _slice(args)
    payload, wg = _wall_payload(args.v, args.w, sl)
    return _emit(cfg, payload, svg=render_walls([wg]))


def cmd_classify(args, cfg):
    sl = _slice(args)
    wg = wall_locus(args.v, args.w, sl)
    if wg.kind is not WallKind.SEMICIRCLE:
        raise ValueError(f"the wall of v and w is {wg.kind.value}, not a semicircle")
    h = cl.hyperbolic_lattice(args.v, args.w)
    ctx = cl.make_context(args.v, wg, sl)
    bound = cfg.bounds[-1]
    res = cl.classify_wall(args.v, h, ctx, sl, bound)
    payload = {"lattice": h.to_json(), "point": ctx.to_json(), "wall": wg.to_json(), "classification": res.to_json()}
    if res.totally_semistable and res.kind is cl.Kind.SPHERICAL:
        payload["minimal_class"] = cl.minimal_class(args.v, h, ctx, sl, bound).to_json()
    if res.status != "ok":
        raise Inconclusive(payload)
    return _emit(cfg, payload)


def _nesting(levels) -> list[Optional[bool]]:
    out: list[Optional[bool]] = []
    for i, lv in enumerate(levels):
        if i == 0:
            out.append(lv.wall.is_semicircle or None)
        elif lv.wall.is_semicircle and levels[i - 1].wall.is_semicircle:
            out.append(is_nested(levels[i - 1].wall, lv.wall))
        else:
            out.append(None)
    return out


def _tower_ray(levels) -> Optional[Fraction]:
    """A rational u strictly inside the footprint of W_1."""
    if not levels or not levels[0].wall.is_semicircle:
        return None
    return Fraction(float(levels[0].wall.center) / 2).limit_denominator(1000)


def _yes(x: Optional[bool]) -> str:
    return "n/a" if x is None else "yes" if x else "no"


def cmd_tower(args, cfg):
    if args.R < 0:
        raise ValueError("R must be non-negative")
    if args.R == 0:
        levels = []
        tw.TowerSpec(args.n, args.m, 1)  # still validate n and m
    else:
        levels = tw.build_tower(tw.TowerSpec(args.n, args.m, args.R))
    nested = _nesting(levels)
    rows = []
    for lv, ok in zip(levels, nested):
        row = lv.to_json()
        row["nested"] = ok
        ti = t_intercept(lv.wall)
        row["t_intercept"] = ti.to_json() if ti is not None else None
        rows.append(row)
    payload = {
        "n": args.n,
        "m": str(Fraction(args.m)),
        "R": args.R,
        "admissible": args.R == 0 or tw.tower_walls_admissible(args.n, args.m, args.R),
        "levels": rows,
    }
    lines = []
    for lv, ok in zip(levels, nested):
        wg = lv.wall
        if wg.is_semicircle:
            geo = f"semicircle center={wg.center} radius_sq={wg.radius_sq}"
        elif wg.kind is WallKind.VERTICAL:
            geo = f"vertical u0={wg.u0}"
        else:
            geo = wg.kind.value
        lines.append(f"r={lv.r}  v={lv.v}  s_prev={lv.s_prev}  (v,s_prev)={lv.pairing_check}  wall: {geo}  nested: {_yes(ok)}")
    text = "\n".join(lines) + ("\n" if lines else "")
    ray = _tower_ray(levels)
    svg = render_walls([lv.wall for lv in levels], [ray] if ray is not None else [], [f"W{lv.r}" for lv in levels])
    table = io.StringIO()
    wr = csv.writer(table, lineterminator="\n")
    wr.writerow(["r", "v", "s_prev", "pairing", "wall", "nested"])
    for lv, ok in zip(levels, nested):
        wr.writerow([lv.r, str(lv.v), str(lv.s_prev), lv.pairing_check, lv.wall.kind.value, _yes(ok)])
    return _emit(cfg, payload, text=text, svg=svg, table=table.getvalue())


def _scan(args, cfg):
    sl = tw.first_wall_slice(args.n, args.epsilon)
    rb, cb = (cfg.bounds if len(cfg.bounds) == 2 else (5, cfg.bounds[0]))
    return tw.first_wall_scan(args.n, sl, args.u, rank_bound=rb, coeff_bound=cb)


def cmd_firstwall(args, cfg):
    if args.n < 2:
        raise ValueError("n must be at least 2")
    rep = _scan(args, cfg)
    payload = rep.to_json(verbose=args.verbose)
    if rep.selected is not None:
        label = f"O(-(c+{args.n}f))" if rep.selected_is_o_minus_c else str(rep.selected.vector)
        payload["selected_label"] = label
    svg = render_walls([rep.selected_wall] if rep.selected_wall else [], [rep.u_ray], ["first wall"])
    if rep.status != "ok":
        raise Inconclusive(_emit(cfg, payload, svg=svg))
    text = (
        f"n={args.n} slice m={rep.slice.m} ray u={rep.u_ray}\n"
        f"candidates: {rep.total}, survivors: {len(rep.survivors)}\n"
        f"selected destabilizer {payload['selected_label']}\n"
        f"{rep.certification}\n"
    )
    return _emit(cfg, payload, text=text, svg=svg)


def cmd_quotients(args, cfg):
    sols = tw.eq9_solutions(
        range(2, args.m_max + 1), range(2, args.n_max + 1), range(1, args.r_max + 1), range(-args.k_max, args.k_max + 1)
    )
    rows = [{"m": m, "n": n, "r": r, "k": k} for m, n, r, k in sols]
    family = all(k == 0 and n == r * (r + 1) for _, n, r, k in sols)
    payload = {"solutions": rows, "only_k0_family": family}
    table = io.StringIO()
    wr = csv.writer(table, lineterminator="\n")
    wr.writerow(["m", "n", "r", "k"])
    wr.writerows(sols)
    return _emit(cfg, payload, table=table.getvalue())


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


SWEEP_COLUMNS = ("r", "s", "p", "q", "a", "b", "total", "mo_theorem", "ex1", "ex3", "verdict", "condition_iii_quadratic", "condition_iii_linear")


def cmd_sd(args, cfg):
    if args.mode == "sweep":
        if args.rs_max < 0 or args.pq_min > args.pq_max:
            raise ValueError("empty sweep range")
        rows = []
        for pair, st in sd.sweep(args.rs_max, args.pq_min, args.pq_max):
            j = st.to_json()
            rows.append({
                "r": pair.r, "s": pair.s, "p": pair.p, "q": pair.q, "a": pair.a, "b": pair.b, "total": pair.total,
                "mo_theorem": j["mo_theorem"], "ex1": j["ex1"], "ex3": j["ex3"], "verdict": j["verdict"],
                "condition_iii_quadratic": j["condition_iii_quadratic"], "condition_iii_linear": j["condition_iii_linear"],
            })
        table = io.StringIO()
        wr = csv.DictWriter(table, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        wr.writeheader()
        for row in rows:
            wr.writerow({k: _cell(v) for k, v in row.items()})
        return _emit(cfg, {"rows": rows}, table=table.getvalue())
    missing = [k for k in ("r", "s", "p", "q", "a", "b") if getattr(args, k) is None]
    if missing:
        raise UsageError(f"sd check needs --{', --'.join(missing)}")
    pair = sd.make_pair(args.r, args.s, args.p, args.q, args.a, args.b)
    st = sd.check_conditions(pair)
    payload = {"pair": pair.to_json(), "status": st.to_json()}
    j = st.to_json()
    text = "\n".join(f"{k}: {json.dumps(j[k])}" for k in sorted(j)) + "\n"
    return _emit(cfg, payload, text=text)


def cmd_render(args, cfg):
    if args.tower:
        parts = args.tower.split(",")
        if len(parts) != 3:
            raise UsageError("--tower needs n,m,R")
        n, R = _ints(f"{parts[0]},{parts[2]}", 2, "--tower")
        ns = argparse.Namespace(n=n, m=parse_rational(parts[1]), R=R)
        return cmd_tower(ns, CliConfig("svg", cfg.out, cfg.bounds))
    if args.hyperbola:
        n, r = _ints(args.hyperbola, 2, "--hyperbola")
        if n < 2 or r < 1:
            raise ValueError("need n >= 2 and r >= 1")
        h = cl.hyperbolic_lattice(tw.s_class(r - 1), tw.v_closed(n, r))
        extent = cfg.bounds[-1] if cfg.bounds != DEFAULT_BOUNDS else 6
        pts = [h.coordinates(x) for x in cl.enumerate_spherical(h, extent)]
        return render_hyperbola(n, r, pts, extent)
    ns = argparse.Namespace(n=args.firstwall, u=None, epsilon=tw.EPSILON_N2, verbose=False)
    return cmd_firstwall(ns, CliConfig("svg", cfg.out, cfg.bounds))


COMMANDS = {
    "pair": cmd_pair,
    "twist": cmd_twist,
    "reflect": cmd_reflect,
    "wall": cmd_wall,
    "classify": cmd_classify,
    "tower": cmd_tower,
    "firstwall": cmd_firstwall,
    "quotients": cmd_quotients,
    "sd": cmd_sd,
    "render": cmd_render,
}
DEFAULT_BOUNDS = (5, 30)


def _write(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ValueError(f"cannot write {path}: {exc.strerror}") from None


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fmt = args.format
    if fmt is None:
        if args.command == "render":
            fmt = "svg"
        elif args.command == "sd" and args.mode == "sweep":
            fmt = "csv"
        else:
            fmt = "json"
    try:
        cfg = CliConfig(fmt, args.out, args.bounds or DEFAULT_BOUNDS)
        _write(COMMANDS[args.command](args, cfg), cfg.out)
        return EXIT_OK
    except (UsageError, argparse.ArgumentTypeError) as exc:
        sys.stderr.write(f"k3walls: usage error: {exc}\n")
        return EXIT_USAGE
    except Inconclusive as exc:
        payload = exc.payload
        text = payload if isinstance(payload, str) else dump_json(payload)
        try:
            _write(text, args.out)
        except ValueError as werr:
            sys.stderr.write(f"k3walls: {werr}\n")
            return EXIT_DOMAIN
        sys.stderr.write("k3walls: inconclusive within the given bounds\n")
        return EXIT_INCONCLUSIVE
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except (ValueError, ArithmeticError, NotSphericalError) as exc:
        sys.stderr.write(f"k3walls: error: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
