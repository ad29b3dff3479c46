"""Command line front end: ``flatfront {classify|figure|eval|sweep}``.

Exit codes: 0 success, 2 usage or parameter error, 3 I/O error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import re
import sys
from pathlib import Path

import numpy as np
import tomli

from . import figures, hyp3, maps, mesh
from .errors import DomainError, FlatFrontError, ParameterError
from .hgode import lift_at, q_at, sl_coefficient
from .params import HGParams, relaxed_params

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_NAMES = {"pi": math.pi, "e": math.e}
_FUNCS = {"sqrt": math.sqrt}


class UsageError(Exception):
    pass


def parse_real(text: str) -> float:
    """Real number or small arithmetic expression such as ``1-sqrt3/2``.

    ``sqrtN`` abbreviates ``sqrt(N)``.
    """
    src = re.sub(r"sqrt(\d+(?:\.\d*)?)", r"sqrt(\1)", str(text).strip())

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError

    try:
        value = ev(ast.parse(src, mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError, TypeError):
        raise UsageError(f"cannot parse real number {text!r}") from None
    if not math.isfinite(value):
        raise UsageError(f"{text!r} is not finite")
    return value


def parse_complex(text: str) -> complex:
    """``re+imi`` literal (``i`` or ``j`` accepted), or a plain real."""
    s = str(text).strip().replace(" ", "")
    if s.endswith("i"):
        s = s[:-1] + "j"
    try:
        return complex(s)
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def parse_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [parse_real(v) for v in str(text).split(",") if v.strip()]


def parse_grid(text) -> tuple[int, int]:
    if isinstance(text, (list, tuple)):
        w, h = text
    else:
        try:
            w, h = str(text).lower().split("x")
        except ValueError:
            raise UsageError(f"grid must look like WxH, got {text!r}") from None
    try:
        w, h = int(w), int(h)
    except ValueError:
        raise UsageError(f"grid must look like WxH, got {text!r}") from None
    if w < 2 or h < 2:
        raise UsageError("grid needs at least 2x2 vertices")
    return w, h


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    except tomli.TOMLDecodeError as exc:
        raise UsageError(f"invalid config {path}: {exc}") from None
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise UsageError(f"config must be flat; found tables {nested}")
    return {k.replace("-", "_"): v for k, v in data.items()}


def merged(args, defaults: dict) -> dict:
    """Command-line values override the config file, which overrides defaults."""
    conf = load_config(args.config) if getattr(args, "config", None) else {}
    out = dict(defaults)
    out.update(conf)
    for key, value in vars(args).items():
        if value is not None and key not in ("func", "config", "command"):
            out[key] = value
    return out


def make_params(opts) -> HGParams:
    abc = opts.get("abc")
    if abc is None:
        raise UsageError("parameters are required (--abc A B C)")
    if len(abc) != 3:
        raise UsageError("--abc takes three numbers")
    a, b, c = (parse_real(v) if isinstance(v, str) else float(v) for v in abc)
    if opts.get("relaxed"):
        print("warning: relaxed parameters; exponent-difference bounds are not enforced",
              file=sys.stderr)
        return relaxed_params(a, b, c)
    return HGParams(a, b, c)


def tolerance(opts) -> float:
    tol = float(opts.get("tol", 1e-12))
    if not tol > 0:
        raise UsageError("--tol must be positive")
    return tol


def fmt(x) -> str:
    if isinstance(x, complex) or np.iscomplexobj(x):
        return mesh.format_complex(x)
    return f"{float(x):.17g}"


def _emit(text: str, out) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def classification(p: HGParams, tol: float) -> dict:
    rep = maps.ramification_report(p, tol)
    return {"params": [p.a, p.b, p.c],
            "mu": [p.mu0, p.mu1, p.muinf],
            "D": rep.discriminant,
            "s": rep.s,
            "t": rep.t,
            "region": maps.st_region(rep.s, rep.t, tol).value,
            "class": rep.klass.value,
            "roots": [mesh.format_complex(r) for r in rep.roots],
            "indices": list(rep.root_orders)}


def cmd_classify(args) -> int:
    opts = merged(args, {"tol": 1e-12})
    p = make_params(opts)
    info = classification(p, tolerance(opts))
    if opts.get("json"):
        _emit(json.dumps(info, indent=2) + "\n", opts.get("out"))
    else:
        lines = [f"{k}: {v}" for k, v in info.items()]
        _emit("\n".join(lines) + "\n", opts.get("out"))
    return EXIT_OK


def cmd_figure(args) -> int:
    opts = merged(args, {"out": "figures"})
    c_values = parse_list(opts["c"]) if opts.get("c") is not None else None
    t_values = parse_list(opts["t"]) if opts.get("t") is not None else None
    res = parse_grid(opts["grid"]) if opts.get("grid") is not None else None
    if t_values is not None and not all(math.isfinite(t) for t in t_values):
        raise UsageError("t values must be finite")
    files = figures.build_figure(opts["figure_id"], opts["out"], c_values, t_values, res)
    for f in files:
        print(f)
    return EXIT_OK


def _eval_row(p, norm, inverse, kind, x):
    slc = sl_coefficient(p)
    row = {"x": mesh.format_complex(x)}
    q = abs(q_at(slc, x))
    row["q_abs"] = fmt(q)
    row["r"] = fmt(0.5 * math.log(q)) if q > 0 else ""
    lift = lift_at(p, x)
    U = lift.U if norm is None else norm.lift(lift.U)
    if kind == "S":
        row["value"] = fmt(complex(U[0, 0] / U[1, 0]))
    elif kind == "DS":
        row["value"] = fmt(complex(U[0, 1] / U[1, 1]))
    elif kind == "HS":
        b = hyp3.hs_point(U).ball
        row["value"] = " ".join(f"{v:.17g}" for v in b)
    else:
        z = complex(U[0, 0] / U[1, 0])
        row["value"] = fmt(maps.composite_map_f(p, z, norm, inverse))
    return row


def cmd_eval(args) -> int:
    opts = merged(args, {"map": "S", "normalize": "standard"})
    p = make_params(opts)
    kind = opts["map"]
    if kind not in ("S", "DS", "HS", "f"):
        raise UsageError(f"unknown map {kind!r}")
    if not opts.get("points"):
        raise UsageError("--points FILE is required")
    raw = Path(opts["points"]).read_text().split()
    points = [parse_complex(s) for s in raw]
    norm = maps.normalize_maps(p) if opts["normalize"] == "standard" else None
    inverse = maps.SchwarzInverse(p, norm) if kind == "f" else None
    buf = io.StringIO()
    writer = csv.DictWriter(buf, ["x", "map", "value", "q_abs", "r", "error"], lineterminator="\n")
    writer.writeheader()
    failures = 0
    for x in points:
        try:
            row = _eval_row(p, norm, inverse, kind, x)
            row["error"] = ""
        except (FlatFrontError, ArithmeticError, ValueError) as exc:
            failures += 1
            row = {"x": mesh.format_complex(x), "value": "", "q_abs": "", "r": "",
                   "error": f"{type(exc).__name__}: {exc}"}
        row["map"] = kind
        writer.writerow(row)
    _emit(buf.getvalue(), opts.get("out"))
    if points and failures == len(points):
        print("error: every point failed", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def sweep_rows(c_lo: float, c_hi: float, steps: int, samples: int = 2000, tol: float = 1e-12):
    cs = np.linspace(c_lo, c_hi, steps)

    def one(c):
        p = HGParams(0.5, 0.5, float(c))
        info = classification(p, tol)
        rec = maps.winding_analysis(p, samples)
        return {"c": fmt(c), "D": fmt(info["D"]), "s": fmt(info["s"]), "t": fmt(info["t"]),
                "region": info["region"], "class": info["class"], "roots": " ".join(info["roots"]),
                "arc_angle": fmt(rec.arc_angle), "progression": fmt(rec.progression),
                "extra_turns": fmt(rec.extra_turns),
                "turning_points": " ".join(f"{v:.6f}" for v in rec.turning_points)}

    return figures.parallel_map(one, cs)


def cmd_sweep(args) -> int:
    opts = merged(args, {"c_range": [0.05, 0.95], "steps": 20, "samples": 2000, "tol": 1e-12})
    lo, hi = (parse_real(v) if isinstance(v, str) else float(v) for v in opts["c_range"])
    steps = int(opts["steps"])
    if not (0 < lo < hi < 1):
        raise UsageError("the c range must lie inside (0, 1)")
    if steps < 2:
        raise UsageError("--steps must be at least 2")
    rows = sweep_rows(lo, hi, steps, int(opts["samples"]), tolerance(opts))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _emit(buf.getvalue(), opts.get("out"))
    signs = [float(r["D"]) > 0 for r in rows]
    for k in range(len(rows) - 1):
        if signs[k] != signs[k + 1]:
            print(f"D changes sign between c = {rows[k]['c']} and c = {rows[k + 1]['c']}",
                  file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flatfront",
                                     description="Schwarz maps, derived Schwarz maps and flat fronts "
                                                 "of the hypergeometric equation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, params=True):
        sp.add_argument("--config", help="flat TOML file of option defaults")
        if params:
            sp.add_argument("--abc", nargs=3, metavar=("A", "B", "C"),
                            help="parameters; expressions such as 1-sqrt3/2 are accepted")
            sp.add_argument("--relaxed", action="store_true", default=None,
                            help="do not enforce |mu| < 1")
        sp.add_argument("--tol", type=float, help="classification tolerance (default 1e-12)")
        sp.add_argument("--out", help="output file or directory")

    sp = sub.add_parser("classify", help="discriminant, (s,t) region and ramification points")
    common(sp)
    sp.add_argument("--json", action="store_true", default=None)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("figure", help="write the data of one figure plus a manifest")
    common(sp, params=False)
    sp.add_argument("figure_id", choices=figures.FIGURES)
    sp.add_argument("--c", help="comma-separated c values for illst1/illst2")
    sp.add_argument("--t", help="comma-separated parallel distances for dihed2")
    sp.add_argument("--grid", help="domain resolution WxH (default 300x125)")
    sp.set_defaults(func=cmd_figure)

    sp = sub.add_parser("eval", help="evaluate S, DS, HS or f at points read from a file")
    common(sp)
    sp.add_argument("--map", choices=("S", "DS", "HS", "f"))
    sp.add_argument("--points", help="file with one complex literal per line")
    sp.add_argument("--normalize", choices=("standard", "none"),
                    help="standard: S(0)=0, S(1)=1, S(inf)=inf (default)")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("sweep", help="classification and winding along (1/2, 1/2, c)")
    common(sp, params=False)
    sp.add_argument("--c-range", nargs=2, metavar=("LO", "HI"), dest="c_range")
    sp.add_argument("--steps", type=int)
    sp.add_argument("--samples", type=int, help="samples on (0,1) for the winding analysis")
    sp.set_defaults(func=cmd_sweep)
    return parser


def _join_negative_values(argv):
    """Keep negative values away from argparse's option detection.

    ``--t -2,-1`` becomes ``--t=-2,-1``; after ``--abc`` and ``--c-range``
    a value such as ``-1/6`` becomes ``(-1/6)``.
    """
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--t", "--c", "--tol"):
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and not nxt.startswith("--"):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
        elif tok in ("--abc", "--c-range"):
            out.append(tok)
            for _ in range(3 if tok == "--abc" else 2):
                nxt = next(it, None)
                if nxt is None:
                    break
                if nxt.startswith("-") and len(nxt) > 1 and not nxt.startswith("--"):
                    nxt = f"({nxt})"
                out.append(nxt)
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, FlatFrontError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
