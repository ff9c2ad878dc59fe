"""Command-line surface for the library.

Four subcommands: ``classify`` labels one parameter point, ``atlas``
sweeps a window of the parameter cube into CSV (and optionally an SVG
map), ``check`` runs the full verdict table on a named or file-loaded
weight diagram, and ``sqrt2`` exposes the closed-form 2x2 PSD square
root.

Exit codes: 0 success (including FAIL rows in a verdict table), 2 domain
error (invalid parameters, non-commuting or malformed diagrams, missing
cap for formula tails), 3 numerical verdict error (square root of a
non-PSD matrix, internal formula cross-check failures), 4 I/O error.

The environment variable SHIFT2D_TOL overrides the relative PSD
acceptance band for the invocation; it is read once here and threaded
through as an explicit tolerance (library code never reads it).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .axy_region import (
    DEFAULT_WINDOW,
    LABEL_CODES,
    LABELS,
    OUT_OF_CLASS,
    AxyPoint,
    FormulaMismatch,
    InconsistentLattice,
    classify,
    classify_grid,
    hypo_bound_y,
    sub_bound_y,
    weakhypo_bound_y,
)
from .blockdecomp import NoStabilization, effective_cap
from .hypo_tests import (
    CapTooSmall,
    entries_commute_test,
    k_hypo_up_to,
    l_positivity_test,
    quasinormal_test,
    semi_hypo_test,
    six_point_test,
    weak_hypo_test,
)
from .mat2 import DEFAULT_TOL, NotPsd, PsdTolerance, Sym2, sqrt_psd
from .shift_model import (
    EmbeddingSpec,
    NonCommuting,
    NonPositiveWeight,
    OutOfClass,
    SchemaError,
    build_axy,
    build_drury_arveson,
    build_embedding,
    build_ex215,
    build_ex216,
    build_helton_howe,
    load_weights,
    validate,
)

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_VERDICT = 3
EXIT_IO = 4

CSV_HEADER = ("a,x,y,label,margin_sub,margin_hypo,margin_sh,margin_wh,"
              "boundary,method")

#: flag tuples (subnormal, hyponormal, semi, weak) implied by each label
VERDICTS_BY_LABEL = {
    "SUBNORMAL": (True, True, True, True),
    "HYPO_NOT_SUB": (False, True, True, True),
    "SH_AND_WH_NOT_H": (False, False, True, True),
    "SH_NOT_WH": (False, False, True, False),
    "WH_NOT_SH": (False, False, False, True),
    "NEITHER": (False, False, False, False),
}

LABEL_COLORS = {
    "SUBNORMAL": "#2166ac",
    "HYPO_NOT_SUB": "#67a9cf",
    "SH_AND_WH_NOT_H": "#1b9e77",
    "SH_NOT_WH": "#ffd92f",
    "WH_NOT_SH": "#ef8a62",
    "NEITHER": "#b2182b",
}
OUT_COLOR = "#dddddd"


def _g(v: float) -> str:
    return "%.17g" % v


def _w(v) -> str:
    """Compact witness-value formatting for the table view."""
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return "%.6g" % v
    if isinstance(v, tuple):
        return "(" + ", ".join(_w(x) for x in v) + ")"
    return str(v)


def _jsonable(v):
    if isinstance(v, (bool, int, float, str)) or v is None:
        return v
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, Sym2):
        return [v.a11, v.a12, v.a22]
    if isinstance(v, np.generic):
        return v.item()
    return str(v)


# ------------------------------------------------------------ classify

def cmd_classify(args, tol: PsdTolerance) -> int:
    p = AxyPoint(args.a, args.x, args.y)
    res = classify(p, method=args.method, tol=tol)
    verdicts = dict(zip(("subnormal", "hyponormal", "semi-hyponormal",
                         "weakly-hyponormal"), VERDICTS_BY_LABEL[res.label]))
    if args.json:
        payload = {
            "a": p.a, "x": p.x, "y": p.y,
            "label": res.label,
            "boundary": res.boundary,
            "method": res.method,
            "verdicts": verdicts,
            "margins": res.margins,
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK
    print(f"point: a={_g(p.a)} x={_g(p.x)} y={_g(p.y)}")
    print(f"label: {res.label}")
    print(f"boundary: {'yes' if res.boundary else 'no'}")
    print(f"method: {res.method}")
    for (name, ok), key in zip(verdicts.items(), ("sub", "hypo", "sh", "wh")):
        print(f"{name:<18} {'PASS' if ok else 'FAIL':<5} "
              f"margin={_g(res.margins[key])}")
    return EXIT_OK


# --------------------------------------------------------------- atlas

@dataclass(frozen=True)
class AtlasRow:
    """One grid sample of the parameter sweep."""

    a: float
    x: float
    y: float
    label: str
    margins: tuple  # (sub, hypo, sh, wh)
    boundary: bool
    method: str

    def csv_line(self) -> str:
        return ",".join((
            _g(self.a), _g(self.x), _g(self.y), self.label,
            *(_g(m) for m in self.margins),
            "1" if self.boundary else "0",
            self.method,
        ))


def _cell_centers(lo: float, hi: float, n: int) -> np.ndarray:
    return lo + (np.arange(n) + 0.5) * (hi - lo) / n


def _direct_codes(a: float, xs: np.ndarray, ys: np.ndarray,
                  in_class: np.ndarray, tol: PsdTolerance) -> np.ndarray:
    """Label codes by the block tests, via a worker pool; results are
    buffered into the row-major array, so output order never depends on
    completion order."""
    codes = np.full((len(xs), len(ys)), OUT_OF_CLASS, dtype=int)
    cells = [(i, j) for i in range(len(xs)) for j in range(len(ys))
             if in_class[i, j]]

    def work(cell):
        i, j = cell
        p = AxyPoint(a, float(xs[i]), float(ys[j]))
        return i, j, LABEL_CODES[classify(p, method="direct", tol=tol).label]

    with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 1)) as pool:
        for i, j, code in pool.map(work, cells, chunksize=64):
            codes[i, j] = code
    return codes


def _sh_margin_scalar(a: float, x: float, y: float) -> float:
    q = x * x + y * y
    u = q * (x - a * a * y) / x
    if u < 0.0:
        return math.nan
    d11 = math.sqrt(u) - (x - y) ** 2 / 2.0
    d22 = math.sqrt(q * (x + a * a * y) / x) - (x + y) ** 2 / 2.0
    d12 = (x * x - y * y) / 2.0
    return 0.5 * (d11 + d22) - math.hypot(0.5 * (d11 - d22), d12)


def _sh_contour(a: float, x: float, ymin: float, ymax: float) -> float:
    """y where the semi-hyponormality margin changes sign in the column,
    found by bisection; NaN when the column has no sign change."""
    ys = np.linspace(ymin, ymax, 65)
    vals = [_sh_margin_scalar(a, x, float(t)) if a * t < x else math.nan
            for t in ys]
    for i in range(len(ys) - 1):
        v0, v1 = vals[i], vals[i + 1]
        if math.isnan(v0) or math.isnan(v1) or (v0 >= 0) == (v1 >= 0):
            continue
        lo, hi = float(ys[i]), float(ys[i + 1])
        flo = v0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            fm = _sh_margin_scalar(a, x, mid)
            if (fm >= 0) == (flo >= 0):
                lo, flo = mid, fm
            else:
                hi = mid
        return 0.5 * (lo + hi)
    return math.nan


def _render_svg(path: str, a: float, xs: np.ndarray, ys: np.ndarray,
                codes: np.ndarray, window: tuple, method: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.colors import ListedColormap
    from matplotlib.lines import Line2D
    from matplotlib.patches import Patch

    plt.rcParams["svg.hashsalt"] = "shift2d"
    xmin, xmax, ymin, ymax = window
    colors = [OUT_COLOR] + [LABEL_COLORS[name] for name in LABELS]
    cmap = ListedColormap(colors)

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    ax.imshow(codes.T + 1, origin="lower", interpolation="nearest",
              aspect="auto", extent=(xmin, xmax, ymin, ymax),
              cmap=cmap, vmin=-0.5, vmax=len(colors) - 0.5)

    xline = np.linspace(xmin, xmax, 513)

    def clipped(vals):
        arr = np.array(vals, dtype=float)
        arr[(arr < ymin) | (arr > ymax)] = np.nan
        return arr

    curves = [
        ("hyponormality bound", [hypo_bound_y(a, float(t)) for t in xline],
         "black", "-"),
        ("subnormality bound", [sub_bound_y(a, float(t)) for t in xline],
         "black", "--"),
        ("semi-hyponormality contour",
         [_sh_contour(a, float(t), ymin, ymax) for t in xline],
         "black", "-."),
        ("weak-hyponormality bound",
         [weakhypo_bound_y(a, float(t)) for t in xline],
         "black", ":"),
    ]
    for name, vals, color, style in curves:
        ax.plot(xline, clipped(vals), color=color, linestyle=style,
                linewidth=1.2, label=name)

    present = {int(c) for c in np.unique(codes) if int(c) != OUT_OF_CLASS}
    patches = [Patch(facecolor=LABEL_COLORS[LABELS[c]], label=LABELS[c])
               for c in sorted(present)]
    lines = [Line2D([], [], color=c, linestyle=s, label=n)
             for n, _, c, s in curves]
    ax.legend(handles=patches + lines, loc="center left",
              bbox_to_anchor=(1.02, 0.5), fontsize=8, frameon=False)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"region atlas at a = {_g(a)} ({method})")
    fig.savefig(path, format="svg", bbox_inches="tight",
                metadata={"Date": None})
    plt.close(fig)


def cmd_atlas(args, tol: PsdTolerance) -> int:
    window = (args.xmin, args.xmax, args.ymin, args.ymax)
    for v in window:
        if not (math.isfinite(v) and 0.0 <= v <= 1.0):
            raise OutOfClass(f"window coordinates must lie in [0, 1], got {v}")
    if not (args.xmin < args.xmax and args.ymin < args.ymax):
        raise OutOfClass(f"window must be non-degenerate, got {window}")
    if args.nx < 2 or args.ny < 2:
        raise OutOfClass(f"grid sizes must be >= 2, got {args.nx}x{args.ny}")

    xs = _cell_centers(args.xmin, args.xmax, args.nx)
    ys = _cell_centers(args.ymin, args.ymax, args.ny)
    grid = classify_grid(args.a, xs, ys)
    codes = grid["codes"]
    if args.method == "direct":
        codes = _direct_codes(args.a, xs, ys, grid["in_class"], tol)

    rows = []
    for i in range(args.nx):
        for j in range(args.ny):
            code = int(codes[i, j])
            label = "OUT" if code == OUT_OF_CLASS else LABELS[code]
            margins = tuple(float(grid[k][i, j])
                            for k in ("sub", "hypo", "sh", "wh"))
            boundary = bool(grid["boundary"][i, j])
            rows.append(AtlasRow(args.a, float(xs[i]), float(ys[j]), label,
                                 margins, boundary, args.method))

    text = CSV_HEADER + "\n" + "\n".join(r.csv_line() for r in rows) + "\n"
    with open(args.out, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)
    print(f"wrote {len(rows)} rows to {args.out}")

    if args.svg:
        _render_svg(args.svg, args.a, xs, ys, codes, window, args.method)
        print(f"wrote region map to {args.svg}")
    return EXIT_OK


# --------------------------------------------------------------- check

def _named_diagram(name: str):
    if name == "drury-arveson":
        return build_drury_arveson()
    if name == "helton-howe":
        return build_helton_howe()
    kind, _, rest = name.partition(":")
    if kind in ("ex215", "ex216", "axy"):
        want = 3 if kind == "axy" else 2
        try:
            params = [float(t) for t in rest.split(",")]
        except ValueError as exc:
            raise SchemaError(f"bad parameters in {name!r}: {exc}") from exc
        if len(params) != want:
            raise SchemaError(
                f"{kind} takes {want} comma-separated parameters, got {rest!r}"
            )
        builder = {"ex215": build_ex215, "ex216": build_ex216,
                   "axy": build_axy}[kind]
        return builder(*params)
    if kind == "embed":
        if not rest:
            raise SchemaError("embed needs a file path: embed:FILE")
        with open(rest, "r", encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaError(
                    f"embedding file is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict) or "omega" not in raw or "eta" not in raw:
            raise SchemaError(
                "embedding file must be an object with 'omega' and 'eta'")
        for key in ("omega", "eta"):
            if not isinstance(raw[key], list) or not raw[key]:
                raise SchemaError(f"embedding {key!r} must be a non-empty list")
        return build_embedding(EmbeddingSpec(tuple(raw["omega"]),
                                             tuple(raw["eta"])))
    raise SchemaError(
        f"unknown diagram name {name!r}; expected drury-arveson, "
        "helton-howe, ex215:a,b, ex216:a,b, axy:a,x,y, or embed:FILE"
    )


def cmd_check(args, tol: PsdTolerance) -> int:
    d = load_weights(args.weights) if args.weights else _named_diagram(args.named)
    cap_eff = effective_cap(d, args.ncap)  # NoStabilization without --ncap

    rows = []

    rep = validate(d)
    rows.append(("validate", "pass" if rep.ok else "fail",
                 {"points_checked": rep.points_checked, "worst": rep.worst}))

    lp = l_positivity_test(d, args.ncap, tol)
    rows.append(("L-positive", lp.verdict, lp.witness))

    sp = six_point_test(d, args.ncap, tol)
    rows.append(("hyponormal-6pt", sp.verdict, sp.witness))

    kh = k_hypo_up_to(d, args.kmax, args.ncap, tol)
    if kh["first_fail"] is not None:
        kv = "fail"
        kw = {"first_fail": kh["first_fail"], **(kh["report"].witness or {})}
    else:
        verdicts = {v for _, v in kh["verdicts"]}
        kv = "pass" if verdicts == {"pass"} else "inconclusive"
        kw = {"orders_checked": len(kh["verdicts"])}
    rows.append((f"k-hypo<={args.kmax}", kv, kw))

    sh = semi_hypo_test(d, args.ncap, tol)
    rows.append(("semi-hypo", sh.verdict, sh.witness))

    wh = weak_hypo_test(d, args.ncap, tol=tol)
    rows.append(("weak-hypo", wh.verdict, wh.witness))

    qn = quasinormal_test(d)
    rows.append(("quasinormal", qn.verdict, qn.witness))

    ec = entries_commute_test(d, args.ncap)
    rows.append(("entries-commute", "pass" if all(ec.values()) else "fail", ec))

    if args.json:
        payload = {
            "name": d.name,
            "tail": d.tail,
            "cap": cap_eff,
            "rows": [{"test": t, "verdict": v, "witness": _jsonable(w)}
                     for t, v, w in rows],
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK

    title = d.name or "weight diagram"
    print(f"diagram: {title} (tail {d.tail}, cap {cap_eff})")
    print(f"{'test':<16} {'verdict':<13} witness")
    for t, v, w in rows:
        shown = {"pass": "PASS", "fail": "FAIL",
                 "inconclusive": "INCONCLUSIVE"}[v]
        detail = "-" if not w else " ".join(f"{k}={_w(x)}" for k, x in w.items())
        print(f"{t:<16} {shown:<13} {detail}")
    return EXIT_OK


# --------------------------------------------------------------- sqrt2

def cmd_sqrt2(args, tol: PsdTolerance) -> int:
    m = Sym2(*args.m)
    s = sqrt_psd(m, tol)  # NotPsd propagates as exit 3
    print(f"sqrt: [[{_g(s.a11)}, {_g(s.a12)}], [{_g(s.a12)}, {_g(s.a22)}]]")
    print(f"tr={_g(s.tr)} det={_g(s.det)} lambda_min={_g(s.eig_min())}")
    return EXIT_OK


# ---------------------------------------------------------------- main

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shift2d",
        description=("classify and map positivity properties of commuting "
                     "2-variable weighted shifts"),
    )
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="label one parameter point")
    c.add_argument("--a", type=float, required=True)
    c.add_argument("--x", type=float, required=True)
    c.add_argument("--y", type=float, required=True)
    c.add_argument("--method", choices=("closed-form", "direct"),
                   default="closed-form")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_classify)

    xmin, xmax, ymin, ymax = DEFAULT_WINDOW
    t = sub.add_parser("atlas", help="sweep a parameter window to CSV/SVG")
    t.add_argument("--a", type=float, default=0.5)
    t.add_argument("--xmin", type=float, default=xmin)
    t.add_argument("--xmax", type=float, default=xmax)
    t.add_argument("--ymin", type=float, default=ymin)
    t.add_argument("--ymax", type=float, default=ymax)
    t.add_argument("--nx", type=int, default=200)
    t.add_argument("--ny", type=int, default=200)
    t.add_argument("--out", required=True, help="CSV output path")
    t.add_argument("--svg", help="optional SVG region-map path")
    t.add_argument("--method", choices=("closed-form", "direct"),
                   default="closed-form")
    t.set_defaults(func=cmd_atlas)

    k = sub.add_parser("check", help="verdict table for a weight diagram")
    src = k.add_mutually_exclusive_group(required=True)
    src.add_argument("--weights", help="JSON weight-diagram file")
    src.add_argument("--named",
                     help="drury-arveson | helton-howe | ex215:a,b | "
                          "ex216:a,b | axy:a,x,y | embed:FILE")
    k.add_argument("--kmax", type=int, default=5)
    k.add_argument("--ncap", type=int, default=None,
                   help="level cap (required for formula tails)")
    k.add_argument("--json", action="store_true")
    k.set_defaults(func=cmd_check)

    q = sub.add_parser("sqrt2", help="closed-form 2x2 PSD square root")
    q.add_argument("--m", type=float, nargs=3, required=True,
                   metavar=("A11", "A12", "A22"))
    q.set_defaults(func=cmd_sqrt2)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    raw = os.environ.get("SHIFT2D_TOL")
    if raw is None or raw == "":
        tol = DEFAULT_TOL
    else:
        try:
            tol = PsdTolerance(rel=float(raw))
        except ValueError:
            print(f"error: SHIFT2D_TOL must be a finite nonnegative real, "
                  f"got {raw!r}", file=sys.stderr)
            return EXIT_DOMAIN

    try:
        return args.func(args, tol)
    except (NotPsd, FormulaMismatch, InconsistentLattice) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    except (OutOfClass, NonCommuting, NonPositiveWeight, SchemaError,
            NoStabilization, CapTooSmall) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
