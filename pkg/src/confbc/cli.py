"""confbc command line.

Verbs:
  region   evaluate one bound's support envelope for a channel
  verify   run a named verification suite
  sweep    track a metric while one channel parameter varies
  fm       Fourier-Motzkin elimination on a JSON inequality system
  plot     draw a region boundary SVG from a support CSV

Exit codes: 0 ok / 1 failure (including failed verify) /
2 bound not applicable to this channel / 3 malformed channel or JSON /
4 parameter grid larger than the evaluation budget.

CONFBC_THREADS caps the worker threads the sweeps may use.
"""

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import __version__
from . import dm_bounds as dmb
from . import gaussian_bounds as gb
from .channels import load_channel
from .errors import (ChannelFormatError, ConfbcError, GridTooLargeError,
                     InapplicableBoundError)
from .regions import (RegionEnvelope, default_dirs_2d, default_dirs_3d,
                      envelope_boundary_2d, write_support_csv)
from .suites import run_suite, suite_names

_BOUNDS_2D = ("t4", "cutset-fig3", "t7", "t9")
_ALL_BOUNDS = ("outer", "inner1", "inner2", "t4", "t5", "t7", "t8",
               "t9", "t10", "df", "cutset-fig3")


# ---------------------------------------------------------------------------
# region evaluation
# ---------------------------------------------------------------------------

def _pick_dirs(bound, n, r2_slice):
    if bound in _BOUNDS_2D:
        return default_dirs_2d(n or 181), None
    dirs2 = None
    if r2_slice:
        dirs2 = default_dirs_2d(n or 181)
        return np.column_stack([dirs2, np.zeros(dirs2.shape[0])]), dirs2
    return default_dirs_3d(n or 512), None


def _region_envelope(ch, bound, grid, dirs, args):
    if ch.kind == "dm":
        if bound == "outer":
            return dmb.outer_envelope(ch, grid_step=grid or 0.25,
                                      u_card=args.u_card, v_card=args.v_card,
                                      directions=dirs)
        if bound == "inner1":
            return dmb.inner1_envelope(ch, grid_step=grid or 0.1,
                                       v_card=args.v_card, directions=dirs)
        if bound == "inner2":
            return dmb.inner2_envelope(ch, grid_step=grid or 0.1,
                                       v_card=args.v_card, directions=dirs)
        if bound == "t4":
            return dmb.theorem4_envelope(ch, grid_step=grid or 0.02,
                                         v_card=args.v_card, directions=dirs)
        if bound == "cutset-fig3":
            return dmb.theorem4_envelope(ch, grid_step=grid or 0.02,
                                         v_card=args.v_card, directions=dirs,
                                         include_joint_row=False)
        if bound == "t5":
            return dmb.theorem5_envelope(ch, grid_step=grid or 0.05,
                                         v_card=args.v_card, directions=dirs)
        raise InapplicableBoundError(
            "bound %r needs a gaussian channel" % bound)
    if bound == "outer":
        return gb.outer_envelope_g(ch, param_step=grid or 0.01, directions=dirs)
    if bound == "t7":
        return gb.capacity_t7_envelope(ch, beta_step=grid or 1e-3, directions=dirs)
    if bound == "t8":
        return gb.capacity_t8_envelope(ch, beta_step=grid or 1e-3, directions=dirs)
    if bound == "t9":
        return gb.approx_t9_envelope(ch, beta_step=grid or 1e-3, directions=dirs)
    if bound == "t10":
        return gb.approx_t10_envelope(ch, beta_step=grid or 1e-3, directions=dirs)
    if bound == "df":
        return gb.df_envelope(ch, beta_step=grid or 1e-2, directions=dirs)
    raise InapplicableBoundError("bound %r needs a discrete channel" % bound)


def _jsonable(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _cmd_region(args):
    ch = load_channel(args.channel)
    if args.r2 is not None and args.r2 != 0.0:
        raise InapplicableBoundError("only the R2 = 0 slice is supported")
    slicing = args.r2 is not None and args.bound not in _BOUNDS_2D
    dirs, dirs2 = _pick_dirs(args.bound, args.dirs, slicing)
    env = _region_envelope(ch, args.bound, args.grid, dirs, args)
    if slicing:
        env = RegionEnvelope(("R0", "R1"), dirs2, env.supports,
                             meta={**env.meta, "slice": "R2=0"})
    if args.out:
        write_support_csv(env, args.out)
    if args.svg:
        if len(env.variables) != 2:
            raise InapplicableBoundError(
                "SVG wants a 2-d region; pass --r2 0 to slice")
        _write_svg([(args.bound, envelope_boundary_2d(env))], args.svg,
                   xlab=env.variables[0], ylab=env.variables[1])
    if args.json:
        doc = {"bound": args.bound, "channel": ch.to_json_dict(),
               "variables": list(env.variables),
               "directions": env.directions.tolist(),
               "supports": [_jsonable(float(s)) for s in env.supports],
               "meta": {k: _jsonable(v) for k, v in env.meta.items()}}
        print(json.dumps(doc))
    elif not args.out and not args.svg:
        seen = set()
        for d, s in zip(env.directions, env.supports):
            if np.all(d == np.round(d)) and d.max() <= 2:   # canonical rows
                key = tuple(d)
                if key in seen:          # fans repeat the axis directions
                    continue
                seen.add(key)
                print("support %s = %.9g"
                      % ("+".join("%g*%s" % (w, v) for w, v
                                  in zip(d, env.variables) if w), s))
    return 0


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

def _cmd_verify(args):
    report = run_suite(args.suite, seed=args.seed)
    for line in report.summary_lines():
        print(line)
    print("suite %s: %s" % (report.suite, "PASS" if report.passed else "FAIL"))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report.to_json_dict(), fh, indent=1)
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# parameter sweeps
# ---------------------------------------------------------------------------

def _with_param(ch, name, value):
    doc = ch.to_json_dict()
    if ch.kind == "dm" and name in ("lambda", "power"):
        raise InapplicableBoundError(
            "discrete channels have no %r parameter to vary" % name)
    doc[name] = value
    return load_channel(doc)


def _sweep_metric(ch, args):
    if args.metric == "sumrate-gap":
        if ch.kind == "gaussian":
            d = np.array([(1.0, 1.0, 1.0)])
            outer = gb.outer_envelope_g(ch, param_step=args.grid or 0.01,
                                        directions=d)
            inner = gb.df_envelope(ch, beta_step=args.grid or 0.01,
                                   directions=d)
        else:
            d = np.array([(1.0, 1.0, 1.0)])
            outer = dmb.outer_envelope(ch, grid_step=args.grid or 0.25,
                                       directions=d)
            inner = dmb.inner1_envelope(ch, grid_step=args.grid or 0.1,
                                        directions=d)
        return float(outer.supports[0] - inner.supports[0])
    direction = np.array([float(t) for t in args.dir.split(",")])
    want = 2 if args.bound in _BOUNDS_2D else 3
    if direction.shape[0] != want:
        raise InapplicableBoundError(
            "bound %r expects a %d-component --dir" % (args.bound, want))
    env = _region_envelope(ch, args.bound, args.grid, direction[None, :], args)
    return float(env.supports[0])


def _cmd_sweep(args):
    base = load_channel(args.channel)
    values = np.linspace(args.start, args.stop, args.count)
    rows = []
    for v in values:
        ch = _with_param(base, args.vary, float(v))
        rows.append((float(v), _sweep_metric(ch, args)))
    header = (args.vary, args.metric.replace("-", "_") + "_bits")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for v, m in rows:
                w.writerow(["%.9g" % v, "%.9g" % m])
    for v, m in rows:
        print("%s=%.9g %s=%.9g" % (args.vary, v, header[1], m))
    return 0


# ---------------------------------------------------------------------------
# Fourier-Motzkin on JSON systems
# ---------------------------------------------------------------------------

def _cmd_fm(args):
    from .regions import LinearSystem, fm_eliminate
    with open(args.system) as fh:
        doc = json.load(fh)
    system = LinearSystem.from_json_dict(doc)
    names = [t for t in args.eliminate.split(",") if t]
    out = fm_eliminate(system, names, prune=not args.no_prune)
    text = json.dumps(out.to_json_dict(), indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


# ---------------------------------------------------------------------------
# plotting
# ---------------------------------------------------------------------------

def _read_support_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], rows[1:]
    if head[:2] == ["R0", "R1"]:                     # boundary file
        return np.array([[float(a), float(b)] for a, b in body])
    vals = np.array([[_parse_float(x) for x in r] for r in body])
    dirs, sup = vals[:, :3], vals[:, 3]
    if np.any(dirs[:, 2] != 0.0):
        raise InapplicableBoundError(
            "plot wants a 2-d region (dir2 must be 0); slice with --r2 0")
    env = RegionEnvelope(("R0", "R1"), dirs[:, :2], sup)
    return envelope_boundary_2d(env)


def _parse_float(tok):
    if tok == "inf":
        return math.inf
    if tok == "-inf":
        return -math.inf
    return float(tok)


def _cmd_plot(args):
    pts = _read_support_csv(args.infile)
    label = args.label or "region"
    _write_svg([(label, pts)], args.svg)
    return 0


_PALETTE = ("#c2410c", "#1d4ed8", "#15803d", "#7e22ce", "#be123c")


def _write_svg(curves, path, xlab="R0", ylab="R1"):
    """Minimal standalone SVG: axes plus one polyline per region."""
    w, h, m = 640.0, 480.0, 60.0
    xmax = ymax = 1e-9
    for _, pts in curves:
        if len(pts):
            xmax = max(xmax, float(pts[:, 0].max()))
            ymax = max(ymax, float(pts[:, 1].max()))
    xmax *= 1.08
    ymax *= 1.08

    def sx(x):
        return m + (x / xmax) * (w - 2 * m)

    def sy(y):
        return h - m - (y / ymax) * (h - 2 * m)

    out = ['<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 %g %g" '
           'font-family="sans-serif" font-size="12">' % (w, h),
           '<rect width="%g" height="%g" fill="white"/>' % (w, h),
           '<line x1="%g" y1="%g" x2="%g" y2="%g" stroke="black"/>'
           % (m, h - m, w - m, h - m),
           '<line x1="%g" y1="%g" x2="%g" y2="%g" stroke="black"/>'
           % (m, m, m, h - m),
           '<text x="%g" y="%g" text-anchor="middle">%s (bits)</text>'
           % (w / 2, h - m / 3, xlab),
           '<text x="%g" y="%g" text-anchor="middle" '
           'transform="rotate(-90 %g %g)">%s (bits)</text>'
           % (m / 3, h / 2, m / 3, h / 2, ylab),
           '<text x="%g" y="%g" text-anchor="middle">0</text>'
           % (m, h - m + 16),
           '<text x="%g" y="%g" text-anchor="middle">%.3g</text>'
           % (sx(xmax / 1.08), h - m + 16, xmax / 1.08),
           '<text x="%g" y="%g" text-anchor="end">%.3g</text>'
           % (m - 6, sy(ymax / 1.08) + 4, ymax / 1.08)]
    for i, (label, pts) in enumerate(curves):
        color = _PALETTE[i % len(_PALETTE)]
        if len(pts) == 0:
            continue
        coords = " ".join("%.2f,%.2f" % (sx(x), sy(y)) for x, y in pts)
        out.append('<polyline points="%s" fill="none" stroke="%s" '
                   'stroke-width="1.5"/>' % (coords, color))
        lx, ly = pts[len(pts) // 2]
        out.append('<text x="%g" y="%g" fill="%s">%s</text>'
                   % (sx(lx) + 6, sy(ly) - 6, color, label))
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _build_parser():
    p = argparse.ArgumentParser(
        prog="confbc",
        description="rate regions for two-receiver broadcast channels "
                    "with conferencing decoders")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True)

    r = sub.add_parser("region", help="evaluate a bound's support envelope")
    r.add_argument("--channel", required=True,
                   help="channel JSON file (or inline JSON)")
    r.add_argument("--bound", required=True, choices=_ALL_BOUNDS)
    r.add_argument("--grid", type=float, default=None,
                   help="parameter grid step (bound-specific default)")
    r.add_argument("--dirs", type=int, default=None,
                   help="number of swept support directions")
    r.add_argument("--r2", type=float, default=None,
                   help="slice a 3-d region at R2=0 (only 0 is accepted)")
    r.add_argument("--u-card", type=int, default=None)
    r.add_argument("--v-card", type=int, default=None)
    r.add_argument("--out", help="write dir/support CSV here")
    r.add_argument("--svg", help="write a boundary SVG here (2-d regions)")
    r.add_argument("--json", action="store_true",
                   help="print the envelope as JSON on stdout")
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(fn=_cmd_region)

    v = sub.add_parser("verify", help="run a named verification suite")
    v.add_argument("--suite", required=True, choices=suite_names())
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", help="also write the report as JSON here")
    v.set_defaults(fn=_cmd_verify)

    s = sub.add_parser("sweep", help="vary one parameter, track one metric")
    s.add_argument("--channel", required=True)
    s.add_argument("--vary", required=True,
                   choices=("lambda", "power", "c12", "c21"))
    s.add_argument("--start", type=float, required=True)
    s.add_argument("--stop", type=float, required=True)
    s.add_argument("--count", type=int, default=9)
    s.add_argument("--metric", required=True,
                   choices=("sumrate-gap", "dir-support"))
    s.add_argument("--bound", default="outer", choices=_ALL_BOUNDS)
    s.add_argument("--dir", default="1,1,1",
                   help="comma direction for dir-support")
    s.add_argument("--grid", type=float, default=None)
    s.add_argument("--u-card", type=int, default=None)
    s.add_argument("--v-card", type=int, default=None)
    s.add_argument("--out", help="write value/metric CSV here")
    s.set_defaults(fn=_cmd_sweep)

    f = sub.add_parser("fm", help="project a JSON inequality system")
    f.add_argument("--system", required=True, help="LinearSystem JSON file")
    f.add_argument("--eliminate", required=True,
                   help="comma-separated variable names to remove")
    f.add_argument("--no-prune", action="store_true")
    f.add_argument("--out", help="write the projected system here")
    f.set_defaults(fn=_cmd_fm)

    g = sub.add_parser("plot", help="support CSV -> boundary SVG")
    g.add_argument("--in", dest="infile", required=True)
    g.add_argument("--svg", required=True)
    g.add_argument("--label", default=None)
    g.set_defaults(fn=_cmd_plot)
    return p


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InapplicableBoundError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (ChannelFormatError, json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3
    except GridTooLargeError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 4
    except ConfbcError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
