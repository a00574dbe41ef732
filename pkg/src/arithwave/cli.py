"""Command-line interface: ``arithwave <subcommand> ...``.

Global flags go before the subcommand.  ``--config FILE`` reads flat
``key=value`` lines (``#`` comments allowed) whose keys mirror the long
flag names of the chosen subcommand; explicit flags win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__, kernels
from .chaos.draws import sample_draw
from .chaos.projections import fourth_chaos, second_chaos
from .chaos.statistics import chaos_statistics
from .correlations import DEFAULT_CAP, census_4
from .errors import ArithWaveError
from .experiments import CURATED_N, ExperimentConfig, run_campaign
from .field import synthesize, write_field
from .lattice import enumerate_frequencies, is_admissible, moment_report, scan_admissible
from .nodal import epsilon_band, nodal_volume

__all__ = ["main", "build_parser", "read_config"]


def read_config(path) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _emit(args, payload: dict | list, columns: list | None = None) -> str:
    """Render ``payload`` as JSON or CSV (rows of dicts with fixed ``columns``)."""
    if args.format == "csv":
        rows = payload if isinstance(payload, list) else [payload]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = columns or list(rows[0].keys())
        w.writerow(cols)
        for r in rows:
            w.writerow([r.get(c, "") for c in cols])
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def cmd_lattice(args):
    freq = enumerate_frequencies(args.n, args.dim)
    payload = {"n": args.n, "d": args.dim, "multiplicity": freq.N,
               "admissible": is_admissible(args.n)}
    if args.points:
        payload["points"] = freq.points.tolist()
    if args.moments and freq.N:
        rep = moment_report(freq)
        payload["moments"] = {
            "quadratic": [[int(v) for v in row] for row in rep.quadratic],
            "quartic_axis": rep.quartic_axis.tolist(),
            "quartic_cross": {f"{j}{k}": v for (j, k), v in rep.quartic_cross.items()},
        }
        if rep.fourier4 is not None:
            payload["moments"]["fourier4"] = rep.fourier4.real
    if args.format == "csv":
        flat = {k: v for k, v in payload.items() if k in ("n", "d", "multiplicity", "admissible")}
        return _emit(args, flat, ["n", "d", "multiplicity", "admissible"])
    return _emit(args, payload)


def cmd_correlations(args):
    freq = enumerate_frequencies(args.n, args.dim)
    c = census_4(freq, cap=args.cap, list_cap=args.list_x4)
    row = {"n": c.n, "d": c.d, "N": c.N, "total_c4": c.total_c4,
           "pairing_a": c.pairing_counts[0], "pairing_b": c.pairing_counts[1],
           "pairing_c": c.pairing_counts[2], "overlap_ab": c.diagonal_counts[0],
           "overlap_ac": c.diagonal_counts[1], "overlap_bc": c.diagonal_counts[2],
           "nondegenerate_x4": c.nondegenerate_x4, "exponent_estimate": c.exponent_estimate}
    if args.list_x4 and args.format != "csv":
        pts = freq.points
        row["x4_tuples"] = [[pts[i].tolist() for i in t] for t in c.x4_tuples]
        row["truncated"] = c.truncated
    return _emit(args, row)


def cmd_chaos(args):
    freq = enumerate_frequencies(args.n, args.dim)
    draw = sample_draw(freq, args.seed)
    out = {"n": args.n, "d": args.dim, "seed": args.seed}
    show_all = not (args.stats or args.fourth or args.second)
    if args.stats or show_all:
        out["statistics"] = chaos_statistics(draw).as_dict()
    if args.fourth or show_all:
        out["fourth_chaos"] = fourth_chaos(chaos_statistics(draw))
    if args.second or show_all:
        out["second_chaos"] = second_chaos(draw)
    if args.format == "csv":
        return _emit(args, {k: out[k] for k in out if k != "statistics"})
    return _emit(args, out)


def cmd_field(args):
    freq = enumerate_frequencies(args.n, args.dim)
    grid = synthesize(sample_draw(freq, args.seed), args.grid, workers=args.threads)
    target = args.file or args.out
    if not target:
        raise ArithWaveError("field needs an output file (--file or global --out)")
    write_field(target, grid)
    sys.stderr.write(f"wrote {grid.G}^{grid.d} float64 values to {target}\n")
    return target


def cmd_nodal(args):
    freq = enumerate_frequencies(args.n, args.dim)
    grid = synthesize(sample_draw(freq, args.seed), args.grid, workers=args.threads)
    if args.method == "band":
        est = epsilon_band(grid, args.epsilon)
    else:
        est = nodal_volume(grid)
    row = {"n": args.n, "d": args.dim, "seed": args.seed, "method": est.method, "G": est.G,
           "epsilon": est.epsilon if est.epsilon is not None else "", "value": est.value}
    return _emit(args, row, ["n", "d", "seed", "method", "G", "epsilon", "value"])


def cmd_campaign(args):
    cfg = ExperimentConfig(n=args.n, d=args.dim, replicas=args.replicas, base_seed=args.seed,
                           grid=args.grid, pipeline=args.pipeline, output=None,
                           threads=args.threads)
    rec = run_campaign(cfg)
    text = rec.to_csv() if args.format == "csv" else rec.to_json() + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def cmd_scan(args):
    rows = [{"n": n, "d": args.dim, "N": N}
            for n, N in scan_admissible(args.min, args.max, args.min_multiplicity, args.dim)]
    if args.curated:
        rows = [{"n": n, "d": args.dim, "N": N} for n, N in CURATED_N[args.dim]]
    cols = ["n", "d", "N"]
    if args.x4:
        # share of non-degenerate 4-correlations; small values converge faster
        for r in rows:
            c = census_4(enumerate_frequencies(r["n"], args.dim), cap=args.cap)
            r["x4_ratio"] = c.nondegenerate_x4 / r["N"] ** 2
        rows.sort(key=lambda r: r["x4_ratio"])
        cols.append("x4_ratio")
    return _emit(args, rows, cols)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arithwave", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version",
                   version=f"%(prog)s {__version__} (kernels: {kernels.BACKEND})")
    p.add_argument("--threads", type=int, default=1, help="worker threads")
    p.add_argument("--out", default=None, help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--config", default=None, help="key=value file with subcommand defaults")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=False, grid=False):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--dim", type=int, choices=(2, 3), default=3)
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        if grid:
            sp.add_argument("--grid", type=int, required=True)
        sp.add_argument("--json", dest="format", action="store_const", const="json",
                        default=argparse.SUPPRESS)
        sp.add_argument("--csv", dest="format", action="store_const", const="csv",
                        default=argparse.SUPPRESS)

    sp = sub.add_parser("lattice", help="enumerate a frequency set")
    common(sp)
    sp.add_argument("--moments", action="store_true")
    sp.add_argument("--points", action="store_true")
    sp.set_defaults(func=cmd_lattice)

    sp = sub.add_parser("correlations", help="census of 4-correlations")
    common(sp)
    sp.add_argument("--list-x4", type=int, default=0, metavar="CAP")
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest N accepted")
    sp.set_defaults(func=cmd_correlations)

    sp = sub.add_parser("chaos", help="chaos statistics of one draw")
    common(sp, seed=True)
    sp.add_argument("--stats", action="store_true")
    sp.add_argument("--fourth", action="store_true")
    sp.add_argument("--second", action="store_true")
    sp.set_defaults(func=cmd_chaos)

    sp = sub.add_parser("field", help="synthesize a field and dump it")
    common(sp, seed=True, grid=True)
    sp.add_argument("--file", default=None, help="output file (defaults to the global --out)")
    sp.set_defaults(func=cmd_field)

    sp = sub.add_parser("nodal", help="nodal volume of one draw")
    common(sp, seed=True, grid=True)
    sp.add_argument("--method", choices=("band", "surface"), default="surface")
    sp.add_argument("--epsilon", type=float, default=0.05)
    sp.set_defaults(func=cmd_nodal)

    sp = sub.add_parser("campaign", help="Monte Carlo campaign")
    common(sp, seed=True)
    sp.add_argument("--grid", type=int, default=None)
    sp.add_argument("--replicas", type=int, default=100)
    sp.add_argument("--pipeline", choices=("algebraic", "geometric", "both"), default="algebraic")
    sp.set_defaults(func=cmd_campaign)

    sp = sub.add_parser("scan-n", help="admissible n with large multiplicity")
    sp.add_argument("--min", type=int, default=1)
    sp.add_argument("--max", type=int, default=1000)
    sp.add_argument("--min-multiplicity", type=int, default=1)
    sp.add_argument("--dim", type=int, choices=(2, 3), default=3)
    sp.add_argument("--curated", action="store_true", help="print the shipped list instead")
    sp.add_argument("--x4", action="store_true",
                    help="add |X_n(4)|/N^2 and sort by it (runs the census)")
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest N for --x4")
    sp.set_defaults(func=cmd_scan)
    return p


def _apply_config(parser, argv):
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return
    values = read_config(path)
    choices = parser._subparsers._group_actions[0].choices
    command = next((tok for tok in argv if tok in choices), None)
    if command is None:
        return
    sub = choices[command]
    known = {a.dest for a in sub._actions}
    top = {a.dest for a in parser._actions}
    sub.set_defaults(**{k: v for k, v in values.items() if k in known})
    parser.set_defaults(**{k: v for k, v in values.items() if k in top and k not in known})
    # config values satisfy required flags
    for a in sub._actions:
        if a.dest in values:
            a.required = False


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if isinstance(args.threads, str):
            args.threads = int(args.threads)
        args.func(args)
    except (ArithWaveError, ValueError, OSError) as exc:
        sys.stderr.write(f"arithwave: error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
