"""Command-line interface: ``aoif analyze | simulate | validate | optimize | repro``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 validation threshold exceeded, 4 simulated starvation, 5 reproduction mismatch.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .age_analysis import analyze_source, evaluate_grid
from .config import load_system
from .errors import ConfigError, DomainError, NumericalError, StarvationError
from .mfq import dump_generator_csv
from .optimizer import CostSpec, grid_search
from .repro import REPORTS
from .simulator import ks_distance, simulate

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_KS, EXIT_STARVED, EXIT_MISMATCH = 0, 1, 2, 3, 4, 5
DEFAULT_GRID_POINTS = 2000
GRID_SPAN = 12.0


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _sources(arg: str, N: int) -> list[int]:
    if arg == "all":
        return list(range(1, N + 1))
    try:
        n = int(arg)
    except ValueError:
        raise ConfigError("--source", f"expected a source index or 'all', got {arg!r}")
    if not 1 <= n <= N:
        raise ConfigError("--source", f"source index {n} out of range 1..{N}")
    return [n]


def _check_grid(args):
    if args.grid_points is not None and args.grid_points < 2:
        raise ConfigError("--grid-points", "invalid grid: need at least 2 points")
    if args.grid_max is not None and not args.grid_max > 0:
        raise ConfigError("--grid-max", "invalid grid: x_max must be positive")


def _grid_table(res, x_max, points):
    aoi = evaluate_grid(res.aoi, x_max, points)
    paoi = evaluate_grid(res.paoi, x_max, points)
    return np.column_stack([aoi[:, 0], aoi[:, 1], aoi[:, 2], paoi[:, 1], paoi[:, 2]])


def cmd_analyze(args) -> int:
    _check_grid(args)
    system = load_system(args.config)
    targets = _sources(args.source, system.N)
    if args.dump_generator and not args.out:
        raise ConfigError("--out", "--dump-generator needs an output directory")
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for n in targets:
        res = analyze_source(system, n, reduce=False if args.full else None)
        records.append(res.moments())
        if out_dir:
            x_max = args.grid_max or GRID_SPAN * res.paoi.moment(1)
            points = args.grid_points or DEFAULT_GRID_POINTS
            table = _grid_table(res, x_max, points)
            (out_dir / f"source{n}.csv").write_text(
                _csv(["x", "pdf_aoi", "cdf_aoi", "pdf_paoi", "cdf_paoi"], table))
            if args.dump_generator:
                (out_dir / f"generator_source{n}.csv").write_text(dump_generator_csv(res.spec))
    print(json.dumps({"sources": records}, indent=2))
    return EXIT_OK


def _sim_table(sim_src, x_max, points):
    xs = np.linspace(0.0, x_max, points)
    aoi = sim_src.aoi_cdf
    start, peak = np.sort(sim_src.cycle_start), np.sort(sim_src.cycle_peak)
    covering = np.searchsorted(start, xs, side="right") - np.searchsorted(peak, xs, side="right")
    pdf_aoi = covering / aoi.total
    cdf_paoi = sim_src.paoi_cdf(xs)
    pdf_paoi = np.gradient(cdf_paoi, xs)
    return np.column_stack([np.full(points, sim_src.source), xs, pdf_aoi, aoi(xs), pdf_paoi, cdf_paoi])


def _ci_dict(ci):
    return {"mean": ci.mean, "ci_low": ci.low, "ci_high": ci.high}


def cmd_simulate(args) -> int:
    system = load_system(args.config)
    sim = simulate(system, args.cycles, args.seed)
    summary = {"seed": args.seed, "horizon": sim.horizon, "events": sim.events, "sources": []}
    rows = []
    for src in sim.sources:
        summary["sources"].append({
            "source": src.source, "deliveries": src.deliveries,
            "mean_aoi": _ci_dict(src.mean_aoi), "mean_paoi": _ci_dict(src.mean_paoi),
        })
        if args.out:
            x_max = args.grid_max or GRID_SPAN * src.mean_paoi.mean
            rows.append(_sim_table(src, x_max, args.grid_points))
    if args.out:
        Path(args.out).write_text(
            _csv(["source", "x", "pdf_aoi", "cdf_aoi", "pdf_paoi", "cdf_paoi"], np.vstack(rows)))
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def validate_system(system, cycles: int, seed: int, points: int = 1000):
    """Per-source KS distances and mean deltas between simulation and analysis."""
    sim = simulate(system, cycles, seed)
    out = []
    for n in range(1, system.N + 1):
        res = analyze_source(system, n)
        src = sim[n]
        x_max = GRID_SPAN * res.paoi.moment(1)
        grid_aoi = evaluate_grid(res.aoi, x_max, points)
        grid_paoi = evaluate_grid(res.paoi, x_max, points)
        xs = grid_aoi[:, 0]
        ks_aoi = ks_distance(src.aoi_cdf, lambda x: grid_aoi[:, 2], xs)
        ks_paoi = ks_distance(src.paoi_cdf, lambda x: grid_paoi[:, 2], xs)
        out.append({
            "source": n,
            "ks_aoi": ks_aoi,
            "ks_paoi": ks_paoi,
            "mean_aoi": res.aoi.moment(1),
            "sim_mean_aoi": _ci_dict(src.mean_aoi),
            "delta_mean_aoi": src.mean_aoi.mean - res.aoi.moment(1),
            "mean_paoi": res.paoi.moment(1),
            "sim_mean_paoi": _ci_dict(src.mean_paoi),
            "delta_mean_paoi": src.mean_paoi.mean - res.paoi.moment(1),
        })
    return out


def cmd_validate(args) -> int:
    system = load_system(args.config)
    try:
        report = validate_system(system, args.cycles, args.seed)
    except StarvationError as exc:
        print(f"starvation: {exc}", file=sys.stderr)
        return EXIT_STARVED
    worst = max(max(r["ks_aoi"], r["ks_paoi"]) for r in report)
    ok = worst <= args.threshold
    summary = {"threshold": args.threshold, "cycles": args.cycles, "seed": args.seed,
               "pass": ok, "sources": report}
    if not ok:
        summary["hint"] = (f"KS distance {worst:.4f} exceeds {args.threshold}; "
                           "insufficient cycles? increase --cycles")
    print(json.dumps(summary, indent=2))
    return EXIT_OK if ok else EXIT_KS


def cmd_optimize(args) -> int:
    system = load_system(args.config)
    if system.N != 2:
        raise ConfigError("sources", f"optimize needs exactly two sources, got {system.N}")
    res = grid_search(system, CostSpec.two_source(args.alpha, args.metric), args.resolution)
    if args.out:
        Path(args.out).write_text(res.to_csv())
    print(f"P_d*={res.p_d:.2f} P21*={res.p21:.2f} P12*={res.p12:.2f} cost={res.cost!r}")
    return EXIT_OK


def cmd_repro(args) -> int:
    rep = REPORTS[args.table]()
    text = _csv(rep.header, rep.rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if rep.ok:
        print(f"{rep.name}: PASS ({len(rep.rows)} cells)")
        return EXIT_OK
    print(f"{rep.name}: FAIL ({len(rep.failures)} of {len(rep.rows)} cells)")
    for line in rep.failures:
        print(f"  {line}")
    return EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aoif", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="exact AoI / peak-AoI moments and distributions")
    a.add_argument("config")
    a.add_argument("--source", default="all", help="source index or 'all'")
    a.add_argument("--grid-max", type=float, default=None)
    a.add_argument("--grid-points", type=int, default=None)
    a.add_argument("--dump-generator", action="store_true", help="also write Q / Qtilde / R as CSV")
    a.add_argument("--full", action="store_true", help="never use the reduced two-source construction")
    a.add_argument("--out", help="directory for per-source CSV files")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="discrete-event simulation")
    s.add_argument("config")
    s.add_argument("--cycles", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--grid-max", type=float, default=None)
    s.add_argument("--grid-points", type=int, default=DEFAULT_GRID_POINTS)
    s.add_argument("--out", help="CSV file for empirical distributions")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("validate", help="compare analysis with simulation")
    v.add_argument("config")
    v.add_argument("--cycles", type=int, default=1_000_000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--threshold", type=float, default=0.01)
    v.set_defaults(func=cmd_validate)

    o = sub.add_parser("optimize", help="grid search over two-source preemption matrices")
    o.add_argument("config")
    o.add_argument("--alpha", type=float, default=1.0)
    o.add_argument("--resolution", type=float, default=0.05)
    o.add_argument("--metric", choices=("mean_aoi", "mean_paoi"), default="mean_aoi")
    o.add_argument("--out", help="CSV file for the full lattice")
    o.set_defaults(func=cmd_optimize)

    r = sub.add_parser("repro", help="regenerate a benchmark table")
    r.add_argument("table", choices=sorted(REPORTS))
    r.add_argument("--out", help="CSV file (default: stdout)")
    r.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StarvationError as exc:
        print(f"starvation: {exc}", file=sys.stderr)
        return EXIT_STARVED
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
