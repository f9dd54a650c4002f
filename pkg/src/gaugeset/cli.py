"""Command-line front end.

    gaugeset integrate --config run.toml --out results/
    gaugeset demo e_over_t --seed 3 --out results/
    gaugeset partition --config part.toml --out results/
    gaugeset check --seed 0 --out results/

The config file schema is documented in :mod:`gaugeset.config`.

Files written to ``--out``:

* integrate: ``result.json`` and ``table.csv`` with columns
  iter, gauge, n_intervals, succ_diff, err_bound.  For step integrands a
  last row ``oracle`` holds the distance to the exact integral in succ_diff
  and its grid error in err_bound.
* demo: ``<id>.txt``, ``<id>.csv`` (one summary row) and ``<id>_rows.csv``.
* partition: ``partition.csv`` with columns a, b, tag.
* check: ``checks.csv`` with columns check, pass, worst, detail.

Exit codes: 0 success or convergence, 2 NonConvergent, 1 error or a failed
demo/check.  CSV files carry no timestamps, so identical config and seed
give identical bytes.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .checks import CheckResult, run_checks
from .config import ConfigError, RunConfig, base_function, build_gauge, build_schedule, load_toml, parse_config, target_of
from .convex_geometry import make_grid
from .demos import DEMOS, DemoReport
from .functions import StepVectorFunction
from .integrators import (
    IntegralResult,
    adversarial_retag,
    birkhoff_integrate,
    henstock_integrate,
    mcshane_integrate,
    oracle_distance,
)
from .partitions import DEFAULT_MAX_DEPTH, DepthExceeded, PartitionTooLarge, cousin_partition, uniform_partition

log = logging.getLogger("gaugeset")

EXIT_OK, EXIT_ERROR, EXIT_NONCONVERGENT = 0, 1, 2
INTEGRATORS = {"mcshane": mcshane_integrate, "henstock": henstock_integrate, "birkhoff": birkhoff_integrate}
RANDOMIZED = ("check", "demo:e_over_t", "demo:set_roundtrip")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _write(out: Path, name: str, text: str) -> Path:
    path = out / name
    path.write_text(text)
    log.info("wrote %s", path)
    return path


def _fmt(x: float) -> str:
    return f"{x:.17g}"


# ---------------------------------------------------------------- commands

def run_integrate(cfg: RunConfig, out: Path) -> int:
    target = target_of(cfg)
    schedule = build_schedule(cfg.gauge, cfg.kind)
    kw = dict(min_iterations=cfg.min_iterations, max_intervals=cfg.max_intervals)
    if cfg.mode == "set" and cfg.grid_directions is not None:
        kw["grid"] = make_grid(target.dim, cfg.grid_directions)
    if cfg.retag == "adversarial_positive":
        kw["retag"] = adversarial_retag(base_function(target))
    result: IntegralResult = INTEGRATORS[cfg.kind](target, cfg.tol, schedule, **kw)
    record = result.record()
    table = result.table_csv()
    g = base_function(target)
    if isinstance(g, StepVectorFunction):
        dist, err = oracle_distance(result, g)
        record["oracle_distance"] = dist
        record["oracle_err_bound"] = err
        table += _csv_text(None, [["oracle", "exact", result.iterations[-1].n_intervals, _fmt(dist), _fmt(err)]])
    record["config"] = dict(source=cfg.source, integrand=cfg.integrand, tol=cfg.tol, gauge=cfg.gauge)
    _write(out, "table.csv", table)
    _write(out, "result.json", json.dumps(record, indent=2, sort_keys=True) + "\n")
    print(f"{result.kind}/{result.mode}: {result.status} after {len(result.iterations)} iterations, "
          f"error estimate {result.error_estimate:.3g}" + (f" ({result.note})" if result.note else ""))
    return EXIT_OK if result.converged else EXIT_NONCONVERGENT


def _demo_kwargs(demo_id: str, cfg: RunConfig, seed: int) -> dict:
    opts = dict(cfg.demo)
    if demo_id == "orthonormal_H":
        n = int(opts.pop("n", 100))
        intervals = int(opts.pop("intervals", 10 * n))
        return dict(n=n, partition=uniform_partition(intervals, str(opts.pop("tag_rule", "mid"))), **opts)
    if demo_id in ("e_over_t", "set_roundtrip"):
        opts["seed"] = seed
    return opts


def run_demo(demo_id: str, cfg: RunConfig, seed: int, out: Path) -> int:
    if demo_id not in DEMOS:
        raise ConfigError("demo", f"unknown demo {demo_id!r}; choose from {', '.join(DEMOS)}")
    try:
        report: DemoReport = DEMOS[demo_id](**_demo_kwargs(demo_id, cfg, seed))
    except TypeError as exc:
        raise ConfigError("demo", str(exc)) from exc
    _write(out, f"{demo_id}.txt", report.text() + "\n")
    _write(out, f"{demo_id}.csv", _csv_text(DemoReport.CSV_COLUMNS, [report.csv_row()]))
    if report.rows:
        _write(out, f"{demo_id}_rows.csv", report.rows_csv())
    print(report.text())
    return EXIT_OK if report.passed else EXIT_ERROR


def run_partition(cfg: RunConfig, out: Path) -> int:
    gauge = build_gauge(cfg.partition["gauge"], "partition.gauge")
    perron = bool(cfg.partition.get("perron", True))
    max_depth = int(cfg.partition.get("max_depth", DEFAULT_MAX_DEPTH))
    p = cousin_partition(gauge, perron=perron, max_depth=max_depth)
    rows = [[_fmt(a), _fmt(b), _fmt(t)] for a, b, t in p.to_rows()]
    _write(out, "partition.csv", _csv_text(("a", "b", "tag"), rows))
    print(f"{len(p)} intervals, mesh {p.mesh:.6g}, gauge {gauge.describe()}")
    return EXIT_OK


def run_check(seed: int, out: Path) -> int:
    results = run_checks(seed)
    _write(out, "checks.csv", _csv_text(CheckResult.CSV_COLUMNS, [r.csv_row() for r in results]))
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: worst {r.worst:.3g} ({r.detail})")
    return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run configuration")
    common.add_argument("--out", default=".", help="output directory (created if missing)")
    common.add_argument("--seed", type=int, help="random seed; overrides the config value")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="gaugeset", description="Gauge integrals of vector functions and multifunctions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("integrate", parents=[common], help="run one integration loop")
    demo = sub.add_parser("demo", parents=[common], help="run a reproducible demonstration")
    demo.add_argument("demo_id", choices=sorted(DEMOS))
    sub.add_parser("partition", parents=[common], help="write a gauge-fine tagged partition")
    sub.add_parser("check", parents=[common], help="run the invariant checks")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.config:
            cfg = parse_config(load_toml(args.config), args.command, args.config)
        elif args.command in ("integrate", "partition"):
            raise ConfigError(args.command, "--config is required")
        else:
            cfg = RunConfig(command=args.command)
        seed = args.seed if args.seed is not None else cfg.seed
        key = args.command + (f":{args.demo_id}" if args.command == "demo" else "")
        if seed is None and key in RANDOMIZED:
            raise ConfigError("seed", "randomized commands need --seed or a seed key in the config")
        if seed is not None and not 0 <= seed < 2**64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "integrate":
            return run_integrate(cfg, out)
        if args.command == "demo":
            return run_demo(args.demo_id, cfg, seed, out)
        if args.command == "partition":
            return run_partition(cfg, out)
        return run_check(seed, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
    except (DepthExceeded, PartitionTooLarge) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
