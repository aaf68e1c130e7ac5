"""Batch command-line entry point.

Subcommands::

    gaitadapt run --config s.cfg --out out/ [--seed N] [--adaptive on|off] [--format csv|jsonl]
    gaitadapt catalog --out out/ [--seed MASTER] [--only NAME ...] [--format csv|jsonl]
    gaitadapt compare (--config s.cfg | --scenario NAME) --out out/ [--seed N]

Exit codes: 0 success, 1 a must-not-fall scenario fell, 2 usage or config
error, 3 numeric divergence.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ..biped_model import NumericalError
from ..harness import ConfigError, ScenarioConfig, baseline_config, run_scenario, scenario_catalog
from .config_io import config_to_text, load_config
from .output import comparison_table, compare_block, emit_summary, emit_trace, summary_entry, write_weights

EXIT_OK, EXIT_FELL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
THREADS_ENV = "GAITADAPT_THREADS"


class UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaitadapt", description="Adaptive biped walking scenarios.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{run,catalog,compare}")

    def common(p, seed_help):
        p.add_argument("--out", required=True, type=Path, help="output directory (created if missing)")
        p.add_argument("--seed", type=int, default=None, help=seed_help)
        p.add_argument("--format", choices=("csv", "jsonl"), default="csv", help="trace format")

    def source(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--config", type=Path, help="scenario config file")
        g.add_argument("--scenario", help="name of a catalog scenario")

    run = sub.add_parser("run", help="run one scenario")
    source(run)
    common(run, "scenario seed override")
    run.add_argument("--adaptive", choices=("on", "off"), default=None, help="adaptation override")

    cat = sub.add_parser("catalog", help="run every catalog scenario")
    common(cat, "master seed for the catalog (default 0)")
    cat.add_argument("--only", nargs="+", metavar="NAME", help="restrict to these scenarios")

    cmp_ = sub.add_parser("compare", help="run one scenario with adaptation on and off")
    source(cmp_)
    common(cmp_, "scenario seed override")
    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse and validate; argparse exits with status 2 on malformed input."""
    args = _build_parser().parse_args(argv)
    if args.out.exists() and not args.out.is_dir():
        raise UsageError(f"--out {args.out} exists and is not a directory")
    return args


def _resolve(args, master_seed: int = 0) -> ScenarioConfig:
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        catalog = scenario_catalog(master_seed)
        # the unperturbed baseline is addressable by name but is not a catalog entry
        catalog.setdefault("nominal", baseline_config())
        if args.scenario not in catalog:
            raise UsageError(f"unknown scenario {args.scenario!r}; choose from {', '.join(catalog)}")
        cfg = catalog[args.scenario]
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    return cfg


def run_job(cfg: ScenarioConfig, out_dir: Path, stem: str, fmt: str) -> dict:
    """Run one scenario and write its files; safe to call in a worker process."""
    (out_dir / f"{stem}.cfg").write_text(config_to_text(cfg))
    try:
        trace, metrics = run_scenario(cfg)
    except NumericalError as exc:
        return {"status": "numeric", "message": str(exc), "name": cfg.name, "stem": stem}
    emit_trace(trace, out_dir / stem, fmt)
    write_weights(trace, out_dir, stem)
    entry = summary_entry(cfg, metrics)
    return {
        "status": "ok",
        "entry": entry,
        "name": cfg.name,
        "stem": stem,
        "unexpected_fall": metrics.fell and cfg.must_not_fall,
    }


def _workers(n_jobs: int) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return max(1, n_jobs)
    try:
        cap = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if cap < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return max(1, min(cap, n_jobs))


def _run_jobs(jobs: list[tuple[ScenarioConfig, str]], out_dir: Path, fmt: str) -> list[dict]:
    workers = _workers(len(jobs))
    if workers == 1:
        return [run_job(cfg, out_dir, stem, fmt) for cfg, stem in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_job, cfg, out_dir, stem, fmt) for cfg, stem in jobs]
        return [f.result() for f in futures]


def _off_arm(cfg: ScenarioConfig) -> ScenarioConfig:
    return dataclasses.replace(cfg, adaptive_enabled=False)


def _finish(results: list[dict], out_dir: Path, compare: list[tuple[str, str]] = ()) -> int:
    """Write summary.json, report, and pick the exit code."""
    by_stem = {r["stem"]: r for r in results}
    entries = [r["entry"] for r in results if r["status"] == "ok"]
    blocks = [
        compare_block(by_stem[on]["entry"], by_stem[off]["entry"])
        for on, off in compare
        if by_stem[on]["status"] == "ok" and by_stem[off]["status"] == "ok"
    ]
    if entries:
        emit_summary(entries, out_dir / "summary.json", blocks)
    for r in results:
        if r["status"] == "ok":
            e = r["entry"]
            flag = "FELL" if e["fell"] else "ok"
            print(f"{r['stem']}: {flag} err_x={e['steady_state_err_x']} conv_x={e['convergence_time_x']}")
        else:
            print(f"{r['stem']}: numeric failure: {r['message']}", file=sys.stderr)
    if blocks:
        print(comparison_table(blocks))
    if any(r["status"] == "numeric" for r in results):
        return EXIT_NUMERIC
    if any(r.get("unexpected_fall") for r in results):
        for r in results:
            if r.get("unexpected_fall"):
                print(f"{r['stem']}: fell in a must-not-fall scenario", file=sys.stderr)
        return EXIT_FELL
    return EXIT_OK


def _cmd_run(args) -> int:
    cfg = _resolve(args)
    if args.adaptive is not None:
        cfg = dataclasses.replace(cfg, adaptive_enabled=args.adaptive == "on")
    return _finish([run_job(cfg, args.out, cfg.name, args.format)], args.out)


def _cmd_compare(args) -> int:
    cfg = dataclasses.replace(_resolve(args), adaptive_enabled=True)
    on, off = f"{cfg.name}.adaptive-on", f"{cfg.name}.adaptive-off"
    results = _run_jobs([(cfg, on), (_off_arm(cfg), off)], args.out, args.format)
    return _finish(results, args.out, [(on, off)])


def _cmd_catalog(args) -> int:
    catalog = scenario_catalog(args.seed if args.seed is not None else 0)
    names = list(catalog)
    if args.only:
        missing = [n for n in args.only if n not in catalog]
        if missing:
            raise UsageError(f"unknown scenario(s) {missing}; choose from {', '.join(catalog)}")
        names = [n for n in names if n in args.only]
    jobs, pairs = [], []
    for name in names:
        cfg = catalog[name]
        jobs.append((cfg, name))
        if cfg.compare:
            off = f"{name}.adaptive-off"
            jobs.append((_off_arm(cfg), off))
            pairs.append((name, off))
    results = _run_jobs(jobs, args.out, args.format)
    return _finish(results, args.out, pairs)


_COMMANDS = {"run": _cmd_run, "catalog": _cmd_catalog, "compare": _cmd_compare}


def main(argv: list[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"gaitadapt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"gaitadapt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"gaitadapt: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"gaitadapt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


__all__ = ["main", "parse_args", "run_job"]
