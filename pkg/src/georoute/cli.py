"""Command-line entry point: ``georoute <command> [options]``.

Exit codes: 0 success, 2 configuration error, 3 runtime or model error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .analytics import beta_quadrant_adversarial, beta_quadrant_uniform, beta_sector, drift_constant, predicted_delay
from .capacity import run_capacity
from .config import ConfigError, ExperimentConfig, parse_config
from .continuum import DelayHistogram, run_ensemble, run_walk, scaling_sweep
from .core import DomainError
from .discrete import discrete_trials, generate_field
from .output import (
    RunManifest, dump_json, emit_coloring, emit_field, emit_histogram, emit_path, emit_tile_report,
    emit_trajectory, manifest_path,
)
from .reproduce import TRIALS, format_table, reproduce_paper
from .seeding import derive_seed
from .strategies import Kind

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _strategy_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strategy", help="greedy | sector | quadrant | adversarial | fractional | disk")
    p.add_argument("--phi1", help="sector start angle, radians or e.g. -30deg")
    p.add_argument("--phi2", help="sector end angle, radians or e.g. 30deg")
    p.add_argument("--p", help="informed-hop probability for fractional")
    p.add_argument("--inner", help="inner strategy for fractional (default quadrant)")


def _range_args(p: argparse.ArgumentParser, with_n: bool = True) -> None:
    if with_n:
        p.add_argument("--n", "--N", dest="n", help="number of nodes")
    p.add_argument("--K", dest="K", help="range constant in M = K sqrt(ln n / n)")
    p.add_argument("--M", dest="M", help="transmission range override")


def _common(p: argparse.ArgumentParser, trials: bool = True) -> None:
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--seed", help="master seed (default 7)")
    if trials:
        p.add_argument("--trials", help="number of trials (default 150)")
    p.add_argument("--out", help="output file (stdout summary only when omitted)")
    p.add_argument("--format", help="json | csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="georoute", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="continuum walk ensemble")
    _strategy_args(p)
    _range_args(p)
    _common(p)
    p.add_argument("--d", help="source-destination distance (default 1)")
    p.add_argument("--trajectory", help="write the first walk's positions as CSV (hop,x,y)")

    p = sub.add_parser("simulate-discrete", help="routing on random node fields in the unit square")
    _strategy_args(p)
    _range_args(p)
    _common(p)
    p.add_argument("--trajectory", help="write the first routed path as CSV (hop,node,x,y)")
    p.add_argument("--field-out", dest="field_out", help="write the first trial's node field as CSV (x,y)")

    p = sub.add_parser("analyze", help="drift constants and predicted delay bounds")
    _strategy_args(p)
    _range_args(p)
    _common(p, trials=False)

    p = sub.add_parser("sweep", help="normalized delay across network sizes")
    _strategy_args(p)
    _range_args(p, with_n=False)
    _common(p)
    p.add_argument("--n-list", dest="n_list", help="comma-separated ascending sizes")

    p = sub.add_parser("capacity", help="tile congestion and achieved rate under progressive routing")
    _strategy_args(p)
    _range_args(p)
    _common(p, trials=False)
    p.add_argument("--delta", help="progress per hop in units of M (default 0.5)")
    p.add_argument("--Delta", dest="Delta", help="protocol-model guard (default 0.5)")
    p.add_argument("--flows", help="route only this many flows (default n/2)")
    p.add_argument("--coloring-out", dest="coloring_out", help="write the tile coloring as CSV (tile,color)")

    p = sub.add_parser("reproduce-paper", help="rerun the eight published hop-count experiments")
    p.add_argument("--seed", help="master seed (default 7)")
    p.add_argument("--trials", help=f"trials per experiment (default {TRIALS})")
    p.add_argument("--out-dir", dest="out_dir", default="reproduction", help="output directory")
    return parser


CONFIG_KEYS = ("strategy", "phi1", "phi2", "p", "inner", "n", "K", "M", "d", "trials", "seed",
               "delta", "Delta", "flows", "n_list", "out", "format", "trajectory")


def _manifest(cfg: ExperimentConfig, labels_and_counts, outputs, seconds) -> RunManifest:
    seeds = {label: [derive_seed(cfg.seed, label, t) for t in range(count)] for label, count in labels_and_counts}
    return RunManifest(cfg.to_dict(), __version__, cfg.seed, seeds, [Path(o).name for o in outputs],
                       {"total": seconds})


def _finish(cfg, outputs, seeds, t0):
    if cfg.out:
        _manifest(cfg, seeds, outputs, time.perf_counter() - t0).write(manifest_path(cfg.out))


def cmd_simulate(cfg: ExperimentConfig) -> dict:
    t0 = time.perf_counter()
    scaling = cfg.scaling()
    hist = run_ensemble(cfg.strategy, scaling, cfg.trials, cfg.seed)
    outputs = []
    if cfg.out:
        outputs.append(emit_histogram(hist, cfg.out, cfg.format, manifest_path(cfg.out).name))
    if cfg.trajectory:
        walk = run_walk(cfg.strategy, scaling, derive_seed(cfg.seed, "continuum", 0), record_trajectory=True)
        outputs.append(emit_trajectory(walk.trajectory, cfg.trajectory))
    _finish(cfg, outputs, [("continuum", cfg.trials)], t0)
    summary = {"M": scaling.M, "eps": scaling.eps, "mean_hops": hist.mean, "stddev": hist.stddev,
               "censored": hist.censored}
    drift = drift_constant(cfg.strategy)
    if drift > 0:
        summary["predicted_hops"] = scaling.d / (drift * scaling.M)
    return summary


def cmd_simulate_discrete(cfg: ExperimentConfig, field_out: str | None) -> dict:
    t0 = time.perf_counter()
    scaling = cfg.scaling()
    results = discrete_trials(cfg.strategy, scaling, cfg.trials, cfg.seed)
    values = [r.hop_count for r in results if r.delivered]
    hist = DelayHistogram.from_values(values, trials=cfg.trials, censored=cfg.trials - len(values))
    outputs = []
    if cfg.out:
        outputs.append(emit_histogram(hist, cfg.out, cfg.format, manifest_path(cfg.out).name))
    if cfg.trajectory:
        outputs.append(emit_path(results[0], cfg.trajectory))
    if field_out:
        fld = generate_field(scaling, derive_seed(cfg.seed, "discrete/field", 0))
        outputs.append(emit_field(fld.positions, field_out))
    _finish(cfg, outputs, [("discrete/field", cfg.trials), ("discrete/route", cfg.trials)], t0)
    return {"M": scaling.M, "mean_hops": hist.mean, "stddev": hist.stddev, "censored": hist.censored}


def cmd_analyze(cfg: ExperimentConfig) -> dict:
    spec = cfg.strategy
    base = spec.inner if spec.kind is Kind.FRACTIONAL else spec
    if base.kind is Kind.SECTOR:
        beta = beta_sector(base.phi1, base.phi2)
    elif base.kind is Kind.QUADRANT_UNIFORM:
        beta = beta_quadrant_uniform()
    elif base.kind is Kind.QUADRANT_ADVERSARIAL:
        beta = beta_quadrant_adversarial()
    else:
        beta = None
    out = {"strategy": spec.to_dict(), "drift": drift_constant(spec)}
    if beta is not None:
        out["beta"] = beta.to_dict()
    if cfg.n is not None:
        scaling = cfg.scaling()
        if beta is None and base.kind is Kind.STRAIGHT_LINE:
            out["predicted"] = predicted_delay(1.0, spec.informed_probability, scaling).to_dict()
        elif beta is not None:
            out["predicted"] = predicted_delay(beta, spec.informed_probability, scaling).to_dict()
        else:
            raise DomainError("a strategy without drift has no delay prediction")
    if cfg.out:
        dump_json(out, cfg.out)
    return out


def cmd_sweep(cfg: ExperimentConfig) -> dict:
    t0 = time.perf_counter()
    rows = scaling_sweep(cfg.strategy, cfg.n_list, cfg.K, cfg.trials, cfg.seed, cfg.d)
    records = [{"n": r.n, "M": r.M, "mean_tau_M": r.mean_tau_M, "mean_total_M": r.mean_total_M,
                "inverse_drift": r.inverse_drift, "censored": r.censored} for r in rows]
    outputs = []
    if cfg.out:
        outputs.append(dump_json({"manifest": manifest_path(cfg.out).name, "rows": records}, cfg.out))
    _finish(cfg, outputs, [(f"sweep-{n}", cfg.trials) for n in cfg.n_list], t0)
    return {"rows": records}


def cmd_capacity(cfg: ExperimentConfig, coloring_out: str | None) -> dict:
    t0 = time.perf_counter()
    report, _, _, _, colors = run_capacity(cfg.scaling(), cfg.strategy, cfg.delta, cfg.Delta, cfg.seed, cfg.flows)
    outputs = []
    if cfg.out:
        outputs.append(emit_tile_report(report, cfg.out, manifest_path(cfg.out).name))
    if coloring_out:
        outputs.append(emit_coloring(colors, coloring_out))
    _finish(cfg, outputs, [], t0)
    summary = report.to_dict()
    summary.pop("tile_hops")
    summary["rate_scaled"] = report.rate_scaled
    return summary


ANGLE_FLAGS = ("--phi1", "--phi2")


def _join_angles(argv):
    # "--phi1 -30deg" would read as an unknown flag; glue such values to their option
    out, it = [], iter(argv)
    for tok in it:
        if tok in ANGLE_FLAGS:
            out.append(f"{tok}={next(it, '')}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_angles(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    cmd = args.command
    try:
        if cmd == "reproduce-paper":
            cfg = parse_config(cmd, {"seed": args.seed, "trials": args.trials})
        else:
            cli = {k: getattr(args, k, None) for k in CONFIG_KEYS}
            cfg = parse_config(cmd, cli, getattr(args, "config", None))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: cannot read config file: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if cmd == "simulate":
            result = cmd_simulate(cfg)
        elif cmd == "simulate-discrete":
            result = cmd_simulate_discrete(cfg, args.field_out)
        elif cmd == "analyze":
            result = cmd_analyze(cfg)
        elif cmd == "sweep":
            result = cmd_sweep(cfg)
        elif cmd == "capacity":
            result = cmd_capacity(cfg, args.coloring_out)
        else:
            rows = reproduce_paper(cfg.seed, args.out_dir, cfg.trials)
            print(format_table(rows))
            return EXIT_OK
    except (DomainError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(json.dumps(result, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
