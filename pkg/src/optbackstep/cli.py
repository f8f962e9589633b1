"""
Command line entry point.

    optbackstep run CONFIG
    optbackstep compare CONFIG
    optbackstep sweep CONFIG --param trigger.theta --values 2,4,8
    optbackstep demo

Common flags: --out DIR, --dt, --t-end, --strict/--no-strict, --quiet,
--no-figures. Exit codes: 0 ok, 2 config/usage error, 3 numeric blowup.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import yaml

from .errors import ConfigError
from .harness.compare import compare_run
from .harness.config import (
    SimConfig,
    config_from_dict,
    config_to_dict,
    demo_config,
    dump_config,
    load_config,
    set_path,
)
from .harness.io import export_trace, write_metrics
from .harness.metrics import compute_metrics
from .harness.runner import run_simulation

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP = 0, 2, 3

SWEEP_FIELDS = [
    "value", "event_count", "min_interval", "mean_interval", "total_cost",
    "rmse_e1", "peak_abs_e1", "final_abs_e1", "blowup",
]


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (overrides output.dir)")
    common.add_argument("--dt", type=float, help="integration step [s]")
    common.add_argument("--t-end", type=float, dest="t_end", help="simulation horizon [s]")
    common.add_argument("--strict", action=argparse.BooleanOptionalAction, default=None,
                        help="enforce gain conditions and reject unknown config keys")
    common.add_argument("--quiet", action="store_true", help="only print errors")
    common.add_argument("--no-figures", action="store_true", help="skip PNG figures")

    p = argparse.ArgumentParser(prog="optbackstep", description="Event-triggered optimal backstepping simulator")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="simulate one config")
    r.add_argument("config")
    c = sub.add_parser("compare", parents=[common], help="optimal_et vs baseline on one config")
    c.add_argument("config")
    s = sub.add_parser("sweep", parents=[common], help="vary one config value")
    s.add_argument("config")
    s.add_argument("--param", required=True, help="dotted config path, e.g. trigger.theta")
    s.add_argument("--values", required=True, help="comma-separated values")
    s.add_argument("--jobs", type=int, default=1, help="parallel simulations")
    sub.add_parser("demo", parents=[common], help="write the benchmark config and run it")
    return p


def _config_dict(args) -> dict:
    if args.command == "demo":
        data = config_to_dict(demo_config())
    else:
        cfg = load_config(args.config)
        data = config_to_dict(cfg)
    if args.dt is not None:
        data["time"]["dt"] = args.dt
    if args.t_end is not None:
        data["time"]["t_end"] = args.t_end
    if args.strict is not None:
        data["strict"] = args.strict
    if args.out is not None:
        data["output"]["dir"] = args.out
    if args.no_figures:
        data["output"]["figures"] = False
    return data


def _emit(args, *lines):
    if not args.quiet:
        for line in lines:
            print(line)


def _run(cfg: SimConfig, args) -> int:
    out = Path(cfg.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    trace = run_simulation(cfg)
    metrics = compute_metrics(trace)
    tpath = export_trace(trace, out / cfg.output.trace)
    mpath = write_metrics(metrics, out / cfg.output.metrics)
    written = [tpath, mpath]
    if cfg.output.figures:
        from .harness.figures import render_run
        written += render_run(trace, out)
    _emit(args, *(f"wrote {p}" for p in written))
    _emit(args, f"controller={metrics.controller} samples={metrics.samples} events={metrics.event_count} "
                f"total_cost={metrics.total_cost:.6g} rmse_e1={metrics.rmse_e1:.6g} "
                f"peak_abs_e1={metrics.peak_abs_e1:.6g}")
    if metrics.blowup:
        print(f"numeric blowup at t={metrics.blowup_time}: {trace.blowup}", file=sys.stderr)
        return EXIT_BLOWUP
    return EXIT_OK


def _compare(cfg: SimConfig, args) -> int:
    out = Path(cfg.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    cmp = compare_run(cfg)
    written = []
    for kind, tr, m in zip(cmp.kinds, cmp.traces, cmp.metrics):
        written.append(export_trace(tr, out / f"trace_{kind}.csv"))
        written.append(write_metrics(m, out / f"metrics_{kind}.json"))
    written.append(write_metrics(cmp.report(), out / "compare_report.json"))
    if cfg.output.figures:
        from .harness.figures import render_comparison
        written += render_comparison(cmp, out)
    _emit(args, *(f"wrote {p}" for p in written))
    for kind, m in zip(cmp.kinds, cmp.metrics):
        _emit(args, f"{kind}: total_cost={m.total_cost:.6g} rmse_e1={m.rmse_e1:.6g} events={m.event_count}")
    if any(m.blowup for m in cmp.metrics):
        print("numeric blowup in comparison run", file=sys.stderr)
        return EXIT_BLOWUP
    return EXIT_OK


def _sweep_one(data: dict):
    cfg = config_from_dict(data)
    m = compute_metrics(run_simulation(cfg))
    return m


def _sweep(data: dict, args) -> int:
    values = [yaml.safe_load(v) for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values is empty")
    variants = [set_path(data, args.param, v) for v in values]
    # validate every variant before spending time on any simulation
    for d in variants:
        config_from_dict(d)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_one, variants))
    else:
        results = [_sweep_one(d) for d in variants]
    rows = sorted(zip(values, results), key=lambda vr: vr[0])
    out = Path(data["output"]["dir"])
    out.mkdir(parents=True, exist_ok=True)
    path = out / "sweep.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["param"] + SWEEP_FIELDS)
        for v, m in rows:
            d = m.as_dict()
            d["value"] = v
            w.writerow([args.param] + [d[k] for k in SWEEP_FIELDS])
    _emit(args, f"wrote {path}")
    for v, m in rows:
        _emit(args, f"{args.param}={v}: events={m.event_count} total_cost={m.total_cost:.6g} rmse_e1={m.rmse_e1:.6g}")
    return EXIT_BLOWUP if any(m.blowup for _, m in rows) else EXIT_OK


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        data = _config_dict(args)
        if args.command == "sweep":
            return _sweep(data, args)
        cfg = config_from_dict(data)
        if args.command == "demo":
            Path(cfg.output.dir).mkdir(parents=True, exist_ok=True)
            dump_config(cfg, Path(cfg.output.dir) / "demo_config.yaml")
        if args.command == "compare":
            return _compare(cfg, args)
        return _run(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
