"""Command-line experiment harness.

    uavopt validate-config --config scenario.ini
    uavopt eval        --config scenario.ini [--out DIR]
    uavopt sweep       --config scenario.ini [--out DIR] [--jobs K]
    uavopt trajectory  --config scenario.ini [--out DIR] [--jobs K]

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config
from .errors import NumericalError
from .experiments import (REPORT_COLUMNS, TRAJECTORY_COLUMNS, RateReport, compute_row, header_line, run_sweep,
                          trajectory_rows, write_csv)
from .plots import gnuplot_script, line_chart

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

log = logging.getLogger("uavopt")


def _setup_logging():
    level = LOG_LEVELS.get(os.environ.get("UAVOPT_LOG", "error").lower(), logging.ERROR)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _overrides(args) -> dict:
    out = {}
    if args.seed is not None:
        for key in ("lloyd.seed", "pso.seed", "quadrature.seed"):
            out[key] = str(args.seed)
    if args.quad_points is not None:
        out["quadrature.resolution"] = str(args.quad_points)
    return out


def _out_dir(args, cfg) -> Path:
    path = Path(args.out or cfg.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write(path: Path, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _json(cfg, payload) -> str:
    doc = {"tool": "uavopt", "version": __version__, "config_hash": cfg.config_hash, **payload}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


class _ProgressLog:
    """JSON-lines progress records ``{iter, objective, wallclock_ms}`` plus solver tags."""

    def __init__(self, path, cfg):
        self.fh = open(path, "w", encoding="utf-8", newline="\n")
        self.fh.write(json.dumps({"tool": "uavopt", "version": __version__, "config_hash": cfg.config_hash}) + "\n")

    def __call__(self, rec):
        self.fh.write(json.dumps(rec) + "\n")

    def close(self):
        self.fh.close()


def cmd_validate(args, cfg) -> int:
    kind = type(cfg.density).__name__
    print(f"ok config {cfg.config_hash} density {kind} dim {cfg.density.dim}")
    return EXIT_OK


def cmd_eval(args, cfg, progress=None) -> int:
    if cfg.eval_n is not None:
        n = cfg.eval_n
    elif cfg.deployment is not None:
        n = len(cfg.deployment)
    else:
        raise ConfigError("eval needs eval.n or eval.deployment", field="eval.n")
    if cfg.time_varying:
        raise ConfigError("eval needs a static density; use the trajectory command", field="density.kind")
    out = _out_dir(args, cfg)
    row, deps = compute_row(cfg, n, cfg.channel.h, progress)
    report = RateReport(cfg.config_hash, [row], [deps])
    note = header_line(cfg)
    _write(out / "eval.csv", report.to_csv(note))
    _write(out / "eval_deployment.json", _json(cfg, deps))
    print(out / "eval.csv")
    return EXIT_OK


def _sweep_plot(cfg, report, note):
    series = []
    methods = [("rate_pso", "pso"), ("rate_lloyd_exact", "iterative (exact rate)"),
               ("rate_thm2", "iterative (first order)"), ("rate_thm3", "quantization theory")]
    for h in sorted(set(cfg.sweep_h)):
        rows = [r for r in report.rows if r["h"] == h and r.get("status") == "ok"]
        for key, label in methods:
            if key == "rate_pso" and not cfg.pso_enabled:
                continue
            series.append((f"h={h:g} / {label}", [r["n"] for r in rows], [r.get(key) for r in rows]))
    title = f"{type(cfg.density).__name__}, delta={cfg.channel.delta:g}"
    svg = line_chart(series, title, "number of UAVs n", "rate (bits/s/Hz)", note)
    col = {c: k + 1 for k, c in enumerate(REPORT_COLUMNS)}
    plots = []
    for h in sorted(set(cfg.sweep_h)):
        for key, label in methods:
            if key == "rate_pso" and not cfg.pso_enabled:
                continue
            plots.append(f"'{{csv}}' every ::1 using {col['n']}:(${col['h']}=={h:g} ? ${col[key]} : 1/0) "
                         f"with linespoints title 'h={h:g} {label}'")
    gp = gnuplot_script("sweep.csv", "sweep_gnuplot.svg", title, "number of UAVs n", "rate (bits/s/Hz)", plots, note)
    return svg, gp


def cmd_sweep(args, cfg, progress=None) -> int:
    if not cfg.sweep_n:
        raise ConfigError("sweep needs sweep.n", field="sweep.n")
    if cfg.time_varying:
        raise ConfigError("sweep needs a static density; use the trajectory command", field="density.kind")
    out = _out_dir(args, cfg)
    report = run_sweep(cfg, args.jobs, progress)
    note = header_line(cfg)
    _write(out / "sweep.csv", report.to_csv(note))
    _write(out / "sweep_deployments.json", _json(cfg, {"rows": report.deployments}))
    svg, gp = _sweep_plot(cfg, report, note)
    _write(out / "sweep.svg", svg)
    _write(out / "sweep.gp", gp)
    print(out / "sweep.csv")
    failed = [r for r in report.rows if r.get("status") != "ok"]
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_trajectory(args, cfg, progress=None) -> int:
    if not cfg.time_varying:
        raise ConfigError("trajectory needs a time-varying density", field="density.kind")
    n = cfg.eval_n or (cfg.sweep_n[0] if cfg.sweep_n else 5)
    out = _out_dir(args, cfg)
    rows = trajectory_rows(cfg, n, args.jobs, progress)
    note = header_line(cfg)
    _write(out / "trajectory.csv", write_csv(TRAJECTORY_COLUMNS, rows, note))
    methods = [m for m in ("qt", "lloyd", "pso") if any(r["method"] == m for r in rows)]
    series = []
    for i in range(n):
        for m in methods:
            pts = [r for r in rows if r["method"] == m and r["uav_index"] == i]
            series.append((f"UAV {i + 1} / {m}", [r["t"] for r in pts], [r["x"] for r in pts]))
    svg = line_chart(series, f"Trajectories of {n} UAVs", "time t", "position x", note)
    _write(out / "trajectory.svg", svg)
    plots = [f"'{{csv}}' every ::1 using 1:(strcol(2) eq '{m}' && $3=={i} ? $4 : 1/0) with lines "
             f"title 'UAV {i + 1} {m}'" for i in range(n) for m in methods]
    _write(out / "trajectory.gp", gnuplot_script("trajectory.csv", "trajectory_gnuplot.svg",
                                                 f"Trajectories of {n} UAVs", "time t", "position x", plots, note))
    print(out / "trajectory.csv")
    return EXIT_OK


COMMANDS = {"validate-config": cmd_validate, "eval": cmd_eval, "sweep": cmd_sweep, "trajectory": cmd_trajectory}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uavopt", description="Rate-optimal UAV deployment experiments.")
    parser.add_argument("--version", action="version", version=f"uavopt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario file with block.key = value lines")
        p.add_argument("--out", help="output directory (overrides output.dir)")
        p.add_argument("--jobs", type=int, default=1, help="parallel rows / time steps")
        p.add_argument("--seed", type=int, help="override every seed in the config")
        p.add_argument("--quad-points", type=int, help="override quadrature.resolution")
        p.add_argument("--progress", help="write JSON-lines solver progress to this file")
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("config error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config, _overrides(args))
        if args.command == "validate-config":
            return cmd_validate(args, cfg)
        progress = None
        if args.progress:
            Path(args.progress).parent.mkdir(parents=True, exist_ok=True)
            progress = _ProgressLog(args.progress, cfg)
        try:
            return COMMANDS[args.command](args, cfg, progress)
        finally:
            if progress is not None:
                progress.close()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
