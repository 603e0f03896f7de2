"""Per-scenario computations behind the CLI: rate report rows and trajectories."""
from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .asymptotic import power_law_trajectory, qt_deployment_1d, rate_thm2, rate_thm3
from .config import ScenarioConfig, with_altitude
from .deployment import Deployment, expected_rate, l1_distortion
from .solvers import lloyd_l1, pso_max_rate

log = logging.getLogger(__name__)

REPORT_COLUMNS = ("config_hash", "n", "h", "delta", "rate_pso", "rate_lloyd_exact", "rate_thm2", "rate_thm3",
                  "distortion", "rate_given", "lloyd_iters", "pso_evals", "lloyd_seed", "pso_seed", "status")
TRAJECTORY_COLUMNS = ("t", "method", "uav_index", "x")


def fmt(v) -> str:
    """CSV cell text: 9 significant digits for floats, empty for missing values."""
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.9g}"
    return str(v)


def header_line(cfg: ScenarioConfig) -> str:
    return f"uavopt {__version__} config {cfg.config_hash}"


def write_csv(columns, rows, note) -> str:
    buf = io.StringIO()
    buf.write(f"# {note}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


@dataclass
class RateReport:
    config_hash: str
    rows: list[dict] = field(default_factory=list)
    deployments: list[dict] = field(default_factory=list)

    def to_csv(self, note: str) -> str:
        return write_csv(REPORT_COLUMNS, self.rows, note)


def _dep_json(dep: Deployment | None):
    if dep is None:
        return None
    pts = dep.points[:, 0] if dep.dim == 1 else dep.points
    return {"altitude": dep.altitude, "points": np.round(pts, 9).tolist()}


def compute_row(cfg: ScenarioConfig, n: int, h: float, progress=None) -> tuple[dict, dict]:
    """Evaluate every method for n UAVs at altitude h.

    Returns the CSV row and a JSON-ready record of the deployments.
    """
    cfg = with_altitude(cfg, h)
    spec, params, quad = cfg.density, cfg.channel, cfg.quad
    row = {"config_hash": cfg.config_hash, "n": n, "h": float(h), "delta": params.delta,
           "lloyd_seed": cfg.lloyd.seed, "pso_seed": cfg.pso.seed if cfg.pso_enabled else None}
    deps = {"n": n, "h": float(h)}

    lloyd = lloyd_l1(n, spec, cfg.lloyd, quad, altitude=h, progress=_tagged(progress, "lloyd", n, h))
    row["rate_lloyd_exact"] = expected_rate(lloyd.deployment, params, spec, quad)
    row["distortion"] = l1_distortion(lloyd.deployment, spec, quad)
    row["rate_thm2"] = rate_thm2(lloyd.deployment, params, spec, quad)
    row["rate_thm3"] = rate_thm3(n, params, spec)
    row["lloyd_iters"] = lloyd.iterations
    deps["lloyd"] = _dep_json(lloyd.deployment)
    if spec.dim == 1:
        deps["qt"] = _dep_json(qt_deployment_1d(n, spec, h))

    if cfg.pso_enabled:
        pso = pso_max_rate(n, params, spec, cfg.pso, quad, progress=_tagged(progress, "pso", n, h))
        row["rate_pso"] = pso.rate
        row["pso_evals"] = pso.evaluations
        deps["pso"] = _dep_json(pso.deployment)

    if cfg.deployment is not None and len(cfg.deployment) == n:
        given = Deployment(cfg.deployment, h)
        row["rate_given"] = expected_rate(given, params, spec, quad)
        deps["given"] = _dep_json(given)
    row["status"] = "ok"
    return row, deps


def _tagged(progress, solver, n, value, key="h"):
    if progress is None:
        return None
    return lambda rec: progress({**rec, "solver": solver, "n": n, key: value})


def _safe_row(args, progress=None):
    cfg, n, h = args
    try:
        return compute_row(cfg, n, h, progress)
    except Exception as exc:  # one bad row must not stop a sweep
        log.error("row n=%s h=%s failed: %s", n, h, exc)
        return ({"config_hash": cfg.config_hash, "n": n, "h": float(h), "delta": cfg.channel.delta,
                 "status": f"error: {type(exc).__name__}: {exc}"}, {"n": n, "h": float(h)})


def run_sweep(cfg: ScenarioConfig, jobs: int = 1, progress=None) -> RateReport:
    """One row per (n, h), ordered by (n, h) whatever the completion order."""
    tasks = [(cfg, n, h) for n in sorted(set(cfg.sweep_n)) for h in sorted(set(cfg.sweep_h))]
    if jobs > 1 and progress is None:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_safe_row, tasks))
    else:
        results = []
        for c, n, h in tasks:
            log.info("sweep row n=%d h=%g", n, h)
            results.append(_safe_row((c, n, h), progress))
    report = RateReport(cfg.config_hash)
    for row, deps in results:
        report.rows.append(row)
        report.deployments.append(deps)
    return report


def trajectory_rows(cfg: ScenarioConfig, n: int, jobs: int = 1, progress=None) -> list[dict]:
    """UAV positions over the time grid for the quantile, Lloyd and PSO methods."""
    tasks = [(cfg, n, t) for t in cfg.times]
    if jobs > 1 and progress is None:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_t = list(pool.map(_trajectory_at, tasks))
    else:
        per_t = [_trajectory_at(task, progress) for task in tasks]
    rows = []
    for t, methods in zip(cfg.times, per_t):
        for method, xs in methods:
            rows.extend({"t": float(t), "method": method, "uav_index": i, "x": float(x)} for i, x in enumerate(xs))
    return rows


def _trajectory_at(task, progress=None):
    cfg, n, t = task
    spec = cfg.density.at(t)
    if cfg.density.name == "power_law":
        qt = power_law_trajectory(n, t)
    else:
        qt = qt_deployment_1d(n, spec).points[:, 0]
    out = [("qt", qt)]
    lloyd = lloyd_l1(n, spec, cfg.lloyd, cfg.quad, altitude=cfg.channel.h,
                     progress=_tagged(progress, "lloyd", n, t, "t"))
    out.append(("lloyd", lloyd.deployment.points[:, 0]))
    if cfg.pso_enabled:
        pso = pso_max_rate(n, cfg.channel, spec, cfg.pso, cfg.quad, progress=_tagged(progress, "pso", n, t, "t"))
        out.append(("pso", pso.deployment.points[:, 0]))
    return out
