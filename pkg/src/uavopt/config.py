"""Scenario config files: flat ``block.key = value`` lines, ``#`` comments.

Recognized keys (defaults in brackets)::

    density.kind        uniform1d | gaussian2d | piecewise_poly1d | power_law1d | power_law_family
    density.lo, density.hi            uniform1d / power_law1d support
    density.exponent                  power_law1d [0]
    density.mean                      gaussian2d "x, y" [0, 0]
    density.sigma2                    gaussian2d per-axis variance
    density.segments                  piecewise_poly1d "a b : c0 c1 ... ; a b : ..."
    channel.b, channel.c              [0.43, 4.88]
    channel.delta                     [0.5]
    channel.gamma_db                  [50]
    channel.r                         [2]
    channel.h                         [300]
    channel.angle_convention          radians | degrees [radians]
    quadrature.method                 fixed-grid | adaptive | monte-carlo [fixed-grid]
    quadrature.resolution             points per axis / samples [2000 in 1D, 300 in 2D]
    quadrature.seed, quadrature.atol
    lloyd.max_iters, lloyd.tol, lloyd.init, lloyd.seed, lloyd.median_tol
    pso.enabled                       [true]
    pso.swarm_size, pso.iters, pso.inertia, pso.cognitive, pso.social,
    pso.seed, pso.velocity_clamp
    sweep.n                           "1..10" or "1, 2, 5"
    sweep.h                           "80, 300" [channel.h]
    trajectory.t_min, trajectory.t_max, trajectory.points   [-1, 1, 41]
    eval.n                            UAV count for ``eval``
    eval.deployment                   "x1, x2, ..." (1D) or "x1 y1; x2 y2" (2D)
    output.dir                        [out]
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import ChannelParams
from .density import (DensitySpec, Gaussian2D, PiecewisePoly1D, PowerLaw1D, QuadratureConfig, TimeVarying,
                      Uniform1D, power_law_family)
from .errors import ConfigError
from .solvers import LloydConfig, PsoConfig


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _int_list(s):
    out = []
    for part in s.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise ValueError("empty list")
    return out


def _float_list(s):
    out = [float(p) for p in s.split(",") if p.strip()]
    if not out:
        raise ValueError("empty list")
    return out


def _str(s):
    return s.strip()


SCHEMA = {
    "density.kind": _str,
    "density.lo": float,
    "density.hi": float,
    "density.exponent": float,
    "density.mean": _float_list,
    "density.sigma2": float,
    "density.segments": _str,
    "channel.b": float,
    "channel.c": float,
    "channel.delta": float,
    "channel.gamma_db": float,
    "channel.r": float,
    "channel.h": float,
    "channel.angle_convention": _str,
    "quadrature.method": _str,
    "quadrature.resolution": int,
    "quadrature.seed": int,
    "quadrature.atol": float,
    "lloyd.max_iters": int,
    "lloyd.tol": float,
    "lloyd.init": _str,
    "lloyd.seed": int,
    "lloyd.median_tol": float,
    "pso.enabled": _bool,
    "pso.swarm_size": int,
    "pso.iters": int,
    "pso.inertia": float,
    "pso.cognitive": float,
    "pso.social": float,
    "pso.seed": int,
    "pso.velocity_clamp": float,
    "sweep.n": _int_list,
    "sweep.h": _float_list,
    "trajectory.t_min": float,
    "trajectory.t_max": float,
    "trajectory.points": int,
    "eval.n": int,
    "eval.deployment": _str,
    "output.dir": _str,
}

DENSITY_KINDS = ("uniform1d", "gaussian2d", "piecewise_poly1d", "power_law1d", "power_law_family")


@dataclass
class ScenarioConfig:
    density: DensitySpec | TimeVarying
    channel: ChannelParams
    quad: QuadratureConfig
    lloyd: LloydConfig
    pso: PsoConfig
    pso_enabled: bool = True
    sweep_n: list[int] = field(default_factory=list)
    sweep_h: list[float] = field(default_factory=list)
    times: list[float] = field(default_factory=list)
    eval_n: int | None = None
    deployment: np.ndarray | None = None
    out_dir: str = "out"
    values: dict = field(default_factory=dict)  # effective key -> canonical text

    @property
    def config_hash(self) -> str:
        """Digest of every effective setting except the output directory."""
        text = "".join(f"{k} = {v}\n" for k, v in sorted(self.values.items()) if k != "output.dir")
        return hashlib.sha256(text.encode()).hexdigest()[:12]

    @property
    def time_varying(self) -> bool:
        return isinstance(self.density, TimeVarying)


def read_lines(text: str) -> dict[str, tuple[str, int]]:
    """Map key -> (raw value, line number)."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'block.key = value'", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError("unknown key", line=lineno, field=key)
        if key in out:
            raise ConfigError(f"duplicate key (first on line {out[key][1]})", line=lineno, field=key)
        out[key] = (value, lineno)
    return out


def _parse_segments(text):
    segs = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        interval, coeffs = chunk.split(":")
        a, b = (float(v) for v in interval.split())
        segs.append(((a, b), tuple(float(c) for c in coeffs.split())))
    return tuple(segs)


def _parse_deployment(text, dim):
    rows = [r for r in text.split(";") if r.strip()]
    if dim == 1 and len(rows) == 1:
        return np.array([float(v) for v in rows[0].replace(",", " ").split()])[:, None]
    pts = np.array([[float(v) for v in r.replace(",", " ").split()] for r in rows])
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise ValueError(f"expected {dim} coordinates per UAV")
    return pts


def parse_config(text: str, overrides: dict | None = None) -> ScenarioConfig:
    """Parse config text; ``overrides`` maps keys to raw strings applied on top."""
    entries = read_lines(text)
    for k, v in (overrides or {}).items():
        if k not in SCHEMA:
            raise ConfigError("unknown override key", field=k)
        entries[k] = (str(v), entries.get(k, (None, None))[1])

    parsed = {}
    for key, (raw, lineno) in entries.items():
        try:
            parsed[key] = SCHEMA[key](raw)
        except ValueError as exc:
            raise ConfigError(str(exc), line=lineno, field=key) from None

    def get(key, default=None):
        return parsed.get(key, default)

    def fail(key, msg):
        raise ConfigError(msg, line=entries.get(key, (None, None))[1], field=key)

    kind = get("density.kind")
    if kind is None:
        raise ConfigError("missing required key", field="density.kind")
    if kind not in DENSITY_KINDS:
        fail("density.kind", f"must be one of {DENSITY_KINDS}")
    try:
        if kind == "uniform1d":
            density = Uniform1D(get("density.lo", 0.0), get("density.hi", 1000.0))
        elif kind == "gaussian2d":
            if "density.sigma2" not in parsed:
                raise ConfigError("gaussian2d needs density.sigma2", field="density.sigma2")
            mean = tuple(get("density.mean", [0.0, 0.0]))
            if len(mean) != 2:
                fail("density.mean", "needs two coordinates")
            density = Gaussian2D(mean, get("density.sigma2"))
        elif kind == "piecewise_poly1d":
            if "density.segments" not in parsed:
                raise ConfigError("piecewise_poly1d needs density.segments", field="density.segments")
            density = PiecewisePoly1D(_parse_segments(get("density.segments")))
        elif kind == "power_law1d":
            density = PowerLaw1D(get("density.lo", 0.0), get("density.hi", 1.0), get("density.exponent", 0.0))
        else:
            density = power_law_family()
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), line=entries["density.kind"][1], field="density") from None

    def build(block, fn):
        try:
            return fn()
        except ValueError as exc:
            keys = [k for k in entries if k.startswith(block + ".")]
            line = entries[keys[0]][1] if keys else None
            raise ConfigError(str(exc), line=line, field=block) from None

    channel = build("channel", lambda: ChannelParams.from_db(
        get("channel.gamma_db", 50.0), b=get("channel.b", 0.43), c=get("channel.c", 4.88),
        delta=get("channel.delta", 0.5), r=get("channel.r", 2.0), h=get("channel.h", 300.0),
        angle_convention=get("channel.angle_convention", "radians")))
    quad = build("quadrature", lambda: QuadratureConfig(
        get("quadrature.method", "fixed-grid"), get("quadrature.resolution"),
        get("quadrature.seed", 0), get("quadrature.atol", 1e-10)))
    lloyd = build("lloyd", lambda: LloydConfig(
        max_iters=get("lloyd.max_iters", 200), distortion_rel_tol=get("lloyd.tol", 1e-6),
        init=get("lloyd.init", "auto"), seed=get("lloyd.seed", 0), median_tol=get("lloyd.median_tol", 1e-8)))
    pso = build("pso", lambda: PsoConfig(
        swarm_size=get("pso.swarm_size", 40), iters=get("pso.iters", 500), inertia=get("pso.inertia", 0.72),
        cognitive=get("pso.cognitive", 1.49), social=get("pso.social", 1.49), seed=get("pso.seed", 0),
        velocity_clamp=get("pso.velocity_clamp", 0.2)))

    sweep_n = get("sweep.n", [])
    if any(n < 1 for n in sweep_n):
        fail("sweep.n", "UAV counts must be >= 1")
    sweep_h = get("sweep.h", [channel.h])
    if any(not h > 0 for h in sweep_h):
        fail("sweep.h", "altitudes must be positive")
    t_min, t_max = get("trajectory.t_min", -1.0), get("trajectory.t_max", 1.0)
    t_points = get("trajectory.points", 41)
    if t_points < 1 or t_max < t_min:
        fail("trajectory.points", "need at least one time and t_min <= t_max")
    times = np.linspace(t_min, t_max, t_points).tolist()
    if isinstance(density, TimeVarying) and not (density.t_range[0] <= t_min and t_max <= density.t_range[1]):
        fail("trajectory.t_min", f"time grid leaves the family range {density.t_range}")

    eval_n = get("eval.n")
    if eval_n is not None and eval_n < 1:
        fail("eval.n", "must be >= 1")
    deployment = None
    if "eval.deployment" in parsed:
        try:
            deployment = _parse_deployment(get("eval.deployment"), density.dim)
        except ValueError as exc:
            fail("eval.deployment", str(exc))
        if eval_n is not None and eval_n != len(deployment):
            fail("eval.n", "disagrees with the number of points in eval.deployment")

    values = {k: _canonical(parsed[k]) for k in parsed}
    return ScenarioConfig(density, channel, quad, lloyd, pso, get("pso.enabled", True), sweep_n, sweep_h,
                          times, eval_n, deployment, get("output.dir", "out"), values)


def _canonical(v):
    if isinstance(v, list):
        return ", ".join(_canonical(x) for x in v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def load_config(path, overrides: dict | None = None) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}") from None
    return parse_config(text, overrides)


def with_altitude(cfg: ScenarioConfig, h: float) -> ScenarioConfig:
    return replace(cfg, channel=cfg.channel.with_altitude(h))
