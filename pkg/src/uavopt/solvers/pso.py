"""Global-best particle swarm optimization and its use on the exact rate."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..channel import ChannelParams, rate_distance
from ..deployment import Deployment, expected_rate
from ..density import DensitySpec, QuadratureConfig, quadrature_grid


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 40
    iters: int = 500
    inertia: float = 0.72
    cognitive: float = 1.49
    social: float = 1.49
    seed: int = 0
    velocity_clamp: float = 0.2  # fraction of the box width per axis
    box: tuple | None = None  # (lower, upper) override; derived from the support otherwise

    def __post_init__(self):
        if self.swarm_size < 1:
            raise ValueError("swarm_size must be >= 1")
        if self.iters < 1:
            raise ValueError("iters must be >= 1")
        if not 0 < self.inertia < 1:
            raise ValueError("inertia must lie in (0, 1)")
        if not self.velocity_clamp > 0:
            raise ValueError("velocity_clamp must be positive")


@dataclass
class PsoResult:
    x: np.ndarray
    value: float
    history: list[float]  # best-so-far objective after each iteration
    evaluations: int
    resets: int = 0
    wallclock_ms: list[float] = field(default_factory=list)


def pso_minimize(objective, lower, upper, cfg: PsoConfig | None = None, batch: bool = False,
                 progress=None) -> PsoResult:
    """Minimize ``objective`` over the box [lower, upper].

    ``objective`` maps a vector to a float, or with ``batch=True`` a
    (swarm, dims) array to one value per row. Particles that produce
    non-finite values are re-drawn uniformly in the box.
    """
    cfg = cfg or PsoConfig()
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if lower.shape != upper.shape or np.any(upper < lower):
        raise ValueError("bad search box")
    dims = lower.size
    rng = np.random.default_rng(cfg.seed)
    width = upper - lower
    vmax = cfg.velocity_clamp * width
    S = cfg.swarm_size

    def evaluate(pos):
        if batch:
            return np.asarray(objective(pos), dtype=float).reshape(S)
        return np.array([objective(p) for p in pos], dtype=float)

    x = lower + width * rng.uniform(size=(S, dims))
    v = vmax * rng.uniform(-1.0, 1.0, size=(S, dims))
    fx = evaluate(x)
    evals = S
    resets = 0
    bad = ~np.isfinite(fx)
    while bad.any():
        # only at start-up: keep re-drawing until every particle has a finite value
        resets += int(bad.sum())
        x[bad] = lower + width * rng.uniform(size=(int(bad.sum()), dims))
        fx = np.where(bad, evaluate(x), fx)
        evals += S
        bad = ~np.isfinite(fx)
        if resets > 1000 * S:
            raise ValueError("objective is not finite anywhere tried in the box")

    pbest, pbest_f = x.copy(), fx.copy()
    g = int(np.argmin(pbest_f))  # first minimum: fixed reduction order
    gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])
    history = []
    clock = []
    t0 = time.perf_counter()
    for it in range(1, cfg.iters + 1):
        r1 = rng.uniform(size=(S, dims))
        r2 = rng.uniform(size=(S, dims))
        v = cfg.inertia * v + cfg.cognitive * r1 * (pbest - x) + cfg.social * r2 * (gbest - x)
        v = np.clip(v, -vmax, vmax)
        x = np.clip(x + v, lower, upper)
        fx = evaluate(x)
        evals += S
        bad = ~np.isfinite(fx)
        if bad.any():
            resets += int(bad.sum())
            x[bad] = lower + width * rng.uniform(size=(int(bad.sum()), dims))
            v[bad] = 0.0
            fx[bad] = np.inf
        better = fx < pbest_f
        pbest[better] = x[better]
        pbest_f[better] = fx[better]
        g = int(np.argmin(pbest_f))
        if pbest_f[g] < gbest_f:
            gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])
        history.append(gbest_f)
        clock.append((time.perf_counter() - t0) * 1e3)
        if progress is not None:
            progress({"iter": it, "objective": gbest_f, "wallclock_ms": clock[-1]})
    return PsoResult(gbest, gbest_f, history, evals, resets, clock)


@dataclass
class PsoRateResult:
    deployment: Deployment
    rate: float
    history: list[float]  # best rate so far, non-decreasing
    evaluations: int
    resets: int = 0

    def __iter__(self):
        return iter((self.deployment, self.rate, self.history))


def _batched_grid_rate(params, spec, n, per_axis, chunk_elems=2_000_000):
    nodes, weights = quadrature_grid(spec, per_axis)
    d = spec.dim
    rows = max(1, chunk_elems // len(nodes))

    def fitness(swarm):
        out = np.empty(len(swarm))
        for start in range(0, len(swarm), rows):
            block = swarm[start:start + rows].reshape(-1, n, d)
            best = np.full((len(block), len(nodes)), np.inf)
            for j in range(n):
                sq = np.zeros_like(best)
                for axis in range(d):
                    sq += (nodes[None, :, axis] - block[:, j, axis, None]) ** 2
                np.minimum(best, sq, out=best)
            out[start:start + rows] = rate_distance(params, np.sqrt(best)) @ weights
        return out

    return fitness


def pso_max_rate(n: int, params: ChannelParams, spec: DensitySpec, cfg: PsoConfig | None = None,
                 quad: QuadratureConfig | None = None, progress=None) -> PsoRateResult:
    """Search all n-UAV deployments in the support box for the highest exact average rate."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg = cfg or PsoConfig()
    quad = quad or QuadratureConfig()
    d = spec.dim
    if cfg.box is not None:
        lo, hi = (np.asarray(v, dtype=float) for v in cfg.box)
        lo, hi = np.broadcast_to(lo, (d,)), np.broadcast_to(hi, (d,))
    else:
        lo, hi = spec.support[:, 0], spec.support[:, 1]
    lower, upper = np.tile(lo, n), np.tile(hi, n)

    if quad.method == "fixed-grid":
        fit = _batched_grid_rate(params, spec, n, quad.points_per_axis(d))
        res = pso_minimize(lambda s: -fit(s), lower, upper, cfg, batch=True, progress=_negated(progress))
    else:
        def neg_rate(vec):
            return -expected_rate(Deployment(vec.reshape(n, d), params.h), params, spec, quad)
        res = pso_minimize(neg_rate, lower, upper, cfg, progress=_negated(progress))

    pts = res.x.reshape(n, d)
    if d == 1:
        pts = np.sort(pts, axis=0)
    return PsoRateResult(Deployment(pts, params.h), -res.value, [-h for h in res.history],
                         res.evaluations, res.resets)


def _negated(progress):
    if progress is None:
        return None
    return lambda rec: progress({**rec, "objective": -rec["objective"]})
