"""Generalized Lloyd iteration for the ell-1 placement problem.

Each iteration assigns every device to its nearest UAV and then moves each
UAV to the point minimizing the mean distance within its cell: the
conditional median in 1D, the geometric median in 2D. Both halves can only
lower the distortion, so the history is non-increasing.

The density is replaced by a measure on the quadrature grid: in 1D a
piecewise-constant density over the grid bins, in 2D point masses at the
grid nodes. Distortions reported here are exact for that measure.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..asymptotic import qt_deployment_1d
from ..deployment import Deployment, nearest_distances
from ..density import DensitySpec, QuadratureConfig, quadrature_grid
from .median import cdf, geometric_median, interval_median, weighted_distance_sum

INITS = ("auto", "qt_seed", "random", "kmeans++", "user")


@dataclass(frozen=True)
class LloydConfig:
    max_iters: int = 200
    distortion_rel_tol: float = 1e-6
    init: str = "auto"  # qt_seed in 1D, kmeans++ in 2D
    seed: int = 0
    points: tuple | None = None  # starting points for init="user"
    median_tol: float = 1e-8  # meters, inner 2D solver

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not (self.distortion_rel_tol > 0 and self.median_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.init not in INITS:
            raise ValueError(f"init must be one of {INITS}")
        if self.init == "user" and self.points is None:
            raise ValueError("init='user' needs points")


@dataclass
class LloydResult:
    deployment: Deployment
    history: list[float]
    iterations: int
    converged: bool
    degenerate_iterations: int = 0
    wallclock_ms: list[float] = field(default_factory=list)

    @property
    def distortion(self) -> float:
        return self.history[-1]

    def __iter__(self):
        # allows ``dep, hist = lloyd_l1(...)``
        return iter((self.deployment, self.history))


class _Histogram1D:
    """Piecewise-constant stand-in for a 1D density on the grid bins."""

    def __init__(self, spec, per_axis):
        (lo, hi), = spec.support
        _, self.masses = quadrature_grid(spec, per_axis)
        self.edges = np.linspace(lo, hi, per_axis + 1)
        self.cum = np.concatenate([[0.0], np.cumsum(self.masses)])
        self.lo, self.hi = lo, hi

    def cells(self, xs):
        order = np.argsort(xs, kind="stable")
        sx = xs[order]
        bounds = np.concatenate([[self.lo], np.clip((sx[:-1] + sx[1:]) / 2, self.lo, self.hi), [self.hi]])
        out = np.empty((len(xs), 2))
        out[order, 0], out[order, 1] = bounds[:-1], bounds[1:]
        # coincident points: the lowest index keeps the cell
        for k in range(1, len(sx)):
            if sx[k] == sx[k - 1]:
                first, dup = order[k - 1], order[k]
                out[first, 1] = out[dup, 1]
                out[dup] = sx[k]
                order[k] = first
        return out

    def mass(self, a, b):
        return cdf(self.edges, self.cum, self.masses, b) - cdf(self.edges, self.cum, self.masses, a)

    def distortion(self, xs):
        cuts = np.concatenate([self.edges, xs, (np.sort(xs)[:-1] + np.sort(xs)[1:]) / 2])
        cuts = np.unique(np.clip(cuts, self.lo, self.hi))
        u, v = cuts[:-1], cuts[1:]
        mid = (u + v) / 2
        k = np.clip(np.searchsorted(self.edges, mid, side="right") - 1, 0, len(self.masses) - 1)
        dens = self.masses[k] / (self.edges[k + 1] - self.edges[k])
        _, dist = nearest_distances(xs[:, None], mid[:, None])
        return float(np.sum(dens * (v - u) * dist))

    def update(self, xs):
        cells = self.cells(xs)
        new = xs.copy()
        empty = 0
        for i, (a, b) in enumerate(cells):
            if b <= a or self.mass(a, b) <= 0:
                empty += 1
                continue
            new[i] = interval_median(self.edges, self.cum, self.masses, a, b)
        return new, empty


class _Atoms2D:
    def __init__(self, spec, per_axis, median_tol):
        self.nodes, self.weights = quadrature_grid(spec, per_axis)
        self.median_tol = median_tol

    def distortion(self, pts):
        _, dist = nearest_distances(pts, self.nodes)
        return float(dist @ self.weights)

    def update(self, pts):
        owner, _ = nearest_distances(pts, self.nodes)
        new = pts.copy()
        empty = 0
        for i in range(len(pts)):
            sel = owner == i
            w = self.weights[sel]
            if not sel.any() or w.sum() <= 0:
                empty += 1
                continue
            cand = geometric_median(self.nodes[sel], w, x0=pts[i], tol=self.median_tol)
            # keep the old point unless the cell cost strictly drops
            if weighted_distance_sum(cand, self.nodes[sel], w) < weighted_distance_sum(pts[i], self.nodes[sel], w):
                new[i] = cand
        return new, empty


def kmeanspp_init(spec: DensitySpec, n: int, rng: np.random.Generator, per_axis: int) -> np.ndarray:
    """Seed n points from f, later ones weighted by distance to the chosen set."""
    nodes, weights = quadrature_grid(spec, per_axis)
    p = weights / weights.sum()
    chosen = [nodes[rng.choice(len(nodes), p=p)]]
    for _ in range(1, n):
        _, dist = nearest_distances(np.array(chosen), nodes)
        score = weights * dist
        if score.sum() <= 0:
            score = weights
        chosen.append(nodes[rng.choice(len(nodes), p=score / score.sum())])
    return np.array(chosen)


def initial_points(n: int, spec: DensitySpec, cfg: LloydConfig, per_axis: int) -> np.ndarray:
    init = cfg.init
    if init == "auto":
        init = "qt_seed" if spec.dim == 1 else "kmeans++"
    rng = np.random.default_rng(cfg.seed)
    if init == "user":
        pts = np.array(cfg.points, dtype=float).reshape(-1, spec.dim)
        if len(pts) != n:
            raise ValueError(f"init points give {len(pts)} UAVs, expected {n}")
        return pts
    if init == "qt_seed":
        if spec.dim != 1:
            raise ValueError("qt_seed init is only available in 1D")
        return qt_deployment_1d(n, spec).points.copy()
    if init == "random":
        return spec.sample(rng, n)
    return kmeanspp_init(spec, n, rng, per_axis)


def lloyd_l1(n: int, spec: DensitySpec, cfg: LloydConfig | None = None,
             quad: QuadratureConfig | None = None, altitude: float = 1.0,
             progress=None) -> LloydResult:
    """Minimize the mean distance to the nearest of n points under density ``spec``.

    ``altitude`` is only carried into the returned Deployment. ``progress``
    is called with ``{iter, objective, wallclock_ms}`` after every iteration.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg = cfg or LloydConfig()
    quad = quad or QuadratureConfig()
    per_axis = quad.points_per_axis(spec.dim)
    pts = initial_points(n, spec, cfg, per_axis)

    if spec.dim == 1:
        model = _Histogram1D(spec, per_axis)
        xs = pts[:, 0].copy()
    else:
        model = _Atoms2D(spec, per_axis, cfg.median_tol)
        xs = pts.copy()

    t0 = time.perf_counter()
    history = [model.distortion(xs)]
    clock = [0.0]
    degenerate = 0
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        new, empty = model.update(xs)
        degenerate += empty > 0
        d_new = model.distortion(new)
        if d_new > history[-1]:
            # rounding-level increase: the previous iterate is already a fixed point
            converged = True
            break
        xs = new
        history.append(d_new)
        clock.append((time.perf_counter() - t0) * 1e3)
        if progress is not None:
            progress({"iter": it, "objective": d_new, "wallclock_ms": clock[-1]})
        prev = history[-2]
        if prev <= 0 or (prev - d_new) / prev < cfg.distortion_rel_tol:
            converged = True
            break

    if spec.dim == 1:
        out = np.sort(xs)[:, None]
    else:
        out = xs
    return LloydResult(Deployment(out, altitude), history, it, converged, degenerate, clock)
