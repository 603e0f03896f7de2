"""UAV deployments, nearest-UAV association and the two objectives.

Every device is served by its nearest UAV: the rate is strictly decreasing
in horizontal distance, so the rate-maximizing UAV is the closest one.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import ChannelParams, rate_distance
from .density import DensitySpec, QuadratureConfig, as_points, integrate, quadrature_grid


@dataclass(frozen=True, eq=False)
class Deployment:
    points: np.ndarray  # (n, d) ground projections in meters
    altitude: float

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or len(pts) < 1 or pts.shape[1] not in (1, 2):
            raise ValueError("a deployment needs n >= 1 points of dimension 1 or 2")
        if not self.altitude > 0:
            raise ValueError("altitude must be positive")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "altitude", float(self.altitude))

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def translated(self, offset) -> "Deployment":
        return Deployment(self.points + np.asarray(offset, dtype=float), self.altitude)

    def __eq__(self, other):
        return (isinstance(other, Deployment) and self.altitude == other.altitude
                and np.array_equal(self.points, other.points))

    def __repr__(self):
        pts = self.points[:, 0].tolist() if self.dim == 1 else self.points.tolist()
        return f"Deployment({pts}, h={self.altitude:g})"

    def csv_rows(self) -> list[dict]:
        rows = []
        for i, p in enumerate(self.points):
            rows.append({"uav_index": i, "x": p[0], "y": p[1] if self.dim == 2 else None, "h": self.altitude})
        return rows

    def to_csv(self) -> str:
        """Serialize as ``uav_index,x[,y],h`` rows, 9 significant digits."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["uav_index", "x", "y", "h"] if self.dim == 2 else ["uav_index", "x", "h"])
        for row in self.csv_rows():
            vals = [row["x"], row["y"], row["h"]] if self.dim == 2 else [row["x"], row["h"]]
            w.writerow([row["uav_index"], *(f"{v:.9g}" for v in vals)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Deployment":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty deployment CSV")
        rows.sort(key=lambda r: int(r["uav_index"]))
        has_y = "y" in rows[0] and rows[0]["y"] not in (None, "")
        pts = [[float(r["x"]), float(r["y"])] if has_y else [float(r["x"])] for r in rows]
        heights = {float(r["h"]) for r in rows}
        if len(heights) != 1:
            raise ValueError("all UAVs share one altitude")
        return cls(np.array(pts), heights.pop())


def _check(dep: Deployment, spec: DensitySpec, params: ChannelParams | None = None):
    if dep.dim != spec.dim:
        raise ValueError(f"deployment is {dep.dim}D but the density is {spec.dim}D")
    if params is not None and not math.isclose(dep.altitude, params.h, rel_tol=1e-12):
        raise ValueError(f"deployment altitude {dep.altitude} differs from channel altitude {params.h}")


def nearest_distances(points: np.ndarray, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Index of the nearest point (lowest index on ties) and the distance to it."""
    diff = pts[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    idx = np.argmin(dist, axis=1)
    return idx, dist[np.arange(len(pts)), idx]


def best_uav(dep: Deployment, q):
    """Index of the UAV serving q: the nearest, lowest index on ties."""
    pts, single = as_points(dep, q)
    idx, _ = nearest_distances(dep.points, pts)
    return int(idx[0]) if single else idx


def _min_distance(dep):
    def g(q):
        return nearest_distances(dep.points, as_points(dep, q)[0])[1]
    return g


def _breaks_1d(dep, spec):
    if dep.dim != 1:
        return ()
    xs = np.unique(dep.points[:, 0])
    return tuple(xs) + tuple((xs[:-1] + xs[1:]) / 2)


def expected_rate(dep: Deployment, params: ChannelParams, spec: DensitySpec,
                  quad: QuadratureConfig | None = None) -> float:
    """Average over f of the rate each device gets from its nearest UAV."""
    _check(dep, spec, params)
    dist = _min_distance(dep)
    return integrate(spec, lambda q: rate_distance(params, dist(q)), quad, breaks=_breaks_1d(dep, spec))


def l1_distortion(dep: Deployment, spec: DensitySpec, quad: QuadratureConfig | None = None) -> float:
    """Average over f of the distance from a device to its nearest UAV."""
    _check(dep, spec)
    return integrate(spec, _min_distance(dep), quad, breaks=_breaks_1d(dep, spec))


def cell_integrals(dep: Deployment, spec: DensitySpec, g, quad: QuadratureConfig | None = None) -> np.ndarray:
    """Per-UAV integrals of g(i, q) f(q) over each Voronoi cell, on the quadrature grid.

    ``g`` receives the UAV index and the canonical (m, d) points of its cell.
    Cells are summed in index order.
    """
    _check(dep, spec)
    quad = quad or QuadratureConfig()
    nodes, weights = quadrature_grid(spec, quad.points_per_axis(spec.dim))
    owner, _ = nearest_distances(dep.points, nodes)
    out = np.zeros(dep.n)
    for i in range(dep.n):
        sel = owner == i
        if sel.any():
            out[i] = np.asarray(g(i, nodes[sel]), dtype=float) @ weights[sel]
    return out


class Cell(NamedTuple):
    index: int
    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return self.hi <= self.lo


def voronoi_cells_1d(dep: Deployment, support=None) -> list[Cell]:
    """1D Voronoi cells ordered by position, clipped to ``support``.

    Among coincident UAVs the lowest index owns the cell; the others get an
    empty cell at that position.
    """
    if dep.dim != 1:
        raise ValueError("voronoi_cells_1d needs a 1D deployment")
    if support is None:
        support = (-math.inf, math.inf)
    lo, hi = (float(v) for v in np.ravel(support)[:2])
    xs = dep.points[:, 0]
    order = np.argsort(xs, kind="stable")
    uniq = np.unique(xs)
    mids = (uniq[:-1] + uniq[1:]) / 2
    bounds = np.concatenate([[lo], np.clip(mids, lo, hi), [hi]])
    cells = []
    seen = set()
    for i in order:
        k = int(np.searchsorted(uniq, xs[i]))
        if k in seen:
            p = float(np.clip(xs[i], lo, hi))
            cells.append(Cell(int(i), p, p))
        else:
            seen.add(k)
            cells.append(Cell(int(i), float(bounds[k]), float(bounds[k + 1])))
    return cells
