"""Weighted medians of discrete measures, used for the per-cell Lloyd update."""
from __future__ import annotations

import numpy as np


def weighted_distance_sum(x, atoms, weights) -> float:
    return float(np.sqrt(((atoms - x) ** 2).sum(axis=1)) @ weights)


def subgradient_norm(x, atoms, weights) -> float:
    """Norm of the minimum-norm subgradient of sum w |x - a| at x."""
    diff = x - atoms
    dist = np.sqrt((diff**2).sum(axis=1))
    at = dist == 0
    g = (weights[~at, None] * diff[~at] / dist[~at, None]).sum(axis=0)
    slack = weights[at].sum()
    return max(0.0, float(np.linalg.norm(g)) - slack)


def geometric_median(atoms: np.ndarray, weights: np.ndarray, x0=None, tol: float = 1e-8,
                     eps: float = 1e-6, max_iter: int = 2000) -> np.ndarray:
    """Minimize sum_j w_j |x - a_j| over x in R^2.

    Smoothed Weiszfeld iteration started at ``x0`` (weighted mean by default).
    If an iterate increases the objective, switches to subgradient descent
    with diminishing steps. Never returns a point worse than ``x0``.
    """
    atoms = np.asarray(atoms, dtype=float)
    weights = np.asarray(weights, dtype=float)
    x = np.average(atoms, axis=0, weights=weights) if x0 is None else np.asarray(x0, dtype=float)
    best_x, best_f = x, weighted_distance_sum(x, atoms, weights)
    for _ in range(max_iter):
        d = np.sqrt(((atoms - x) ** 2).sum(axis=1) + eps * eps)
        wd = weights / d
        x_new = wd @ atoms / wd.sum()
        f_new = weighted_distance_sum(x_new, atoms, weights)
        if f_new > best_f * (1 + 1e-12):
            return _subgradient_descent(atoms, weights, best_x, best_f, tol)
        if f_new >= best_f:
            break
        step = float(np.linalg.norm(x_new - x))
        x, best_x, best_f = x_new, x_new, f_new
        if step < tol:
            break
    return best_x


def _subgradient_descent(atoms, weights, x, fx, tol, max_iter=500):
    mass = weights.sum()
    spread = float(np.sqrt(np.average(((atoms - x) ** 2).sum(axis=1), weights=weights)))
    best_x, best_f = x, fx
    for k in range(1, max_iter + 1):
        diff = x - atoms
        dist = np.sqrt((diff**2).sum(axis=1))
        nz = dist > 0
        g = (weights[nz, None] * diff[nz] / dist[nz, None]).sum(axis=0) / mass
        gn = float(np.linalg.norm(g))
        if gn == 0.0:
            break
        step = spread / k
        if step < tol:
            break
        x = x - step * g / gn
        fx = weighted_distance_sum(x, atoms, weights)
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x


def interval_median(edges: np.ndarray, cum: np.ndarray, masses: np.ndarray, a: float, b: float) -> float:
    """Median of a piecewise-constant 1D measure restricted to [a, b].

    ``edges`` are the bin edges, ``cum`` the cumulative mass at each edge and
    ``masses`` the per-bin masses.
    """
    fa, fb = cdf(edges, cum, masses, a), cdf(edges, cum, masses, b)
    target = 0.5 * (fa + fb)
    k = int(np.searchsorted(cum, target, side="left"))
    k = min(max(k, 1), len(edges) - 1)
    bin_ = k - 1
    if masses[bin_] <= 0:
        return float(np.clip(edges[bin_], a, b))
    width = edges[bin_ + 1] - edges[bin_]
    x = edges[bin_] + (target - cum[bin_]) / masses[bin_] * width
    return float(np.clip(x, a, b))


def cdf(edges, cum, masses, x):
    """Cumulative mass of a piecewise-constant measure at x."""
    if x <= edges[0]:
        return 0.0
    if x >= edges[-1]:
        return float(cum[-1])
    k = int(np.searchsorted(edges, x, side="right")) - 1
    width = edges[k + 1] - edges[k]
    return float(cum[k] + masses[k] * (x - edges[k]) / width)
