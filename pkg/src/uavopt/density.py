"""IoT device densities and the integrals taken against them.

Points follow one convention throughout the package: a 1D density takes
scalars or arrays of shape ``(m,)``; a 2D density takes a single point of
shape ``(2,)`` or arrays of shape ``(m, 2)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np
from scipy import integrate as spi
from scipy import optimize as spo
from scipy.special import erf

from .errors import NumericalError

GAUSSIAN_HALF_WIDTH = 6.0  # support is mean +/- 6 sigma per axis
NORMALIZATION_TOL = 1e-6
DEFAULT_GRID_1D = 2000
DEFAULT_GRID_2D = 300
DEFAULT_MC_SAMPLES = 100_000
_CDF_SEGMENTS = 256

METHODS = ("fixed-grid", "adaptive", "monte-carlo")


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class QuadratureConfig:
    method: str = "fixed-grid"
    resolution: int | None = None  # points per axis, or sample count for monte-carlo
    seed: int = 0
    atol: float = 1e-10

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.resolution is not None and self.resolution < 2:
            raise ValueError("quadrature resolution must be >= 2")
        if not self.atol > 0:
            raise ValueError("quadrature tolerance must be positive")

    def points_per_axis(self, dim: int) -> int:
        if self.resolution is not None:
            return self.resolution
        return DEFAULT_GRID_1D if dim == 1 else DEFAULT_GRID_2D


class DensitySpec:
    """Base class for densities on R^d with a bounded integration support."""

    dim: int = 1

    @property
    def support(self) -> np.ndarray:
        """Array of shape (dim, 2) holding [lo, hi] per axis."""
        raise NotImplementedError

    def _pdf(self, pts: np.ndarray) -> np.ndarray:
        """Density at canonical points of shape (m, dim), ignoring support."""
        raise NotImplementedError

    def breakpoints(self) -> tuple[float, ...]:
        """Interior points where a 1D density is not smooth."""
        return ()

    def tail_power_mass(self, alpha: float) -> float:
        """Relative mass of f**alpha lying outside the support."""
        return 0.0

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw canonical points (size, dim) by rejection against a flat envelope."""
        lo, hi = self.support.T
        nodes, _ = quadrature_grid(self, 4096 if self.dim == 1 else 200)
        envelope = 1.05 * float(self._pdf(nodes).max())
        out = []
        have = 0
        while have < size:
            cand = rng.uniform(lo, hi, size=(2 * (size - have) + 16, self.dim))
            keep = rng.uniform(0.0, envelope, size=len(cand)) < self._pdf(cand)
            out.append(cand[keep])
            have += int(keep.sum())
        return np.concatenate(out)[:size]

    def _check_normalized(self):
        mass = _adaptive(self, lambda q: np.ones(np.shape(q)[0]), atol=1e-12)
        if abs(mass - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"density integrates to {mass:.9g}, not 1")

    @cached_property
    def _alpha_integral(self) -> float:
        alpha = self.dim / (self.dim + 1)
        quad = QuadratureConfig("adaptive") if self.dim == 1 else QuadratureConfig()
        return _integrate_power(self, alpha, quad)

    @cached_property
    def _zador_cdf_table(self) -> tuple[np.ndarray, np.ndarray]:
        (lo, hi), = self.support
        edges = np.linspace(lo, hi, _CDF_SEGMENTS + 1)
        seg = np.array([_zador_segment(self, a, b) for a, b in zip(edges[:-1], edges[1:])])
        return edges, np.concatenate([[0.0], np.cumsum(seg)])


@dataclass(frozen=True)
class Uniform1D(DensitySpec):
    lo: float
    hi: float
    dim: int = field(default=1, init=False)

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("Uniform1D needs hi > lo")

    @property
    def support(self):
        return np.array([[self.lo, self.hi]], dtype=float)

    def _pdf(self, pts):
        return np.full(len(pts), 1.0 / (self.hi - self.lo))

    def sample(self, rng, size):
        return rng.uniform(self.lo, self.hi, size=(size, 1))


@dataclass(frozen=True)
class Gaussian2D(DensitySpec):
    """Isotropic normal with variance ``sigma2`` per axis, truncated at 6 sigma."""

    mean: tuple[float, float] = (0.0, 0.0)
    sigma2: float = 1.0
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError("Gaussian2D needs sigma2 > 0")
        object.__setattr__(self, "mean", tuple(float(m) for m in self.mean))

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def support(self):
        w = GAUSSIAN_HALF_WIDTH * self.sigma
        return np.array([[m - w, m + w] for m in self.mean])

    @property
    def truncation_mass(self) -> float:
        """Probability mass of the untruncated normal outside the support box."""
        return self.tail_power_mass(1.0)

    def tail_power_mass(self, alpha):
        # f**alpha is proportional to a normal with variance sigma2 / alpha
        inside = erf(GAUSSIAN_HALF_WIDTH * math.sqrt(alpha) / math.sqrt(2.0)) ** 2
        return 1.0 - inside

    def _pdf(self, pts):
        r2 = ((pts - np.asarray(self.mean)) ** 2).sum(axis=1)
        return np.exp(-r2 / (2 * self.sigma2)) / (2 * math.pi * self.sigma2)

    def sample(self, rng, size):
        lo, hi = self.support.T
        out = np.empty((0, 2))
        while len(out) < size:
            cand = rng.normal(self.mean, self.sigma, size=(size, 2))
            ok = np.all((cand >= lo) & (cand <= hi), axis=1)
            out = np.concatenate([out, cand[ok]])
        return out[:size]


@dataclass(frozen=True)
class PiecewisePoly1D(DensitySpec):
    """Density made of polynomial pieces.

    ``segments`` is a sequence of ``((a, b), coeffs)`` with coefficients in
    ascending powers of q. Segments must be contiguous.
    """

    segments: tuple
    dim: int = field(default=1, init=False)

    def __post_init__(self):
        segs = tuple(((float(a), float(b)), tuple(float(c) for c in cs)) for (a, b), cs in self.segments)
        if not segs:
            raise ValueError("PiecewisePoly1D needs at least one segment")
        for ((a, b), _), ((a2, _b2), _) in zip(segs, segs[1:]):
            if not math.isclose(b, a2, abs_tol=1e-12):
                raise ValueError("segments must be contiguous")
        if any(not b > a for (a, b), _ in segs):
            raise ValueError("each segment needs b > a")
        object.__setattr__(self, "segments", segs)
        grid = np.linspace(segs[0][0][0], segs[-1][0][1], 4001)
        if np.any(self._raw(grid) < -1e-12):
            raise ValueError("PiecewisePoly1D pdf is negative on its support")
        self._check_normalized()

    @property
    def support(self):
        return np.array([[self.segments[0][0][0], self.segments[-1][0][1]]])

    def breakpoints(self):
        return tuple(b for (_, b), _ in self.segments[:-1])

    def _pdf(self, pts):
        return np.maximum(self._raw(pts[:, 0]), 0.0)

    def _raw(self, q):
        out = np.zeros(len(q))
        edges = [a for (a, _), _ in self.segments] + [self.segments[-1][0][1]]
        idx = np.clip(np.searchsorted(edges, q, side="right") - 1, 0, len(self.segments) - 1)
        for k, (_, coeffs) in enumerate(self.segments):
            sel = idx == k
            out[sel] = np.polynomial.polynomial.polyval(q[sel], coeffs)
        return out


@dataclass(frozen=True)
class PowerLaw1D(DensitySpec):
    """f(q) proportional to (q - lo)**exponent on [lo, hi]."""

    lo: float
    hi: float
    exponent: float = 0.0
    dim: int = field(default=1, init=False)

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("PowerLaw1D needs hi > lo")
        if self.exponent < 0:
            raise ValueError("PowerLaw1D needs exponent >= 0")

    @property
    def support(self):
        return np.array([[self.lo, self.hi]], dtype=float)

    def _pdf(self, pts):
        a = self.exponent
        width = self.hi - self.lo
        u = np.clip(pts[:, 0] - self.lo, 0.0, None)
        return (1 + a) * u**a / width ** (1 + a)

    def sample(self, rng, size):
        u = rng.uniform(size=(size, 1))
        return self.lo + (self.hi - self.lo) * u ** (1.0 / (1.0 + self.exponent))


@dataclass(frozen=True)
class TimeVarying:
    """A family t -> 1D density for t in ``t_range``; evaluated lazily per t."""

    family: Callable[[float], DensitySpec]
    t_range: tuple[float, float] = (-1.0, 1.0)
    name: str = "custom"
    dim: int = field(default=1, init=False)

    def at(self, t: float) -> DensitySpec:
        lo, hi = self.t_range
        if not lo <= t <= hi:
            raise ValueError(f"t={t} outside {self.t_range}")
        spec = self.family(float(t))
        if spec.dim != 1:
            raise ValueError("time-varying families must yield 1D densities")
        return spec


def _power_member(t: float) -> PowerLaw1D:
    s = abs(t)
    return PowerLaw1D(2 - 2 * s, 3 - 2 * s, 2 * s)


def power_law_family() -> TimeVarying:
    """f_t(q) = (1+2|t|)(q-2+2|t|)^{2|t|} on [2-2|t|, 3-2|t|], t in [-1, 1]."""
    return TimeVarying(_power_member, (-1.0, 1.0), "power_law")


# ---------------------------------------------------------------- points


def as_points(spec, q) -> tuple[np.ndarray, bool]:
    """Canonical (m, dim) view of ``q`` plus a flag telling whether q was a single point."""
    arr = np.asarray(q, dtype=float)
    if spec.dim == 1:
        if arr.ndim == 0:
            return arr.reshape(1, 1), True
        if arr.ndim == 1:
            return arr[:, None], False
        if arr.ndim == 2 and arr.shape[1] == 1:
            return arr, False
    else:
        if arr.ndim == 1 and arr.shape[0] == spec.dim:
            return arr[None, :], True
        if arr.ndim == 2 and arr.shape[1] == spec.dim:
            return arr, False
    raise ValueError(f"point array of shape {arr.shape} does not match dimension {spec.dim}")


def user_view(spec, pts: np.ndarray) -> np.ndarray:
    return pts[:, 0] if spec.dim == 1 else pts


def _inside(spec, pts):
    lo, hi = spec.support.T
    return np.all((pts >= lo) & (pts <= hi), axis=1)


def pdf(spec: DensitySpec, q):
    """Density value(s) at q; zero outside the support."""
    _require_density(spec)
    pts, single = as_points(spec, q)
    val = np.where(_inside(spec, pts), spec._pdf(pts), 0.0)
    return float(val[0]) if single else val


def _require_density(spec):
    if isinstance(spec, TimeVarying):
        raise TypeError("use family.at(t) to get a density from a TimeVarying family")


# ------------------------------------------------------------ quadrature


@lru_cache(maxsize=64)
def quadrature_grid(spec: DensitySpec, per_axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint nodes (m, dim) and weights pdf*cell volume over the support."""
    axes = []
    vol = 1.0
    for lo, hi in spec.support:
        step = (hi - lo) / per_axis
        axes.append(lo + step * (np.arange(per_axis) + 0.5))
        vol *= step
    if spec.dim == 1:
        nodes = axes[0][:, None]
    else:
        gx, gy = np.meshgrid(*axes, indexing="ij")
        nodes = np.column_stack([gx.ravel(), gy.ravel()])
    weights = spec._pdf(nodes) * vol
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def _checked(values, m):
    values = np.broadcast_to(np.asarray(values, dtype=float), (m,))
    if not np.all(np.isfinite(values)):
        raise NumericalError("integrand is not finite on the support")
    return values


def _adaptive(spec, g, atol=1e-10, extra_breaks=()):
    if spec.dim == 1:
        (lo, hi), = spec.support
        brk = sorted({float(b) for b in (*spec.breakpoints(), *extra_breaks) if lo < b < hi})

        def scalar(x):
            pts = np.array([[x]])
            return float(_checked(g(user_view(spec, pts)), 1)[0] * spec._pdf(pts)[0])

        val, _ = spi.quad(scalar, lo, hi, points=brk or None, limit=500, epsabs=atol, epsrel=1e-10)
        return float(val)

    def vec(x):
        x = np.atleast_2d(x)
        return _checked(g(x), len(x)) * spec._pdf(x)

    lo, hi = spec.support.T
    res = spi.cubature(vec, lo, hi, atol=atol, rtol=1e-8, max_subdivisions=20000)
    return float(res.estimate)


def monte_carlo(spec: DensitySpec, g, samples: int = DEFAULT_MC_SAMPLES, seed: int = 0):
    """Plain Monte Carlo estimate of E_f[g] and its standard error."""
    _require_density(spec)
    rng = np.random.default_rng(seed)
    pts = spec.sample(rng, samples)
    vals = _checked(g(user_view(spec, pts)), len(pts))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals)))


def integrate(spec: DensitySpec, g, quad: QuadratureConfig | None = None, breaks=()) -> float:
    """Approximate the integral of g(q) f(q) over the support.

    ``g`` is vectorized: it receives points in the user view (see module
    docstring) and returns one value per point. ``breaks`` are extra 1D
    kink locations handed to the adaptive rule.
    """
    _require_density(spec)
    quad = quad or QuadratureConfig()
    if quad.method == "fixed-grid":
        nodes, weights = quadrature_grid(spec, quad.points_per_axis(spec.dim))
        vals = _checked(g(user_view(spec, nodes)), len(nodes))
        return float(vals @ weights)
    if quad.method == "adaptive":
        return _adaptive(spec, g, quad.atol, breaks)
    est, _ = monte_carlo(spec, g, quad.resolution or DEFAULT_MC_SAMPLES, quad.seed)
    return est


# ---------------------------------------------------- quantization theory


def _integrate_power(spec, alpha, quad):
    """Integral of f**alpha over the support."""
    if quad.method == "fixed-grid":
        nodes, _ = quadrature_grid(spec, quad.points_per_axis(spec.dim))
        vol = np.prod((spec.support[:, 1] - spec.support[:, 0]) / quad.points_per_axis(spec.dim))
        return float((spec._pdf(nodes) ** alpha).sum() * vol)
    if quad.method == "monte-carlo":
        # E_f[f^(alpha-1)] is unbounded where f vanishes; use the grid instead
        return _integrate_power(spec, alpha, QuadratureConfig(resolution=quad.resolution))
    if spec.dim == 1:
        (lo, hi), = spec.support
        val, _ = spi.quad(lambda x: spec._pdf(np.array([[x]]))[0] ** alpha, lo, hi,
                          points=spec.breakpoints() or None, limit=500, epsabs=1e-13, epsrel=1e-12)
        return float(val)
    lo, hi = spec.support.T
    res = spi.cubature(lambda x: spec._pdf(np.atleast_2d(x)) ** alpha, lo, hi, rtol=1e-10)
    return float(res.estimate)


def alpha_norm(spec: DensitySpec, quad: QuadratureConfig | None = None) -> float:
    """||f||_alpha with alpha = d/(d+1).

    Emits a TruncationWarning when a noticeable share of f**alpha lies outside
    the finite integration support.
    """
    _require_density(spec)
    alpha = spec.dim / (spec.dim + 1)
    tail = spec.tail_power_mass(alpha)
    if tail > 1e-4:
        warnings.warn(f"support truncates {tail:.2e} of the alpha-power mass", TruncationWarning, stacklevel=2)
    total = spec._alpha_integral if quad is None else _integrate_power(spec, alpha, quad)
    return total ** (1.0 / alpha)


def zador_density(spec: DensitySpec, q):
    """Asymptotically optimal ell-1 point density f^(d/(d+1)) / integral of the same."""
    _require_density(spec)
    alpha = spec.dim / (spec.dim + 1)
    pts, single = as_points(spec, q)
    val = np.where(_inside(spec, pts), spec._pdf(pts) ** alpha, 0.0) / spec._alpha_integral
    return float(val[0]) if single else val


def _zador_segment(spec, a, b):
    if b <= a:
        return 0.0
    alpha = spec.dim / (spec.dim + 1)
    brk = [p for p in spec.breakpoints() if a < p < b]
    val, _ = spi.quad(lambda x: spec._pdf(np.array([[x]]))[0] ** alpha, a, b,
                      points=brk or None, limit=200, epsabs=1e-14, epsrel=1e-12)
    return val / spec._alpha_integral


def lambda_inverse(spec: DensitySpec, x: float) -> float:
    """Position where the cumulative Zador density of a 1D spec reaches x."""
    _require_density(spec)
    if spec.dim != 1:
        raise ValueError("lambda_inverse needs a 1D density")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    (lo, hi), = spec.support
    if x == 0.0:
        return float(lo)
    if x == 1.0:
        return float(hi)
    edges, cum = spec._zador_cdf_table
    j = int(np.clip(np.searchsorted(cum, x, side="left") - 1, 0, len(edges) - 2))
    a, b = edges[j], edges[j + 1]

    def resid(m):
        return cum[j] + _zador_segment(spec, a, m) - x

    ra, rb = resid(a), resid(b)
    if ra >= 0:
        return float(a)
    if rb <= 0:
        return float(b)
    return float(spo.bisect(resid, a, b, xtol=1e-9 * (hi - lo), rtol=4 * np.finfo(float).eps))
