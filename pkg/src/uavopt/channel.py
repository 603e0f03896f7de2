"""Probabilistic line-of-sight air-to-ground link and its achievable rate."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ANGLE_UNITS = ("radians", "degrees")


@dataclass(frozen=True)
class ChannelParams:
    b: float = 0.43
    c: float = 4.88
    delta: float = 0.5
    gamma: float = 1e5  # linear SNR scale
    r: float = 2.0
    h: float = 300.0
    angle_convention: str = "radians"

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        for name in ("gamma", "h", "b", "c"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.r >= 1:
            raise ValueError("path loss exponent r must be >= 1")
        if self.angle_convention not in ANGLE_UNITS:
            raise ValueError(f"angle_convention must be one of {ANGLE_UNITS}")

    @classmethod
    def from_db(cls, gamma_db: float, **kwargs) -> "ChannelParams":
        return cls(gamma=10.0 ** (gamma_db / 10.0), **kwargs)

    @property
    def gamma_db(self) -> float:
        return 10.0 * math.log10(self.gamma)

    @property
    def angle_scale(self) -> float:
        """Configured angle units per radian."""
        return 1.0 if self.angle_convention == "radians" else 180.0 / math.pi

    def with_altitude(self, h: float) -> "ChannelParams":
        return ChannelParams(self.b, self.c, self.delta, self.gamma, self.r, h, self.angle_convention)


def elevation(params: ChannelParams, dist):
    # arctan2 returns pi/2 at dist = 0 exactly, no special-casing needed
    return np.arctan2(params.h, np.asarray(dist, dtype=float)) * params.angle_scale


def p_los(params: ChannelParams, dist):
    """LOS probability 1 / (1 + c exp(-b (theta - c))) at horizontal distance ``dist``."""
    theta = elevation(params, dist)
    return 1.0 / (1.0 + params.c * np.exp(-params.b * (theta - params.c)))


def _path_gain(params, dist):
    d = np.asarray(dist, dtype=float)
    return (d * d + params.h**2) ** (params.r / 2.0)


def rate_distance(params: ChannelParams, dist):
    """Expected achievable rate (bits/s/Hz) at horizontal distance ``dist``."""
    g = _path_gain(params, dist)
    p = p_los(params, dist)
    los = np.log1p(params.gamma / g) / math.log(2)
    nlos = np.log1p(params.gamma * params.delta / g) / math.log(2)
    return los * p + nlos * (1.0 - p)


def rate_point(params: ChannelParams, uav, q):
    """Rate between a UAV at ground projection ``uav`` and a device at ``q``.

    Both may be scalars (1D) or coordinate arrays along the last axis; they
    broadcast against each other.
    """
    uav = np.asarray(uav, dtype=float)
    q = np.asarray(q, dtype=float)
    if uav.ndim == 0 and q.ndim == 0:
        return float(rate_distance(params, abs(uav - q)))
    diff = uav - q
    dist = np.abs(diff) if (uav.ndim == 0 or q.ndim == 0) else np.linalg.norm(diff, axis=-1)
    return rate_distance(params, dist)


def rate_decomposition(params: ChannelParams, dist):
    """Split the rate as L1(d) * P_LOS(d) + L2(d).

    L1 is the extra rate a LOS link adds over NLOS, L2 the NLOS rate; all
    three parts decrease in d.
    """
    g = _path_gain(params, dist)
    gd = params.gamma * params.delta
    l1 = np.log1p(params.gamma * (1.0 - params.delta) / (g + gd)) / math.log(2)
    l2 = np.log1p(gd / g) / math.log(2)
    return l1, l2, p_los(params, dist)
