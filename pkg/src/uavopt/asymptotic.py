"""Closed-form rate predictions for high altitude / many UAVs, and
quantization-theoretic placement.

Near a UAV the LOS probability is linear in d/h, so to first order the
average rate is a ceiling (the rate at zero distance) minus a slope times
the average device-to-UAV distance. The distance term is the ell-1
distortion, which quantization theory estimates as k_d n^(-1/d) ||f||_alpha.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, rate_decomposition
from .deployment import Deployment, l1_distortion
from .density import DensitySpec, QuadratureConfig, TimeVarying, alpha_norm, lambda_inverse


@dataclass(frozen=True)
class MomentConstants:
    """Normalized first moments of the interval (k1) and regular hexagon (k2)."""

    k1: float = 0.25
    k2: float = (4.0 + math.log(27.0)) / (12.0**0.75 * 3.0)

    def for_dim(self, dim: int) -> float:
        return {1: self.k1, 2: self.k2}[dim]


MOMENTS = MomentConstants()


def c_prime(params: ChannelParams) -> float:
    """c * exp(-b (theta_max - c)); 1 + c' is the inverse LOS probability overhead."""
    theta_max = 0.5 * math.pi * params.angle_scale
    return params.c * math.exp(-params.b * (theta_max - params.c))


def rate_ceiling(params: ChannelParams) -> float:
    """Rate of a device directly below its UAV."""
    cp = c_prime(params)
    h_r = params.h**params.r
    return (math.log2(1 + params.gamma / h_r) / (1 + cp)
            + math.log2(1 + params.gamma * params.delta / h_r) * cp / (1 + cp))


def distortion_slope(params: ChannelParams) -> float:
    """Rate lost per meter of ell-1 distortion, first order in d/h.

    Equals b c' / (h (1+c')^2) * L1(0), where L1(0) = log2((gamma + h^r) /
    (gamma delta + h^r)) is the LOS advantage at zero distance. Positive.
    """
    cp = c_prime(params)
    l1_zero = float(rate_decomposition(params, 0.0)[0])
    # d(theta)/d(d/h) is -1 rad; converted into the configured angle unit
    return params.b * params.angle_scale * cp / (params.h * (1 + cp) ** 2) * l1_zero


def rate_from_distortion(params: ChannelParams, distortion: float) -> float:
    return rate_ceiling(params) - distortion_slope(params) * distortion


def rate_thm2(dep: Deployment, params: ChannelParams, spec: DensitySpec,
              quad: QuadratureConfig | None = None) -> float:
    """First-order rate of a deployment from its ell-1 distortion."""
    if not math.isclose(dep.altitude, params.h, rel_tol=1e-12):
        raise ValueError("deployment altitude differs from channel altitude")
    return rate_from_distortion(params, l1_distortion(dep, spec, quad))


def asymptotic_distortion(n: int, spec: DensitySpec) -> float:
    """k_d n^(-1/d) ||f||_{d/(d+1)}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return MOMENTS.for_dim(spec.dim) * n ** (-1.0 / spec.dim) * alpha_norm(spec)


def rate_thm3(n: int, params: ChannelParams, spec: DensitySpec) -> float:
    """First-order optimal rate with n UAVs, using the asymptotic distortion."""
    return rate_from_distortion(params, asymptotic_distortion(n, spec))


def qt_deployment_1d(n: int, spec: DensitySpec, altitude: float = 1.0) -> Deployment:
    """Place UAV i at the (2i-1)/(2n) quantile of the Zador density."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if spec.dim != 1:
        raise ValueError("quantile placement is only defined in 1D")
    xs = [lambda_inverse(spec, (2 * i - 1) / (2 * n)) for i in range(1, n + 1)]
    return Deployment(np.sort(xs), altitude)


def qt_trajectory(n: int, family: TimeVarying, times, altitude: float = 1.0) -> list[tuple[float, Deployment]]:
    return [(float(t), qt_deployment_1d(n, family.at(t), altitude)) for t in times]


def power_law_trajectory(n: int, t: float) -> np.ndarray:
    """Closed-form quantile placement for the power-law family at time t."""
    s = abs(t)
    i = np.arange(1, n + 1)
    return 2 - 2 * s + ((2 * i - 1) / (2 * n)) ** (1 / (1 + s))
