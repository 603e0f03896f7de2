import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uavopt.channel import ChannelParams, p_los, rate_decomposition, rate_distance, rate_point

params_st = st.builds(
    ChannelParams,
    b=st.floats(0.05, 2.0),
    c=st.floats(0.5, 20.0),
    delta=st.floats(0.01, 0.99),
    gamma=st.floats(1e-2, 1e8),
    r=st.floats(1.0, 4.0),
    h=st.floats(1.0, 2000.0),
)


def _oracle_rate(p, d):
    # straight transcription of the two-state mixture, one factor at a time
    theta = math.atan(p.h / d) if d > 0 else math.pi / 2
    plos = 1 / (1 + p.c * math.exp(-p.b * (theta - p.c)))
    g = (d * d + p.h * p.h) ** (p.r / 2)
    return math.log2(1 + p.gamma / g) * plos + math.log2(1 + p.gamma * p.delta / g) * (1 - plos)


def test_p_los_at_zero_distance():
    p = ChannelParams(b=0.43, c=4.88, h=300.0)
    c_prime = 4.88 * math.exp(-0.43 * (math.pi / 2 - 4.88))
    assert c_prime == pytest.approx(20.249, abs=1e-3)
    assert float(p_los(p, 0.0)) == pytest.approx(1 / (1 + c_prime), rel=1e-14)
    assert float(p_los(p, 0.0)) == pytest.approx(0.04706, abs=1e-5)


def test_p_los_far_limit():
    p = ChannelParams(b=0.43, c=4.88, h=300.0)
    assert float(p_los(p, 1e12)) == pytest.approx(1 / (1 + 4.88 * math.exp(0.43 * 4.88)), rel=1e-9)


def test_degrees_convention():
    p = ChannelParams(b=0.43, c=4.88, h=300.0, angle_convention="degrees")
    assert float(p_los(p, 0.0)) == pytest.approx(1 / (1 + 4.88 * math.exp(-0.43 * (90 - 4.88))), rel=1e-14)


def test_rate_at_zero_distance(base_params):
    expected = 0.04706116 * math.log2(1 + 1e5 / 9e4) + (1 - 0.04706116) * math.log2(1 + 5e4 / 9e4)
    assert rate_point(base_params, 0.0, 0.0) == pytest.approx(expected, rel=1e-7)
    assert rate_point(base_params, 0.0, 0.0) == pytest.approx(0.658164, abs=1e-6)


def test_rate_point_2d(base_params):
    uav, q = np.array([3.0, 4.0]), np.array([0.0, 0.0])
    assert rate_point(base_params, uav, q) == pytest.approx(_oracle_rate(base_params, 5.0), rel=1e-13)
    many = rate_point(base_params, uav, np.zeros((4, 2)))
    assert many.shape == (4,)


def test_delta_to_one_limit():
    p = ChannelParams(delta=1 - 1e-12, gamma=1e5, h=300.0)
    for d in (0.0, 100.0, 700.0):
        assert float(rate_distance(p, d)) == pytest.approx(math.log2(1 + 1e5 / (d * d + 9e4)), rel=1e-9)


def test_decomposition_nlos_part(base_params):
    _, l2, _ = rate_decomposition(base_params, 0.0)
    assert float(l2) == pytest.approx(math.log2(1 + 5e4 / 9e4), rel=1e-14)
    assert float(l2) == pytest.approx(0.6374, abs=1e-4)


@given(params_st, st.floats(0.0, 1e5))
def test_decomposition_identity(p, d):
    l1, l2, plos = rate_decomposition(p, d)
    total = float(rate_distance(p, d))
    assert abs(l1 * plos + l2 - total) <= 1e-12 * abs(total)


@given(params_st, st.floats(0.0, 1e4))
def test_rate_matches_oracle(p, d):
    assert float(rate_distance(p, d)) == pytest.approx(_oracle_rate(p, d), rel=1e-10)


@given(params_st, st.floats(0.0, 5e3), st.floats(1e-3, 5e3))
def test_parts_strictly_decrease(p, d, step):
    a = rate_decomposition(p, d)
    b = rate_decomposition(p, d + step)
    # strict in exact arithmetic; allow ties only once the values underflow to rounding
    for x, y in zip(a, b):
        assert y <= x
    assert float(rate_distance(p, d + step)) <= float(rate_distance(p, d))


@given(params_st, st.floats(0.0, 1e3))
def test_p_los_is_probability(p, d):
    v = float(p_los(p, d))
    assert 0.0 < v < 1.0


def test_rate_strictly_decreasing_on_rays(rng, base_params):
    for _ in range(20):
        direction = rng.normal(size=2)
        direction /= np.linalg.norm(direction)
        origin = rng.uniform(-500, 500, size=2)
        steps = np.linspace(0, 2000, 400)[:, None] * direction
        rates = rate_point(base_params, origin, origin + steps)
        assert np.all(np.diff(rates) < 0)


def test_p_los_linearization_residual_decays():
    # residual of 1/(1+c') - b c' d / (h (1+c')^2) is o(d/h): halving d/h <= 1e-2 shrinks it >= 3x
    p = ChannelParams(b=0.43, c=4.88, h=300.0)
    cp = p.c * math.exp(-p.b * (math.pi / 2 - p.c))

    def resid(t):
        return abs(float(p_los(p, t * p.h)) - (1 / (1 + cp) - p.b * cp * t / (1 + cp) ** 2))

    for t in (1e-2, 5e-3, 2.5e-3):
        assert resid(t) / resid(t / 2) >= 3.0


def test_log_rate_expansion_is_superlinear():
    # log2(1 + gamma/(d^2+h^2)^(r/2)) against its value at d=0 minus the d^2 term
    p = ChannelParams(gamma=1e5, h=300.0, r=2.0)

    def resid(t):
        d = t * p.h
        exact = math.log2(1 + p.gamma / (d * d + p.h**2) ** (p.r / 2))
        approx = math.log2(1 + p.gamma / p.h**p.r) - p.r * d * d / (2 * math.log(2) * p.h**2 * (p.gamma + p.h**p.r)) * p.gamma
        return abs(exact - approx)

    ratios = [resid(t) / resid(t / 2) for t in (0.2, 0.1, 0.05)]
    assert all(r > 2.0 for r in ratios)


@pytest.mark.parametrize("kwargs", [dict(delta=0.0), dict(delta=1.0), dict(gamma=-1.0), dict(h=0.0),
                                    dict(b=0.0), dict(c=-1.0), dict(r=0.5), dict(angle_convention="grad")])
def test_invalid_params(kwargs):
    with pytest.raises(ValueError):
        ChannelParams(**kwargs)


def test_gamma_db_round_trip():
    p = ChannelParams.from_db(50.0)
    assert p.gamma == pytest.approx(1e5)
    assert p.gamma_db == pytest.approx(50.0)
