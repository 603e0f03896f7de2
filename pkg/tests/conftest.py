import numpy as np
import pytest
from hypothesis import settings

from uavopt.channel import ChannelParams
from uavopt.density import Gaussian2D, Uniform1D

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def base_params():
    # b = 0.43, c = 4.88, gamma = 50 dB, r = 2, delta = 0.5, h = 300 m
    return ChannelParams.from_db(50.0, b=0.43, c=4.88, delta=0.5, r=2.0, h=300.0)


@pytest.fixture
def uniform():
    return Uniform1D(0.0, 1000.0)


@pytest.fixture
def gauss():
    return Gaussian2D((0.0, 0.0), 100.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS] = []


@pytest.fixture
def verdict(request):
    """Record one acceptance line; returns ``ok`` so tests can assert on it."""

    def record(number, title, ok, detail):
        line = f"criterion {number:>2}  {'PASS' if ok else 'FAIL'}  {title}  [{detail}]"
        request.config.stash[_VERDICTS].append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
