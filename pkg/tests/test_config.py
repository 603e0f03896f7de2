import numpy as np
import pytest

from uavopt.config import load_config, parse_config
from uavopt.density import Gaussian2D, PiecewisePoly1D, TimeVarying, Uniform1D
from uavopt.errors import ConfigError

BASE = """\
density.kind = uniform1d
density.lo = 0
density.hi = 1000
channel.delta = 0.5
"""


def test_defaults():
    cfg = parse_config(BASE)
    assert cfg.density == Uniform1D(0.0, 1000.0)
    assert cfg.channel.gamma == pytest.approx(1e5)
    assert (cfg.channel.b, cfg.channel.c, cfg.channel.r, cfg.channel.h) == (0.43, 4.88, 2.0, 300.0)
    assert cfg.sweep_h == [300.0]
    assert cfg.pso_enabled and cfg.pso.swarm_size == 40
    assert len(cfg.times) == 41


def test_lists_and_ranges():
    cfg = parse_config(BASE + "sweep.n = 1..4, 8\nsweep.h = 80, 300\n")
    assert cfg.sweep_n == [1, 2, 3, 4, 8]
    assert cfg.sweep_h == [80.0, 300.0]


def test_other_density_kinds():
    g = parse_config("density.kind = gaussian2d\ndensity.sigma2 = 100\ndensity.mean = 1, -2\n")
    assert g.density == Gaussian2D((1.0, -2.0), 100.0)
    pp = parse_config("density.kind = piecewise_poly1d\ndensity.segments = 0 1 : 0.25 ; 1 2 : 1.5 -0.5\n")
    assert isinstance(pp.density, PiecewisePoly1D)
    fam = parse_config("density.kind = power_law_family\n")
    assert isinstance(fam.density, TimeVarying) and fam.time_varying


def test_eval_deployment_parsing():
    cfg = parse_config(BASE + "eval.deployment = 100, 300, 500\n")
    np.testing.assert_array_equal(cfg.deployment[:, 0], [100, 300, 500])
    g = parse_config("density.kind = gaussian2d\ndensity.sigma2 = 100\neval.deployment = 0 1; 2 3\n")
    assert g.deployment.shape == (2, 2)


@pytest.mark.parametrize("text, line, field", [
    (BASE + "channel.delta2 = 0.5\n", 5, "channel.delta2"),
    (BASE + "channel.delta = 0.3\n", 5, "channel.delta"),
    (BASE + "sweep.n = two\n", 5, "sweep.n"),
    (BASE + "just words\n", 5, None),
    ("density.kind = cone\n", 1, "density.kind"),
    (BASE + "sweep.n = 0..3\n", 5, "sweep.n"),
    (BASE + "eval.n = 2\neval.deployment = 1, 2, 3\n", 5, "eval.n"),
])
def test_diagnostics_name_line_and_field(text, line, field):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line
    assert info.value.field == field
    assert f"line {line}" in str(info.value)


def test_invalid_channel_value_points_at_block():
    with pytest.raises(ConfigError) as info:
        parse_config(BASE.replace("0.5", "1.5"))
    assert info.value.field == "channel"
    assert info.value.line == 4


def test_missing_kind():
    with pytest.raises(ConfigError, match="density.kind"):
        parse_config("channel.h = 10\n")


def test_hash_ignores_output_dir_and_comments():
    a = parse_config(BASE + "output.dir = a\n")
    b = parse_config("# comment\n" + BASE + "output.dir = b   # trailing\n")
    assert a.config_hash == b.config_hash
    c = parse_config(BASE + "channel.h = 80\n")
    assert c.config_hash != a.config_hash
    assert len(a.config_hash) == 12


def test_overrides_change_hash():
    a = parse_config(BASE)
    b = parse_config(BASE, {"lloyd.seed": "7"})
    assert b.lloyd.seed == 7 and a.config_hash != b.config_hash
    with pytest.raises(ConfigError):
        parse_config(BASE, {"nope.key": "1"})


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.ini")


def test_shipped_configs_parse():
    from pathlib import Path

    paths = sorted(Path(__file__).resolve().parent.parent.joinpath("configs").glob("*.ini"))
    assert len(paths) >= 4
    for p in paths:
        load_config(p)
