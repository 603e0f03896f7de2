import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavopt.density import Gaussian2D, PowerLaw1D, QuadratureConfig, Uniform1D, quadrature_grid
from uavopt.deployment import l1_distortion, nearest_distances
from uavopt.solvers import LloydConfig, lloyd_l1
from uavopt.solvers.median import geometric_median, interval_median, subgradient_norm

GRID_STEP = 1000 / 2000


@pytest.mark.parametrize("n", [2, 4, 5, 8])
def test_uniform_optimum_from_qt_seed(uniform, n):
    res = lloyd_l1(n, uniform)
    xs = res.deployment.points[:, 0]
    np.testing.assert_allclose(xs, (2 * np.arange(1, n + 1) - 1) / (2 * n) * 1000, atol=GRID_STEP)
    assert res.distortion == pytest.approx(250 / n, rel=1e-3)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_uniform_optimum_from_random_start(uniform, seed):
    cfg = LloydConfig(init="random", seed=seed, distortion_rel_tol=1e-12, max_iters=2000)
    res = lloyd_l1(5, uniform, cfg)
    np.testing.assert_allclose(res.deployment.points[:, 0], [100, 300, 500, 700, 900], atol=GRID_STEP)
    assert res.distortion == pytest.approx(50.0, abs=0.5)


def test_single_uav_is_median_after_one_update(uniform):
    res = lloyd_l1(1, uniform, LloydConfig(init="user", points=[37.0]))
    assert res.history[1] == pytest.approx(250.0, rel=1e-12)
    assert res.deployment.points[0, 0] == pytest.approx(500.0, abs=1e-9)


def test_single_uav_gaussian_at_mean(gauss):
    res = lloyd_l1(1, gauss, LloydConfig(median_tol=1e-10))
    np.testing.assert_allclose(res.deployment.points[0], [0.0, 0.0], atol=1e-6)


def _subgradient_ratios(points, spec, x_of_cell):
    nodes, weights = quadrature_grid(spec, 300)
    owner, _ = nearest_distances(points, nodes)
    out = []
    for i, x in enumerate(points):
        sel = owner == i
        mass = weights[sel].sum()
        out.append(subgradient_norm(x_of_cell(x, nodes[sel], weights[sel]), nodes[sel], weights[sel]) / mass)
    return out


def test_median_update_meets_subgradient_bound(gauss):
    pts = np.array([[-8.0, -3.0], [5.0, 9.0], [11.0, -6.0], [0.5, 0.5]])
    ratios = _subgradient_ratios(pts, gauss, lambda x, a, w: geometric_median(a, w, x0=x))
    assert max(ratios) <= 1e-6


def test_converged_gaussian_cells_meet_subgradient_bound(gauss):
    res = lloyd_l1(4, gauss, LloydConfig(distortion_rel_tol=1e-9, max_iters=500))
    assert res.converged
    assert max(_subgradient_ratios(res.deployment.points, gauss, lambda x, a, w: x)) <= 1e-6


def test_geometric_median_condition():
    rng = np.random.default_rng(3)
    atoms = rng.normal(size=(400, 2))
    w = rng.uniform(0.1, 1.0, size=400)
    x = geometric_median(atoms, w, tol=1e-12)
    assert subgradient_norm(x, atoms, w) <= 1e-6 * w.sum()


def test_geometric_median_heavy_atom():
    atoms = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    w = np.array([10.0, 1.0, 1.0, 1.0])
    x = geometric_median(atoms, w, x0=np.array([0.5, 0.5]))
    assert np.linalg.norm(x) < 1e-5
    assert subgradient_norm(np.zeros(2), atoms, w) == 0.0


def test_interval_median_uniform_bins():
    edges = np.linspace(0, 10, 11)
    masses = np.full(10, 0.1)
    cum = np.concatenate([[0.0], np.cumsum(masses)])
    assert interval_median(edges, cum, masses, 2.0, 7.0) == pytest.approx(4.5)
    assert interval_median(edges, cum, masses, 0.0, 10.0) == pytest.approx(5.0)


def test_sign_condition_within_one_grid_step():
    # f(q) = 3 q^2 on [0, 1]; the exact conditional median of [a, b] is ((a^3 + b^3) / 2)^(1/3)
    spec = PowerLaw1D(0.0, 1.0, 2.0)
    res = lloyd_l1(6, spec, LloydConfig(init="random", seed=4, distortion_rel_tol=1e-12))
    xs = res.deployment.points[:, 0]
    bounds = np.concatenate([[0.0], (xs[:-1] + xs[1:]) / 2, [1.0]])
    exact = ((bounds[:-1] ** 3 + bounds[1:] ** 3) / 2) ** (1 / 3)
    assert np.max(np.abs(xs - exact)) <= 1 / 2000


@settings(max_examples=15)
@given(st.integers(1, 9), st.integers(0, 10_000), st.sampled_from(["uniform", "power", "gauss"]))
def test_history_non_increasing(n, seed, which):
    spec = {"uniform": Uniform1D(0, 1000), "power": PowerLaw1D(0.0, 1.0, 1.5),
            "gauss": Gaussian2D((0.0, 0.0), 100.0)}[which]
    quad = QuadratureConfig(resolution=60) if which == "gauss" else None
    init = "random" if spec.dim == 1 else "kmeans++"
    res = lloyd_l1(n, spec, LloydConfig(init=init, seed=seed, max_iters=40), quad)
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))


def test_frozen_empty_cell(uniform):
    cfg = LloydConfig(init="user", points=[100.0, 200.0, 5000.0], max_iters=5, distortion_rel_tol=1e-15)
    res = lloyd_l1(3, uniform, cfg)
    assert 5000.0 in res.deployment.points[:, 0]
    assert res.degenerate_iterations >= 1
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))


def test_coincident_start_separates(uniform):
    cfg = LloydConfig(init="user", points=[400.0, 400.0, 600.0], distortion_rel_tol=1e-12, max_iters=500)
    res = lloyd_l1(3, uniform, cfg)
    assert res.degenerate_iterations >= 1
    assert len(np.unique(res.deployment.points)) == 3
    assert res.distortion < l1_distortion(res.deployment.__class__([400.0, 400.0, 600.0], 1.0), uniform)


def test_bit_reproducible(gauss, uniform):
    quad = QuadratureConfig(resolution=80)
    a = lloyd_l1(3, gauss, LloydConfig(seed=11), quad)
    b = lloyd_l1(3, gauss, LloydConfig(seed=11), quad)
    assert a.history == b.history
    assert a.deployment == b.deployment
    c = lloyd_l1(4, uniform, LloydConfig(init="random", seed=5))
    d = lloyd_l1(4, uniform, LloydConfig(init="random", seed=5))
    assert c.history == d.history


def test_progress_records(uniform):
    recs = []
    lloyd_l1(3, uniform, LloydConfig(init="random", seed=1), progress=recs.append)
    assert recs and set(recs[0]) == {"iter", "objective", "wallclock_ms"}
    assert [r["iter"] for r in recs] == list(range(1, len(recs) + 1))


@pytest.mark.parametrize("kwargs", [dict(max_iters=0), dict(distortion_rel_tol=0.0), dict(init="lbg"),
                                    dict(median_tol=-1.0)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        LloydConfig(**kwargs)


def test_qt_seed_rejected_in_2d(gauss):
    with pytest.raises(ValueError):
        lloyd_l1(2, gauss, LloydConfig(init="qt_seed"))
