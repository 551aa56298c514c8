import math

import numpy as np
import pytest
from scipy import stats

from levyhunt import Atoms, Ensemble, Hyperplane, LevyTriplet, PointTube, PowerTerm, SimPlan, SubspaceTube
from levyhunt import empirical_cf, hitting_estimate, psi_values, simulate_paths

from helpers import DRIFT_DIAGONAL, line, sym_stable_1d

BM = LevyTriplet.brownian(1)
CP = LevyTriplet([0.0], None, [Atoms([[2.0]], [3.0])])


def test_plan_validation():
    for bad in (dict(horizon=0), dict(step_count=0), dict(small_jump_cutoff=0.0), dict(small_jump_cutoff=1.5), dict(paths=0), dict(seed=-1)):
        with pytest.raises(ValueError):
            SimPlan(**bad)


def test_reproducible_and_seed_dependent():
    t = LevyTriplet([0.2], [[1.0]], [Atoms([[0.5], [-1.5]], [1.0, 2.0])])
    plan = SimPlan(paths=200, step_count=20, seed=7)
    a, b = simulate_paths(t, plan), simulate_paths(t, plan)
    assert np.array_equal(a.X, b.X) and np.array_equal(a.jump_time, b.jump_time)
    c = simulate_paths(t, SimPlan(paths=200, step_count=20, seed=8))
    assert not np.array_equal(a.X, c.X)


def test_paths_do_not_depend_on_ensemble_size():
    plan = SimPlan(paths=50, step_count=10, seed=3)
    small = simulate_paths(BM, plan)
    big = simulate_paths(BM, SimPlan(paths=120, step_count=10, seed=3))
    np.testing.assert_array_equal(small.X, big.X[:50])


def test_uniform_motion():
    ens = simulate_paths(LevyTriplet([-1.0]), SimPlan(paths=10, step_count=8))
    np.testing.assert_allclose(ens.X[:, :, 0], np.broadcast_to(ens.grid, (10, 9)), atol=1e-15)
    assert hitting_estimate(ens, Hyperplane((1.0,), 0.5)).probability == 1.0
    assert hitting_estimate(ens, Hyperplane((1.0,), 0.5), (0.0, 0.375)).probability == 0.0


def test_compound_poisson_counts():
    ens = simulate_paths(CP, SimPlan(paths=20000, step_count=10, horizon=2.0, seed=1))
    counts = ens.jump_counts()
    assert abs(counts.mean() - 6.0) < 4 * math.sqrt(6.0 / 20000)
    assert abs(counts.var() - 6.0) < 0.3
    np.testing.assert_allclose(ens.jump_size, 2.0)
    assert np.all(np.diff(ens.jump_path) >= 0)


def test_jump_over_hyperplane_is_not_a_hit():
    ens = simulate_paths(CP, SimPlan(paths=500, step_count=10, seed=2))
    assert hitting_estimate(ens, Hyperplane((1.0,), 1.0)).probability == 0.0


def test_drift_diagonal_invariant():
    ens = simulate_paths(DRIFT_DIAGONAL, SimPlan(paths=2000, step_count=50, seed=4))
    proj = ens.X @ np.array([1.0, -1.0])
    np.testing.assert_allclose(proj, np.broadcast_to(-2.0 * ens.grid, proj.shape), atol=1e-12)


def test_brownian_first_passage():
    ens = simulate_paths(BM, SimPlan(paths=40000, step_count=100, seed=5))
    est = hitting_estimate(ens, Hyperplane((1.0,), 0.5))
    exact = 2 * stats.norm.sf(0.5)
    assert abs(est.probability - exact) < max(est.ci95, 4 * math.sqrt(exact * (1 - exact) / 40000))
    assert sum(est.hit_time_counts) == est.hits
    late = hitting_estimate(ens, Hyperplane((1.0,), 0.5), (0.5, 1.0))
    assert late.probability <= est.probability


def test_point_tube_in_plane_is_rare():
    ens = simulate_paths(LevyTriplet.brownian(2), SimPlan(paths=5000, step_count=200, seed=6))
    est = hitting_estimate(ens, PointTube((1.0, 0.0), 1e-3))
    assert est.probability <= 0.01


def test_subspace_tube_contains_start():
    ens = simulate_paths(LevyTriplet.brownian(2), SimPlan(paths=100, step_count=10))
    assert hitting_estimate(ens, SubspaceTube(((1.0, 0.0),), 0.1)).probability == 1.0
    with pytest.raises(ValueError):
        hitting_estimate(ens, Hyperplane((1.0,), 0.0))


@pytest.mark.parametrize(
    "t",
    [
        BM,
        CP,
        sym_stable_1d(1.5),
        LevyTriplet([0.3], None, [line([1.0], [PowerTerm(1.0, 0.8, 0.0, math.inf, 2.0)])]),
        DRIFT_DIAGONAL,
    ],
    ids=["brownian", "compound-poisson", "stable-1.5", "damped-line", "drift-diagonal"],
)
def test_empirical_cf(t):
    ens = simulate_paths(t, SimPlan(paths=20000, step_count=20, seed=9))
    rng = np.random.default_rng(0)
    z = rng.normal(size=(4, t.dim))
    vals, se = empirical_cf(ens, z)
    exact = np.exp(-psi_values(t, z))
    assert np.all(np.abs(vals.real - exact.real) <= 4 * se.real + 1e-12)
    assert np.all(np.abs(vals.imag - exact.imag) <= 4 * se.imag + 1e-12)


def test_npz_round_trip(tmp_path):
    ens = simulate_paths(CP, SimPlan(paths=30, step_count=5, seed=11))
    p = tmp_path / "ens.npz"
    ens.save_npz(p)
    back = Ensemble.load_npz(p)
    assert back.plan == ens.plan
    for name in ("grid", "X", "jump_path", "jump_time", "jump_pre", "jump_size"):
        np.testing.assert_array_equal(getattr(back, name), getattr(ens, name))
    assert ens.summary_csv().splitlines()[0] == "path,x1,jumps"


def test_jump_budget():
    heavy = LevyTriplet([0.0], None, [Atoms([[1.0]], [1e5])])
    with pytest.raises(ValueError):
        simulate_paths(heavy, SimPlan(paths=1000))
