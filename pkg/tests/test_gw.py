import numpy as np
import pytest
from hypothesis import given, strategies as st

from pretrain_feasibility import oracles
from pretrain_feasibility.graphon import Graphon
from pretrain_feasibility.gw import (GwConfig, gw_distance, gw_gradient_wrt_first, gw_objective,
                                     independent_coupling, round_to_marginals, sinkhorn, sinkhorn_log)
from pretrain_feasibility.verify import fd_relative_error


def _random_graphon(rng, r):
    a = rng.random((r, r))
    return Graphon(np.triu(a) + np.triu(a, 1).T)


def test_identity_distance():
    rng = np.random.default_rng(0)
    for r in (1, 2, 5, 8, 16):
        b = _random_graphon(rng, r)
        assert gw_distance(b, b).value <= 1e-3


@pytest.mark.parametrize("r1, r2", [(1, 1), (3, 5), (4, 2)])
def test_constant_pair_is_plan_independent(r1, r2):
    res = gw_distance(Graphon.constant(0.2, r1), Graphon.constant(0.8, r2))
    assert res.value == pytest.approx(0.36, abs=1e-6)
    rng = np.random.default_rng(1)
    plan = round_to_marginals(rng.random((r1, r2)), np.full(r1, 1 / r1), np.full(r2, 1 / r2))
    assert gw_objective(Graphon.constant(0.2, r1), Graphon.constant(0.8, r2), plan) == pytest.approx(0.36)


def test_swapped_blocks_align():
    b1 = Graphon(np.array([[0.9, 0.1], [0.1, 0.5]]))
    b2 = Graphon(np.array([[0.5, 0.1], [0.1, 0.9]]))
    assert gw_distance(b1, b2).value <= 1e-3
    # block permutation couplings by brute force
    anti = np.array([[0, 0.5], [0.5, 0]])
    assert gw_objective(b1, b2, anti) == pytest.approx(0)


def test_objective_matches_four_index_sum():
    rng = np.random.default_rng(2)
    for _ in range(10):
        r1, r2 = rng.integers(1, 6, 2)
        c1, c2 = _random_graphon(rng, r1).grid, _random_graphon(rng, r2).grid
        plan = round_to_marginals(rng.random((r1, r2)), np.full(r1, 1 / r1), np.full(r2, 1 / r2))
        assert gw_objective(c1, c2, plan) == pytest.approx(oracles.gw_objective(c1, c2, plan), abs=1e-12)


def test_symmetry_in_arguments():
    rng = np.random.default_rng(3)
    for _ in range(10):
        r1, r2 = rng.integers(2, 12, 2)
        a, b = _random_graphon(rng, r1), _random_graphon(rng, r2)
        assert abs(gw_distance(a, b).value - gw_distance(b, a).value) <= 1e-4


def test_plan_marginals_and_monotone_trace():
    rng = np.random.default_rng(4)
    for _ in range(10):
        r1, r2 = rng.integers(2, 12, 2)
        res = gw_distance(_random_graphon(rng, r1), _random_graphon(rng, r2))
        assert np.all(res.plan >= 0)
        assert np.abs(res.plan.sum(axis=1) - 1 / r1).max() <= 1e-6
        assert np.abs(res.plan.sum(axis=0) - 1 / r2).max() <= 1e-6
        assert np.all(np.diff(res.trace) <= 1e-9)


def test_reported_value_is_objective_at_plan():
    rng = np.random.default_rng(5)
    a, b = _random_graphon(rng, 6), _random_graphon(rng, 9)
    res = gw_distance(a, b)
    assert res.value == pytest.approx(gw_objective(a, b, res.plan), abs=1e-15)
    assert res.value == pytest.approx(res.trace.min())


def test_non_convergence_is_flagged_not_raised():
    rng = np.random.default_rng(6)
    res = gw_distance(_random_graphon(rng, 10), _random_graphon(rng, 7),
                      GwConfig(outer_iters=1, tol=1e-300, objective_tol=1e-300))
    assert res.converged is False and res.n_iter == 1


def test_warm_start_shape_checked():
    with pytest.raises(ValueError):
        gw_distance(Graphon.constant(0.1, 2), Graphon.constant(0.1, 3), init=np.ones((3, 2)))


def test_config_validation():
    with pytest.raises(ValueError):
        GwConfig(epsilon=0)


def test_gradient_examples():
    c = Graphon.constant(0.4, 3)
    assert np.allclose(gw_gradient_wrt_first(c, c, independent_coupling(3, 3)), 0)
    grad = gw_gradient_wrt_first(Graphon.constant(0.2, 2), Graphon.constant(0.8, 2), independent_coupling(2, 2))
    assert np.allclose(grad, 2 * (0.2 - 0.8) / 4)


def test_gradient_shape_mismatch():
    with pytest.raises(ValueError):
        gw_gradient_wrt_first(np.zeros((2, 2)), np.zeros((3, 3)), np.zeros((3, 3)))


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(50):
        r1, r2 = rng.integers(2, 9, 2)
        b1, b2 = _random_graphon(rng, r1).grid, _random_graphon(rng, r2).grid
        worst = max(worst, fd_relative_error(b1, b2, gw_distance(b1, b2).plan))
    assert worst <= 1e-5


@given(st.integers(0, 2**32 - 1))
def test_sinkhorn_variants_agree(seed):
    rng = np.random.default_rng(seed)
    r1, r2 = rng.integers(1, 8, 2)
    a, b = np.full(r1, 1 / r1), np.full(r2, 1 / r2)
    cost = rng.random((r1, r2))
    fast = sinkhorn(a, b, cost, 0.1, 500)
    slow = sinkhorn_log(a, b, cost, 0.1, 500)[0]
    assert np.allclose(fast, slow, atol=1e-8)
    assert np.allclose(fast.sum(axis=1), a) and np.allclose(fast.sum(axis=0), b)


def test_sinkhorn_falls_back_on_underflow():
    a = b = np.full(3, 1 / 3)
    cost = np.array([[0.0, 100.0, 100.0], [100.0, 0.0, 100.0], [100.0, 100.0, 0.0]])
    cost[0, 0] = 50.0
    plan = sinkhorn(a, b, cost, 0.01, 50)
    assert np.all(np.isfinite(plan))
    assert np.allclose(plan.sum(axis=1), a) and np.allclose(plan.sum(axis=0), b)


@given(st.integers(0, 2**32 - 1))
def test_rounding_restores_marginals(seed):
    rng = np.random.default_rng(seed)
    r1, r2 = rng.integers(1, 9, 2)
    a = rng.dirichlet(np.ones(r1))
    b = rng.dirichlet(np.ones(r2))
    t = round_to_marginals(rng.random((r1, r2)) * 0.3, a, b)
    assert np.all(t >= 0)
    assert np.allclose(t.sum(axis=1), a, atol=1e-12) and np.allclose(t.sum(axis=0), b, atol=1e-12)
