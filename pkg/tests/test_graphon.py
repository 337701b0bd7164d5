import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pretrain_feasibility import oracles
from pretrain_feasibility.graph import Graph
from pretrain_feasibility.graphon import (AUTO, EstimationConfig, Graphon, GraphonValidationError,
                                          LargestGapGraphonEstimator, estimate_graphon, graph_step_function,
                                          largest_gap_blocks, load_graphon, mix, resample, sample_graph,
                                          save_graphon)
from pretrain_feasibility.gw import gw_distance

from conftest import complete_graph, graphons, graphs, random_graph


# ---- representation ---------------------------------------------------------

@pytest.mark.parametrize("grid, fragment", [
    ([[0.1, 0.2], [0.3, 0.4]], "symmetric"),
    ([[1.5]], r"\[0, 1\]"),
    ([[np.nan]], "finite"),
    ([[0.1, 0.2]], "square"),
])
def test_invalid_grids_name_the_invariant(grid, fragment):
    with pytest.raises(GraphonValidationError, match=fragment):
        Graphon(np.array(grid))


def test_json_round_trip(tmp_path):
    b = Graphon(np.array([[0.8, 0.1], [0.1, 0.6]]))
    save_graphon(b, tmp_path / "b.json")
    data = json.loads((tmp_path / "b.json").read_text())
    assert data == {"resolution": 2, "grid": [0.8, 0.1, 0.1, 0.6]}
    back = load_graphon(tmp_path / "b.json")
    assert np.array_equal(back.grid, b.grid) and back.digest() == b.digest()


def test_load_rejects_bad_size(tmp_path):
    (tmp_path / "b.json").write_text(json.dumps({"resolution": 2, "grid": [0.1, 0.2, 0.2]}))
    with pytest.raises(GraphonValidationError, match="resolution"):
        load_graphon(tmp_path / "b.json")


def test_evaluation_maps_one_to_last_block():
    b = Graphon(np.array([[0.0, 0.5], [0.5, 1.0]]))
    assert b(1.0, 1.0) == 1.0 and b(0.0, 0.99) == 0.5


# ---- estimation -------------------------------------------------------------

def test_complete_graph_estimate():
    assert np.array_equal(estimate_graphon([complete_graph(4)], EstimationConfig(resolution=4)).grid, np.ones((4, 4)))


def test_empty_graph_estimate():
    g = Graph(5, np.empty((0, 2), dtype=np.int64))
    assert np.array_equal(estimate_graphon([g], EstimationConfig(resolution=3)).grid, np.zeros((3, 3)))


def test_empty_list_is_an_error():
    with pytest.raises(ValueError):
        estimate_graphon([])


def test_largest_gap_tie_rule():
    # degrees sorted: 5 3 3 1 with gaps 2 0 2; the two largest gaps cut at both ends
    assert [list(b) for b in largest_gap_blocks(np.array([3, 1, 5, 3]), 3)] == [[2], [0, 3], [1]]
    # gaps 1 1 1: leftmost ties win
    assert [list(b) for b in largest_gap_blocks(np.array([4, 3, 2, 1]), 2)] == [[0], [1, 2, 3]]


@pytest.mark.parametrize("seed", range(12))
def test_step_function_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 16))
    g = random_graph(rng, n, rng.uniform(0.1, 0.9))
    r = int(rng.integers(1, 13))
    k = int(rng.integers(1, 16))
    fast = graph_step_function(g, r, k)
    slow = oracles.largest_gap_step_function(n, g.edges, r, k)
    assert np.allclose(fast, slow, atol=1e-12)


def test_auto_resolution_is_rounded_mean_size():
    gs = [complete_graph(3), complete_graph(6)]
    assert EstimationConfig().resolve(gs) == 5  # 4.5 rounds half up
    assert estimate_graphon(gs).resolution == 5


@given(graphs(max_nodes=14), st.integers(0, 2**32 - 1), st.integers(1, 10))
def test_estimate_invariant_to_relabeling(g, seed, k):
    # equal-degree nodes always share a block, so node ids never matter
    h = g.relabel(np.random.default_rng(seed).permutation(g.node_count))
    cfg = EstimationConfig(resolution=7, block_count=k)
    assert np.allclose(estimate_graphon([g], cfg).grid, estimate_graphon([h], cfg).grid, atol=1e-12)


def test_regular_graph_is_one_block():
    cycle = Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])
    assert len(largest_gap_blocks(cycle.degrees, 6)) == 1


def test_planted_two_block_recovery():
    truth = Graphon(np.array([[0.8, 0.1], [0.1, 0.6]]))
    graphs = [sample_graph(truth, 200, s) for s in np.random.SeedSequence(11).spawn(50)]
    est = estimate_graphon(graphs, EstimationConfig(resolution=16))
    assert gw_distance(est, truth).value <= 0.02


def test_estimator_api():
    truth = Graphon.constant(0.3)
    graphs = [sample_graph(truth, 30, s) for s in range(10)]
    model = LargestGapGraphonEstimator(resolution=8).fit(graphs)
    assert model.resolution_ == 8 and model.n_graphs_ == 10
    assert model.get_params() == {"resolution": 8, "block_count": AUTO}
    assert abs(model.graphon_.grid.mean() - 0.3) < 0.05
    drawn = model.sample(12, count=3, seed=1)
    assert [g.node_count for g in drawn] == [12] * 3


# ---- resample ---------------------------------------------------------------

@pytest.mark.parametrize("r_new", [1, 2, 3, 7, 16])
def test_resample_constant(r_new):
    assert np.allclose(resample(Graphon.constant(0.3, 5), r_new).grid, 0.3)


def test_resample_refine_and_coarsen():
    b = Graphon(np.eye(2))
    fine = resample(b, 4)
    assert np.array_equal(fine.grid, np.kron(np.eye(2), np.ones((2, 2))))
    assert np.array_equal(resample(fine, 2).grid, b.grid)


@given(graphons(max_r=6), st.integers(1, 9))
def test_resample_preserves_mass_symmetry_and_identity(b, r_new):
    out = resample(b, r_new)
    assert np.allclose(out.grid.mean(), b.grid.mean())
    assert np.array_equal(out.grid, out.grid.T)
    assert 0 <= out.grid.min() and out.grid.max() <= 1
    assert np.array_equal(resample(b, b.resolution).grid, b.grid)


# ---- sampling ---------------------------------------------------------------

def test_sample_certain_graphs():
    assert sample_graph(Graphon.constant(1.0), 5, 0).edge_count == 10
    assert sample_graph(Graphon.constant(0.0), 5, 0).edge_count == 0


def test_sample_deterministic():
    b = Graphon.constant(0.4, 3)
    assert sample_graph(b, 30, 5).edge_set() == sample_graph(b, 30, 5).edge_set()


def test_sample_mean_density():
    dens = [sample_graph(Graphon.constant(0.5), 400, s).edge_count / (400 * 399 / 2) for s in range(100)]
    assert abs(np.mean(dens) - 0.5) <= 0.01


def test_sample_cell_marginals_within_three_standard_errors():
    grid = np.array([[0.9, 0.2], [0.2, 0.5]])
    b = Graphon(grid)
    hits = np.zeros((2, 2))
    counts = np.zeros((2, 2))
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        # two nodes per graph: the only pair's cell is fixed by the latent positions
        seed = int(rng.integers(2**63))
        g = sample_graph(b, 2, seed)
        latent = np.random.default_rng(seed).random(2)
        i, j = sorted(np.minimum((latent * 2).astype(int), 1))
        counts[i, j] += 1
        hits[i, j] += g.edge_count
    for i, j in [(0, 0), (0, 1), (1, 1)]:
        p = grid[i, j]
        se = np.sqrt(p * (1 - p) / counts[i, j])
        assert abs(hits[i, j] / counts[i, j] - p) <= 3 * se


# ---- mixing -----------------------------------------------------------------

def test_mix_vertex_and_midpoint():
    b1, b2 = Graphon.constant(0.2, 3), Graphon.constant(0.8, 3)
    assert np.array_equal(mix([b1, b2], [1, 0]).grid, b1.grid)
    assert np.allclose(mix([b1, b2], [0.5, 0.5]).grid, 0.5)


def test_mix_errors():
    with pytest.raises(ValueError, match="resample"):
        mix([Graphon.constant(0.2, 2), Graphon.constant(0.2, 3)], [0.5, 0.5])
    with pytest.raises(ValueError):
        mix([Graphon.constant(0.2), Graphon.constant(0.3)], [0.5, 0.6])


def test_mix_stays_in_hull():
    rng = np.random.default_rng(0)
    basis = []
    for _ in range(3):
        a = rng.random((8, 8))
        basis.append(Graphon(np.triu(a) + np.triu(a, 1).T))
    for _ in range(1000):
        g = mix(basis, rng.dirichlet(np.ones(3))).grid
        assert np.array_equal(g, g.T) and g.min() >= 0 and g.max() <= 1
