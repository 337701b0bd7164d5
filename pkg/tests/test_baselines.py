import numpy as np
import pytest
from hypothesis import given, strategies as st

from pretrain_feasibility import oracles
from pretrain_feasibility.baselines import (METHODS, baseline_score, betweenness_centrality, distribution_vector,
                                            egi_divergence, graph_stats_vector, laplacian_spectrum, mmd, pearson)
from pretrain_feasibility.graph import Graph
from pretrain_feasibility.graphon import Graphon, sample_graph

from conftest import complete_graph, graphs, path_graph, random_graph, star_graph


def _empty(n):
    return Graph(n, np.empty((0, 2), dtype=np.int64))


def _samples(p, count, seed, n=30):
    return [sample_graph(Graphon.constant(p), n, s) for s in np.random.SeedSequence(seed).spawn(count)]


def test_triangle_stats_vector():
    assert np.allclose(graph_stats_vector(complete_graph(3)), [2, 0, 1, 0, 1, 1])


def test_edgeless_stats_vector():
    assert np.allclose(graph_stats_vector(_empty(3)), 0)


def test_triangle_clustering_histogram():
    hist = distribution_vector(complete_graph(3), "clustering")
    assert hist[-1] == 1 and hist.sum() == 1


def test_k2_spectrum():
    spec = distribution_vector(complete_graph(2), "spectrum", bins=5)
    assert np.allclose(spec, [0, 2, 0, 0, 0])


def test_spectrum_truncates():
    assert len(distribution_vector(complete_graph(10), "spectrum", bins=4)) == 4


def test_edgeless_betweenness_histogram():
    hist = distribution_vector(_empty(4), "betweenness")
    assert hist[0] == 1 and hist.sum() == 1


def test_unknown_distribution_kind():
    with pytest.raises(ValueError):
        distribution_vector(complete_graph(3), "pagerank")


def test_star_and_path_betweenness():
    assert np.allclose(betweenness_centrality(star_graph(4)), [1, 0, 0, 0, 0])
    assert np.allclose(betweenness_centrality(path_graph(3)), [0, 1, 0])


def test_betweenness_matches_oracle():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(1, 51))
        g = random_graph(rng, n, rng.uniform(0.02, 0.4))
        assert np.allclose(betweenness_centrality(g), oracles.betweenness(n, g.edges.tolist()), atol=1e-12)


def test_betweenness_matches_networkx():
    nx = pytest.importorskip("networkx")
    rng = np.random.default_rng(1)
    for _ in range(10):
        g = random_graph(rng, 25, 0.15)
        h = nx.Graph()
        h.add_nodes_from(range(25))
        h.add_edges_from(g.edges.tolist())
        ref = nx.betweenness_centrality(h, normalized=True)
        assert np.allclose(betweenness_centrality(g), [ref[i] for i in range(25)], atol=1e-12)


@given(graphs(max_nodes=10), st.randoms(use_true_random=False))
def test_spectrum_properties(g, rnd):
    spec = laplacian_spectrum(g)
    assert np.all(spec >= -1e-9) and np.all(spec <= 2 + 1e-9)
    perm = list(range(g.node_count))
    rnd.shuffle(perm)
    assert np.allclose(laplacian_spectrum(g.relabel(perm)), spec, atol=1e-9)


def test_mmd_identical_and_single_point():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(40, 3))
    assert mmd(x, x[::-1]) <= 1e-9
    assert mmd([[1.0, 2.0]], [[1.0, 2.0]]) == 0


def test_mmd_symmetry():
    rng = np.random.default_rng(3)
    x, y = rng.normal(size=(30, 2)), rng.normal(1, 1, size=(25, 2))
    assert mmd(x, y) == pytest.approx(mmd(y, x), abs=1e-12)


def test_mmd_two_sample_separation():
    rng = np.random.default_rng(4)
    x, x2 = rng.normal(size=(200, 3)), rng.normal(size=(200, 3))
    y = rng.normal(5, 1, size=(200, 3))
    assert mmd(x, y) > mmd(x, x2)


def test_mmd_input_errors():
    with pytest.raises(ValueError):
        mmd(np.zeros((3, 2)), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        mmd(np.zeros((0, 2)), np.zeros((3, 2)))


@pytest.mark.parametrize("method", METHODS)
def test_identical_sets_beat_separated_sets(method):
    lo, lo2, hi = _samples(0.2, 8, 1), _samples(0.2, 8, 2), _samples(0.8, 8, 3)
    same = baseline_score(lo, lo, method).value
    assert same == pytest.approx(0, abs=1e-9) or method == "egi_laplacian"
    assert baseline_score(lo, hi, method).value < same
    assert baseline_score(lo, hi, method).value < baseline_score(lo, lo2, method).value


@pytest.mark.parametrize("method", METHODS)
def test_single_graph_each_side(method):
    score = baseline_score([complete_graph(4)], [path_graph(6)], method)
    assert np.isfinite(score.value) and score.method == method


@pytest.mark.parametrize("method", METHODS)
def test_scores_ignore_order_and_labels(method):
    rng = np.random.default_rng(5)
    a, b = _samples(0.3, 5, 6), _samples(0.6, 5, 7)
    base = baseline_score(a, b, method).value
    shuffled = [g.relabel(rng.permutation(g.node_count)) for g in a[::-1]]
    assert baseline_score(shuffled, b[::-1], method).value == pytest.approx(base, abs=1e-9)


def test_egi_exchangeable():
    a, b = _samples(0.3, 4, 8, n=20), _samples(0.5, 3, 9, n=25)
    assert egi_divergence(a, b) == pytest.approx(egi_divergence(b, a))


def test_unknown_method():
    with pytest.raises(ValueError):
        baseline_score([complete_graph(3)], [complete_graph(3)], "nope")


def test_pearson_fixtures():
    assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0, abs=1e-12)
    assert pearson([1, 2, 3], [6, 4, 2]) == pytest.approx(-1.0, abs=1e-12)
    assert pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)


@given(st.lists(st.floats(-100, 100), min_size=3, max_size=20), st.floats(0.1, 10), st.floats(-10, 10))
def test_pearson_affine_invariance(xs, scale, shift):
    x = np.array(xs)
    y = np.sin(x) + 0.1 * x
    if np.ptp(x) < 1e-3 or np.ptp(y) < 1e-3:
        return
    assert pearson(scale * x + shift, y) == pytest.approx(pearson(x, y), abs=1e-9)


def test_pearson_errors():
    with pytest.raises(ValueError):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        pearson([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        pearson([1], [1])
