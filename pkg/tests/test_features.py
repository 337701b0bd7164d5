import numpy as np
import pytest
from hypothesis import given, strategies as st

from pretrain_feasibility import oracles
from pretrain_feasibility.features import (FEATURE_NAMES, TopologicalFeatureExtractor, extract_features,
                                           graph_properties, node_properties)
from pretrain_feasibility.graph import Graph

from conftest import complete_graph, graphs, path_graph, random_graph, star_graph


def test_triangle_node_properties():
    assert np.allclose(node_properties(complete_graph(3)), [[2, 1.0, 1.0]] * 3)


def test_path3_node_properties():
    props = node_properties(path_graph(3))
    assert np.allclose(props[1], [2, 0.0, 1.0])
    assert np.allclose(props[0], [1, 0.0, 2 / 3])


def test_single_node_properties():
    assert np.allclose(node_properties(Graph(1, np.empty((0, 2), dtype=np.int64))), [[0, 0, 0]])


def test_triangle_graph_properties():
    assert graph_properties(complete_graph(3)) == pytest.approx((1.0, 0.0, 1.0))


def test_star_assortativity():
    _, assort, _ = graph_properties(star_graph(4))
    assert assort == pytest.approx(-1.0)


def test_feature_vectors():
    assert np.allclose(extract_features(complete_graph(3)), [2, 1, 1, 1, 0, 1])
    assert np.allclose(extract_features(path_graph(3)), [4 / 3, 0, 7 / 9, 2 / 3, -1, 0])
    assert len(FEATURE_NAMES) == 6


@pytest.mark.parametrize("seed", range(20))
def test_matches_brute_force_oracle(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, int(rng.integers(1, 31)), rng.uniform(0.02, 0.7))
    assert np.abs(extract_features(g) - oracles.features(g.node_count, g.edges)).max() <= 1e-9


@given(graphs(max_nodes=14), st.integers(0, 2**32 - 1))
def test_permutation_invariance(g, seed):
    perm = np.random.default_rng(seed).permutation(g.node_count)
    assert np.allclose(extract_features(g.relabel(perm)), extract_features(g), atol=1e-12)


@given(graphs())
def test_ranges(g):
    f = extract_features(g)
    assert np.all(np.isfinite(f))
    assert 0 <= f[1] <= 1 and 0 <= f[3] <= 1 and 0 <= f[5] <= 1
    assert -1 - 1e-12 <= f[4] <= 1 + 1e-12


@pytest.mark.parametrize("g", [Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)]),
                               Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)]), complete_graph(5)])
def test_clustering_equals_transitivity_on_vertex_transitive(g):
    f = extract_features(g)
    assert f[1] == pytest.approx(f[5])


def test_agrees_with_networkx():
    nx = pytest.importorskip("networkx")
    rng = np.random.default_rng(3)
    for _ in range(5):
        g = random_graph(rng, 25, 0.2)
        h = nx.Graph()
        h.add_nodes_from(range(g.node_count))
        h.add_edges_from(g.edges.tolist())
        f = extract_features(g)
        assert f[1] == pytest.approx(nx.average_clustering(h))
        assert f[2] == pytest.approx(np.mean(list(nx.closeness_centrality(h).values())))
        assert f[3] == pytest.approx(nx.density(h))
        assert f[5] == pytest.approx(nx.transitivity(h))
        assert f[4] == pytest.approx(nx.degree_assortativity_coefficient(h))


def test_transformer_api():
    gs = [complete_graph(3), path_graph(3)]
    ext = TopologicalFeatureExtractor()
    out = ext.fit_transform(gs)
    assert out.shape == (2, 6)
    assert ext.get_params() == {}
    assert list(ext.get_feature_names_out()) == list(FEATURE_NAMES)
