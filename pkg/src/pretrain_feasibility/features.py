"""Topological node- and graph-level properties and the 6-d graph feature vector."""

from __future__ import annotations

import numpy as np
from scipy.sparse.csgraph import shortest_path
from sklearn.base import BaseEstimator, TransformerMixin

from .graph import Graph
from ._validation import check_graphs

FEATURE_NAMES = (
    "mean_degree",
    "mean_clustering",
    "mean_closeness",
    "density",
    "assortativity",
    "transitivity",
)


def triangles_per_node(g: Graph) -> np.ndarray:
    """Number of triangles through each node."""
    a = g.csr.astype(np.float64)
    return np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0


def clustering_coefficients(g: Graph) -> np.ndarray:
    deg = g.degrees.astype(np.float64)
    tri = triangles_per_node(g)
    out = np.zeros(g.node_count)
    mask = deg >= 2
    out[mask] = 2.0 * tri[mask] / (deg[mask] * (deg[mask] - 1.0))
    return out


def closeness_centrality(g: Graph) -> np.ndarray:
    """Closeness with the Wasserman-Faust scaling for disconnected graphs.

    Isolated nodes (and the single-node graph) get 0.
    """
    n = g.node_count
    if n <= 1:
        return np.zeros(n)
    dist = shortest_path(g.csr, method="D", directed=False, unweighted=True)
    finite = np.isfinite(dist)
    reach = finite.sum(axis=1) - 1.0
    total = np.where(finite, dist, 0.0).sum(axis=1)
    out = np.zeros(n)
    mask = total > 0
    out[mask] = (reach[mask] / total[mask]) * (reach[mask] / (n - 1.0))
    return out


def node_properties(g: Graph) -> np.ndarray:
    """``(n, 3)`` array of (degree, clustering coefficient, closeness) per node."""
    return np.column_stack([g.degrees.astype(np.float64), clustering_coefficients(g), closeness_centrality(g)])


def density(g: Graph) -> float:
    n = g.node_count
    return 0.0 if n <= 1 else 2.0 * g.edge_count / (n * (n - 1.0))


def transitivity(g: Graph) -> float:
    deg = g.degrees.astype(np.float64)
    triples = float(np.sum(deg * (deg - 1.0) / 2.0))
    if triples == 0:
        return 0.0
    return float(triangles_per_node(g).sum()) / triples


def degree_assortativity(g: Graph) -> float:
    """Pearson correlation of endpoint degrees; 0 when the variance vanishes."""
    if not g.edge_count:
        return 0.0
    deg = g.degrees.astype(np.float64)
    e = g.edges
    x = np.r_[deg[e[:, 0]], deg[e[:, 1]]]
    y = np.r_[deg[e[:, 1]], deg[e[:, 0]]]
    xc, yc = x - x.mean(), y - y.mean()
    denom = np.sqrt(np.dot(xc, xc) * np.dot(yc, yc))
    if denom <= 1e-12 * len(x):
        return 0.0
    return float(np.clip(np.dot(xc, yc) / denom, -1.0, 1.0))


def graph_properties(g: Graph) -> tuple:
    """(density, degree assortativity, transitivity)."""
    return density(g), degree_assortativity(g), transitivity(g)


def extract_features(g: Graph) -> np.ndarray:
    """Mean node properties followed by the graph properties (layout: ``FEATURE_NAMES``)."""
    if g.node_count < 1:
        raise ValueError("graph must have at least one node")
    local = node_properties(g).mean(axis=0)
    return np.r_[local, graph_properties(g)]


class TopologicalFeatureExtractor(TransformerMixin, BaseEstimator):
    """Map each graph to its 6-d topological feature vector.

    Stateless: ``fit`` only validates input. Standardization, when wanted, is
    left to a downstream step (e.g. ``sklearn.preprocessing.StandardScaler``).
    """

    def fit(self, X, y=None):
        check_graphs(X)
        self.n_features_out_ = len(FEATURE_NAMES)
        return self

    def transform(self, X):
        graphs = check_graphs(X)
        return np.vstack([extract_features(g) for g in graphs])

    def get_feature_names_out(self, input_features=None):
        return np.asarray(FEATURE_NAMES, dtype=object)
