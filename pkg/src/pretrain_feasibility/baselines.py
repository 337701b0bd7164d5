"""Comparison transferability measures and the Pearson-correlation harness."""

from __future__ import annotations

from collections import deque
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .features import clustering_coefficients, degree_assortativity, density, transitivity
from .graph import Graph
from ._validation import check_graphs

METHODS = ("graph_stats_mmd", "egi_laplacian", "clustering_coef_dist", "laplacian_spectrum_dist",
           "betweenness_dist")
DEFAULT_BINS = 20
DEFAULT_SPECTRUM_LENGTH = 64


class BaselineMeasure(NamedTuple):
    method: str
    value: float


def graph_stats_vector(g: Graph) -> np.ndarray:
    """[avg degree, degree variance, density, assortativity, transitivity, avg clustering]."""
    deg = g.degrees.astype(np.float64)
    return np.array([deg.mean(), deg.var(), density(g), degree_assortativity(g), transitivity(g),
                     clustering_coefficients(g).mean()])


def normalized_laplacian(g: Graph) -> np.ndarray:
    """I - D^-1/2 A D^-1/2, with zero rows/columns for isolated nodes."""
    a = g.adjacency()
    deg = a.sum(axis=1)
    inv = np.zeros_like(deg)
    inv[deg > 0] = 1.0 / np.sqrt(deg[deg > 0])
    return inv[:, None] * (np.diag(deg) - a) * inv[None, :]


def laplacian_spectrum(g: Graph) -> np.ndarray:
    return np.sort(np.linalg.eigvalsh(normalized_laplacian(g)))


def betweenness_centrality(g: Graph) -> np.ndarray:
    """Exact normalized betweenness (Brandes accumulation), in [0, 1]."""
    n = g.node_count
    bc = np.zeros(n)
    adj = [g.neighbors(v) for v in range(n)]
    for s in range(n):
        stack = []
        preds = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1)
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(n)
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    if n <= 2:
        return np.zeros(n)
    # each unordered pair was counted from both endpoints
    return bc / ((n - 1) * (n - 2))


def _histogram(values: np.ndarray, bins: int) -> np.ndarray:
    hist, _ = np.histogram(np.clip(values, 0.0, 1.0), bins=bins, range=(0.0, 1.0))
    total = hist.sum()
    return hist / total if total else hist.astype(np.float64)


def distribution_vector(g: Graph, kind: str, bins: int = None) -> np.ndarray:
    if kind == "clustering":
        return _histogram(clustering_coefficients(g), bins or DEFAULT_BINS)
    if kind == "betweenness":
        return _histogram(betweenness_centrality(g), bins or DEFAULT_BINS)
    if kind == "spectrum":
        length = bins or DEFAULT_SPECTRUM_LENGTH
        spec = laplacian_spectrum(g)[:length]
        return np.pad(spec, (0, length - len(spec)))
    raise ValueError(f"unknown distribution kind {kind!r}")


def mmd(xs, ys) -> float:
    """Squared MMD with an RBF kernel at the median-heuristic bandwidth.

    Uses the unbiased estimator when both samples have at least two points,
    the biased one otherwise; clamped at zero.
    """
    x = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    y = np.atleast_2d(np.asarray(ys, dtype=np.float64))
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    if not len(x) or not len(y):
        raise ValueError("both samples must be non-empty")
    pooled = np.vstack([x, y])
    dists = pdist(pooled)
    bw = np.median(dists) if len(dists) else 0.0
    if bw <= 0:
        bw = 1.0

    def kernel(a, b):
        return np.exp(-cdist(a, b, "sqeuclidean") / (2.0 * bw ** 2))

    kxx, kyy, kxy = kernel(x, x), kernel(y, y), kernel(x, y)
    m, n = len(x), len(y)
    if m >= 2 and n >= 2:
        xx = (kxx.sum() - np.trace(kxx)) / (m * (m - 1))
        yy = (kyy.sum() - np.trace(kyy)) / (n * (n - 1))
    else:
        xx, yy = kxx.mean(), kyy.mean()
    return max(float(xx + yy - 2.0 * kxy.mean()), 0.0)


def _vectors(graphs, method, bins):
    if method == "graph_stats_mmd":
        return np.vstack([graph_stats_vector(g) for g in graphs])
    kind = {"clustering_coef_dist": "clustering", "laplacian_spectrum_dist": "spectrum",
            "betweenness_dist": "betweenness"}[method]
    return np.vstack([distribution_vector(g, kind, bins) for g in graphs])


def egi_divergence(pretrain: Sequence[Graph], downstream: Sequence[Graph]) -> float:
    """Mean Euclidean distance between zero-padded sorted Laplacian spectra over all cross pairs."""
    a = [laplacian_spectrum(g) for g in pretrain]
    b = [laplacian_spectrum(g) for g in downstream]
    size = max(len(s) for s in a + b)
    pa = np.vstack([np.pad(s, (0, size - len(s))) for s in a])
    pb = np.vstack([np.pad(s, (0, size - len(s))) for s in b])
    return float(cdist(pa, pb).mean())


def baseline_score(pretrain_graphs, downstream_graphs, method: str, bins: int = None) -> BaselineMeasure:
    """Higher means more transferable (negated MMD or negated spectral divergence)."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    pre = check_graphs(pretrain_graphs, name="pretrain_graphs")
    down = check_graphs(downstream_graphs, name="downstream_graphs")
    if method == "egi_laplacian":
        return BaselineMeasure(method, -egi_divergence(pre, down))
    return BaselineMeasure(method, -mmd(_vectors(pre, method, bins), _vectors(down, method, bins)))


def pearson(xs, ys) -> float:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("pearson needs two equal-length vectors with at least 2 entries")
    xc, yc = x - x.mean(), y - y.mean()
    sxx, syy = np.dot(xc, xc), np.dot(yc, yc)
    if sxx == 0 or syy == 0:
        raise ValueError("correlation is undefined for a zero-variance input")
    return float(np.clip(np.dot(xc, yc) / np.sqrt(sxx * syy), -1.0, 1.0))
