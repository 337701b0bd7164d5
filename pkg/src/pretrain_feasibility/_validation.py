"""Input coercion shared by the estimators."""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from .graph import Graph


def as_graph(obj) -> Graph:
    if isinstance(obj, Graph):
        return obj
    arr = np.asarray(obj)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        return Graph.from_adjacency(arr)
    raise TypeError(f"expected a Graph or a square adjacency matrix, got {type(obj).__name__}")


def check_graphs(X, name="graphs", allow_empty=False) -> list:
    """Coerce ``X`` to a list of :class:`Graph`, rejecting empty input."""
    if isinstance(X, (Graph, np.ndarray)) and not (isinstance(X, np.ndarray) and X.ndim == 3):
        X = [X]
    graphs = [as_graph(g) for g in X]
    if not graphs and not allow_empty:
        raise ValueError(f"{name}: at least one graph is required")
    for g in graphs:
        if g.node_count < 1:
            raise ValueError(f"{name}: every graph needs at least one node")
    return graphs


def check_splits(X, name="splits") -> dict:
    """Coerce to an ordered ``{label: [Graph, ...]}`` mapping.

    A bare list of graphs is split by each graph's ``label`` (unlabeled
    graphs share the label ``"default"``).
    """
    if isinstance(X, Mapping):
        splits = {str(k): check_graphs(v, name=f"{name}[{k}]") for k, v in X.items()}
    else:
        splits = {}
        for g in check_graphs(X, name=name):
            splits.setdefault(g.label or "default", []).append(g)
    if not splits:
        raise ValueError(f"{name}: at least one split is required")
    return splits


def check_simplex(weights, k=None, atol=1e-9) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64).ravel()
    if k is not None and len(w) != k:
        raise ValueError(f"expected {k} weights, got {len(w)}")
    if np.any(w < 0) or not np.isfinite(w).all():
        raise ValueError("weights must be finite and non-negative")
    if abs(w.sum() - 1.0) > atol:
        raise ValueError(f"weights must sum to 1 (got {w.sum():.12g})")
    return w
