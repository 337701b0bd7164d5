"""Simple undirected graphs, edge-list I/O and ego-network sampling."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Union

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)

ALL = "all"


class EdgeListError(ValueError):
    """Raised when an edge-list file cannot be parsed."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph.

    ``edges`` is an ``(m, 2)`` integer array with ``u < v`` on every row,
    sorted lexicographically and free of duplicates. Use :meth:`from_edges`
    to build one from arbitrary (possibly directed, repeated) pairs.
    """

    node_count: int
    edges: np.ndarray
    label: Optional[str] = None
    dropped: int = field(default=0, compare=False)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if self.node_count < 0:
            raise ValueError("node_count must be non-negative")
        if len(edges):
            if edges.min() < 0 or edges.max() >= self.node_count:
                raise ValueError("edge endpoint out of range")
            if np.any(edges[:, 0] >= edges[:, 1]):
                raise ValueError("edges must satisfy u < v; use Graph.from_edges")
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, node_count: int, pairs: Iterable, label: Optional[str] = None) -> "Graph":
        """Build a graph, symmetrizing pairs and dropping self-loops and repeats."""
        arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        total = len(arr)
        arr = arr[arr[:, 0] != arr[:, 1]]
        arr = np.sort(arr, axis=1)
        arr = np.unique(arr, axis=0) if len(arr) else arr
        return cls(node_count, arr, label=label, dropped=total - len(arr))

    @classmethod
    def from_adjacency(cls, adjacency, label: Optional[str] = None) -> "Graph":
        a = np.asarray(adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        a = (a != 0) | (a.T != 0)
        u, v = np.nonzero(np.triu(a, k=1))
        return cls(a.shape[0], np.column_stack([u, v]), label=label)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_set(self) -> set:
        return {(int(u), int(v)) for u, v in self.edges}

    @cached_property
    def csr(self) -> sp.csr_matrix:
        n = self.node_count
        if not len(self.edges):
            return sp.csr_matrix((n, n), dtype=np.int64)
        u, v = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * len(u), dtype=np.int64)
        return sp.csr_matrix((data, (np.r_[u, v], np.r_[v, u])), shape=(n, n))

    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (float64)."""
        a = np.zeros((self.node_count, self.node_count))
        if len(self.edges):
            a[self.edges[:, 0], self.edges[:, 1]] = 1.0
            a[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return a

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.node_count)

    def neighbors(self, node: int) -> np.ndarray:
        c = self.csr
        return c.indices[c.indptr[node]:c.indptr[node + 1]]

    def relabel(self, permutation) -> "Graph":
        """Return the graph with node ``i`` renamed to ``permutation[i]``."""
        perm = np.asarray(permutation, dtype=np.int64)
        return Graph.from_edges(self.node_count, perm[self.edges], label=self.label)

    def induced_subgraph(self, nodes) -> "Graph":
        """Induced subgraph; node ``nodes[i]`` becomes ``i``."""
        nodes = np.asarray(nodes, dtype=np.int64)
        index = np.full(self.node_count, -1, dtype=np.int64)
        index[nodes] = np.arange(len(nodes))
        mapped = index[self.edges]
        keep = (mapped >= 0).all(axis=1)
        return Graph.from_edges(len(nodes), mapped[keep], label=self.label)

    def __repr__(self):
        return f"Graph(node_count={self.node_count}, edge_count={self.edge_count}, label={self.label!r})"


@dataclass(frozen=True)
class EgoNetConfig:
    hops: int = 2
    sample_size: Union[int, str] = 1000
    seed: int = 0

    def __post_init__(self):
        if self.hops < 1:
            raise ValueError("hops must be >= 1")
        if self.sample_size != ALL and (not isinstance(self.sample_size, (int, np.integer)) or self.sample_size < 1):
            raise ValueError("sample_size must be a positive integer or 'all'")


def load_edge_list(path: Union[str, os.PathLike], label: Optional[str] = None) -> Graph:
    """Read a whitespace-delimited ``u v`` edge list.

    Lines starting with ``#`` are comments, except a ``# nodes N`` header
    which declares the node count. Without a header (or when ids exceed it)
    the ids seen are compacted to ``0..n-1`` in increasing order.
    """
    declared = None
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0].lower() in ("nodes", "nodes:"):
                    try:
                        declared = int(parts[1])
                    except ValueError:
                        raise EdgeListError(f"{path}:{lineno}: bad node-count header {line!r}")
                continue
            parts = line.split()
            if len(parts) < 2:
                raise EdgeListError(f"{path}:{lineno}: expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListError(f"{path}:{lineno}: non-integer node id in {line!r}")
            if u < 0 or v < 0:
                raise EdgeListError(f"{path}:{lineno}: negative node id in {line!r}")
            pairs.append((u, v))

    if not pairs and not declared:
        raise EdgeListError(f"{path}: empty edge list")
    arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if declared is not None and (not len(arr) or arr.max() < declared):
        n = declared
    else:
        ids, arr = np.unique(arr, return_inverse=True)
        arr = arr.reshape(-1, 2)
        n = len(ids)
    g = Graph.from_edges(n, arr, label=label)
    if g.dropped:
        logger.warning("%s: dropped %d duplicate or self-loop lines", path, g.dropped)
    return g


def write_edge_list(g: Graph, path: Union[str, os.PathLike]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes {g.node_count}\n")
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")


def bfs_distances(g: Graph, source: int, max_depth: Optional[int] = None) -> np.ndarray:
    """Hop distances from ``source``; unreachable (or beyond max_depth) is -1."""
    c = g.csr
    dist = np.full(g.node_count, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source])
    depth = 0
    while len(frontier) and (max_depth is None or depth < max_depth):
        depth += 1
        nbrs = np.concatenate([c.indices[c.indptr[u]:c.indptr[u + 1]] for u in frontier])
        nbrs = np.unique(nbrs)
        nbrs = nbrs[dist[nbrs] < 0]
        dist[nbrs] = depth
        frontier = nbrs
    return dist


def ego_network(g: Graph, center: int, hops: int = 2) -> Graph:
    """Induced subgraph within ``hops`` of ``center``; the center becomes node 0."""
    if not 0 <= center < g.node_count:
        raise IndexError(f"center {center} out of range for {g.node_count} nodes")
    if hops < 1:
        raise ValueError("hops must be >= 1")
    dist = bfs_distances(g, center, max_depth=hops)
    others = np.flatnonzero(dist > 0)
    return g.induced_subgraph(np.r_[center, others])


def sample_centers(node_count: int, sample_size, seed: int) -> np.ndarray:
    if sample_size == ALL or sample_size >= node_count:
        return np.arange(node_count)
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(node_count, size=int(sample_size), replace=False))


def sample_ego_networks(g: Graph, cfg: EgoNetConfig) -> list:
    """Ego-networks around distinct uniformly drawn centers (without replacement)."""
    return [ego_network(g, int(c), cfg.hops) for c in sample_centers(g.node_count, cfg.sample_size, cfg.seed)]
