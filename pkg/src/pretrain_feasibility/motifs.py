"""Homomorphism densities, the exact cut norm of step kernels, and the
motif-preservation checks built on them."""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .graph import Graph
from .graphon import Graphon, mix, sample_graph
from ._validation import check_simplex

MAX_MOTIF_NODES = 5
DEFAULT_RESOLUTION_CAP = 32
MAX_CUT_NORM_RESOLUTION = 20


@dataclass(frozen=True)
class Motif:
    node_count: int
    edges: tuple
    name: str = ""

    def __post_init__(self):
        if not 1 <= self.node_count <= MAX_MOTIF_NODES:
            raise ValueError(f"motifs have 1..{MAX_MOTIF_NODES} nodes")
        canon = set()
        for u, v in self.edges:
            if u == v or not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"invalid motif edge ({u}, {v})")
            canon.add((min(u, v), max(u, v)))
        if len(canon) != len(self.edges):
            raise ValueError("motif edges must be distinct")
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        if not _connected(self.node_count, self.edges):
            raise ValueError("motifs must be connected")


def _connected(n, edges):
    seen, stack = {0}, [0]
    adj = {i: set() for i in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    while stack:
        for w in adj[stack.pop()] - seen:
            seen.add(w)
            stack.append(w)
    return len(seen) == n


EDGE = Motif(2, ((0, 1),), "edge")
PATH3 = Motif(3, ((0, 1), (1, 2)), "path3")
TRIANGLE = Motif(3, ((0, 1), (1, 2), (0, 2)), "triangle")
SQUARE = Motif(4, ((0, 1), (1, 2), (2, 3), (0, 3)), "square")
PATH4 = Motif(4, ((0, 1), (1, 2), (2, 3)), "path4")
STAR3 = Motif(4, ((0, 1), (0, 2), (0, 3)), "star3")
MOTIFS = {m.name: m for m in (EDGE, PATH3, TRIANGLE, SQUARE, PATH4, STAR3)}


def _hom_sum(motif: Motif, matrix: np.ndarray) -> float:
    """Sum over all maps V(F) -> [r] of the product of matrix entries on edges."""
    r = matrix.shape[0]
    if not motif.edges:
        return float(r) ** motif.node_count
    letters = string.ascii_lowercase
    subs = ",".join(letters[u] + letters[v] for u, v in motif.edges)
    return float(np.einsum(subs + "->", *([matrix] * len(motif.edges)), optimize="greedy"))


def hom_density_graph(motif: Motif, g: Graph) -> float:
    """hom(F, G) / n^|F| over all (not necessarily injective) maps."""
    if g.node_count < 1:
        raise ValueError("graph must have at least one node")
    return _hom_sum(motif, g.adjacency()) / float(g.node_count) ** motif.node_count


def hom_density_graphon(motif: Motif, b: Graphon, resolution_cap: int = DEFAULT_RESOLUTION_CAP) -> float:
    if b.resolution > resolution_cap:
        raise ValueError(
            f"resolution {b.resolution} exceeds cap {resolution_cap}; resample() the graphon first")
    return _hom_sum(motif, b.grid) / float(b.resolution) ** motif.node_count


def cut_norm(d) -> float:
    """Exact cut norm of a step kernel with equal-measure blocks.

    For each row subset S the best column set is sign-selected, so only
    the 2^r row subsets need enumerating.
    """
    d = np.asarray(d, dtype=np.float64)
    r = d.shape[0]
    if d.ndim != 2 or d.shape != (r, r):
        raise ValueError("cut_norm expects a square matrix")
    if r > MAX_CUT_NORM_RESOLUTION:
        raise ValueError(f"exact cut norm supports r <= {MAX_CUT_NORM_RESOLUTION}, got {r}")
    best = 0.0
    chunk = 1 << min(r, 16)
    powers = 1 << np.arange(r)
    for start in range(0, 1 << r, chunk):
        ids = np.arange(start, min(start + chunk, 1 << r))
        rows = ((ids[:, None] & powers) > 0).astype(np.float64)
        col = rows @ d
        pos = np.where(col > 0, col, 0.0).sum(axis=1)
        neg = -np.where(col < 0, col, 0.0).sum(axis=1)
        best = max(best, float(pos.max()), float(neg.max()))
    return best / (r * r)


class CountingBoundResult(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def verify_counting_bound(basis: Sequence[Graphon], weights, motif: Motif, a: int) -> CountingBoundResult:
    """Compare |t(F, mixture) - t(F, B_a)| against sum_b |F| alpha_b ||B_b - B_a||."""
    r = basis[0].resolution
    if r > 12:
        raise ValueError("verify_counting_bound supports resolutions up to 12")
    w = check_simplex(weights, k=len(basis))
    f = mix(basis, w)
    lhs = abs(hom_density_graphon(motif, f) - hom_density_graphon(motif, basis[a]))
    rhs = 0.0
    for b, (wb, gb) in enumerate(zip(w, basis)):
        if b != a and wb > 0:
            rhs += motif.node_count * wb * cut_norm(gb.grid - basis[a].grid)
    return CountingBoundResult(lhs, rhs, lhs <= rhs + 1e-12)


class ConcentrationResult(NamedTuple):
    empirical_rate: float
    bound: float
    holds: bool
    vacuous: bool
    densities: np.ndarray
    target: float


def concentration_bound(eps: float, n: int, motif_nodes: int) -> float:
    return 2.0 * np.exp(-(eps ** 2) * n / (8.0 * motif_nodes ** 2))


def verify_concentration(f: Graphon, motif: Motif, n: int, trials: int, eps: float, seed=0,
                         densities=None) -> ConcentrationResult:
    """Empirical exceedance rate of |t(F, G(n, f)) - t(F, f)| > eps against the tail bound.

    ``densities`` may carry precomputed sample densities so several ``eps``
    values can share one batch of samples.
    """
    if n < 2 or not 0 < eps < 1:
        raise ValueError("need n >= 2 and 0 < eps < 1")
    target = hom_density_graphon(motif, f)
    if densities is None:
        seeds = np.random.SeedSequence(seed).spawn(trials)
        densities = np.array([hom_density_graph(motif, sample_graph(f, n, s)) for s in seeds])
    rate = float(np.mean(np.abs(densities - target) > eps))
    bound = float(concentration_bound(eps, n, motif.node_count))
    vacuous = bound >= 1.0
    return ConcentrationResult(rate, bound, vacuous or rate <= bound, vacuous, densities, target)
