"""Step-function graphons: largest-gap estimation, resampling, mixing, W-random sampling."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator

from .graph import Graph
from ._validation import check_graphs, check_simplex

AUTO = "auto"
SYMMETRY_ATOL = 1e-9


class GraphonValidationError(ValueError):
    """A grid violates a graphon invariant (shape, range or symmetry)."""


@dataclass(frozen=True, eq=False)
class Graphon:
    """Symmetric ``r x r`` step function on [0,1]^2 with equal-measure blocks."""

    grid: np.ndarray

    def __post_init__(self):
        grid = np.array(self.grid, dtype=np.float64)
        if grid.ndim != 2 or grid.shape[0] != grid.shape[1] or grid.shape[0] < 1:
            raise GraphonValidationError(f"grid must be a non-empty square matrix, got shape {grid.shape}")
        if not np.isfinite(grid).all():
            raise GraphonValidationError("grid entries must be finite")
        if grid.min() < 0.0 or grid.max() > 1.0:
            raise GraphonValidationError(
                f"grid entries must lie in [0, 1] (found [{grid.min():.6g}, {grid.max():.6g}])")
        if np.abs(grid - grid.T).max() > SYMMETRY_ATOL:
            raise GraphonValidationError("grid must be symmetric")
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)

    @property
    def resolution(self) -> int:
        return self.grid.shape[0]

    @classmethod
    def constant(cls, value: float, resolution: int = 1) -> "Graphon":
        return cls(np.full((resolution, resolution), float(value)))

    def __call__(self, u, v):
        r = self.resolution
        i = np.minimum((np.asarray(u) * r).astype(np.int64), r - 1)
        j = np.minimum((np.asarray(v) * r).astype(np.int64), r - 1)
        return self.grid[i, j]

    def to_dict(self) -> dict:
        return {"resolution": self.resolution, "grid": self.grid.ravel().tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Graphon":
        if not isinstance(data, dict) or "resolution" not in data or "grid" not in data:
            raise GraphonValidationError("graphon JSON needs 'resolution' and 'grid' fields")
        r = data["resolution"]
        if not isinstance(r, int) or isinstance(r, bool) or r < 1:
            raise GraphonValidationError("resolution must be a positive integer")
        values = np.asarray(data["grid"], dtype=np.float64).ravel()
        if values.size != r * r:
            raise GraphonValidationError(f"grid must hold resolution^2 = {r * r} values, got {values.size}")
        return cls(values.reshape(r, r))

    def digest(self) -> str:
        return hashlib.sha256(self.grid.tobytes()).hexdigest()


def save_graphon(b: Graphon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(b.to_dict(), fh)


def load_graphon(path) -> Graphon:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphonValidationError(f"{path}: invalid JSON ({exc})") from None
    return Graphon.from_dict(data)


def _check_size(name, value):
    if value != AUTO and (not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1):
        raise ValueError(f"{name} must be a positive integer or 'auto'")


@dataclass(frozen=True)
class EstimationConfig:
    """Graphon estimation settings.

    ``resolution`` is the output grid size; ``block_count`` caps the number
    of largest-gap blocks per graph (each graph uses ``min(n, block_count)``).
    Both default to the rounded mean node count of the input graphs.
    """

    resolution: Union[int, str] = AUTO
    block_count: Union[int, str] = AUTO
    seed: int = 0

    def __post_init__(self):
        _check_size("resolution", self.resolution)
        _check_size("block_count", self.block_count)

    def resolve(self, graphs: Sequence[Graph]) -> int:
        if self.resolution == AUTO:
            return auto_resolution(graphs)
        return int(self.resolution)

    def resolve_blocks(self, graphs: Sequence[Graph]) -> int:
        if self.block_count == AUTO:
            return auto_resolution(graphs)
        return int(self.block_count)


def auto_resolution(graphs: Sequence[Graph]) -> int:
    """Rounded mean node count (at least 1)."""
    mean = np.mean([g.node_count for g in graphs])
    return max(1, int(np.floor(mean + 0.5)))


def _overlap_weights(bounds: np.ndarray, r: int) -> np.ndarray:
    """``(K, r)`` matrix: fraction of output cell ``c`` covered by input interval ``a``."""
    cells = np.arange(r + 1) / r
    lo = np.maximum(bounds[:-1, None], cells[None, :-1])
    hi = np.minimum(bounds[1:, None], cells[None, 1:])
    return np.clip(hi - lo, 0.0, None) * r


def _resample_blocks(values: np.ndarray, bounds: np.ndarray, r: int) -> np.ndarray:
    p = _overlap_weights(bounds, r)
    return p.T @ values @ p


def resample(b: Graphon, r_new: int) -> Graphon:
    """Area-weighted averaging of ``b`` onto an ``r_new`` grid."""
    if r_new < 1:
        raise ValueError("r_new must be >= 1")
    if r_new == b.resolution:
        return b
    bounds = np.arange(b.resolution + 1) / b.resolution
    out = _resample_blocks(b.grid, bounds, r_new)
    out = np.clip(0.5 * (out + out.T), 0.0, 1.0)
    return Graphon(out)


def largest_gap_blocks(degrees: np.ndarray, k: int) -> list:
    """Split nodes into at most ``k`` blocks at the ``k-1`` largest gaps of the sorted degrees.

    Nodes are sorted by degree descending (ties by node id); gap ties go to
    the leftmost position. Only positive gaps are cut, so nodes of equal
    degree always share a block and a regular graph is a single block.
    Returns node-index arrays in sorted order.
    """
    n = len(degrees)
    k = max(1, min(k, n))
    order = np.lexsort((np.arange(n), -np.asarray(degrees)))
    if k == 1:
        return [order]
    d = np.asarray(degrees)[order]
    gaps = d[:-1] - d[1:]
    positions = np.lexsort((np.arange(n - 1), -gaps))[: k - 1]
    cuts = np.sort(positions[gaps[positions] > 0]) + 1
    return np.split(order, cuts)


def block_densities(g: Graph, blocks: list) -> np.ndarray:
    """Empirical edge densities between and within blocks (0 for singleton diagonals)."""
    k = len(blocks)
    sizes = np.array([len(b) for b in blocks], dtype=np.float64)
    member = np.empty(g.node_count, dtype=np.int64)
    for a, nodes in enumerate(blocks):
        member[nodes] = a
    z = sp.csr_matrix((np.ones(g.node_count), (np.arange(g.node_count), member)), shape=(g.node_count, k))
    counts = np.asarray((z.T @ g.csr.astype(np.float64) @ z).todense())
    pairs = np.outer(sizes, sizes)
    np.fill_diagonal(pairs, sizes * (sizes - 1.0))
    out = np.zeros((k, k))
    np.divide(counts, pairs, out=out, where=pairs > 0)
    return out


def graph_step_function(g: Graph, r: int, block_count: int = None) -> np.ndarray:
    """Largest-gap block model of one graph, resampled onto an ``r`` grid."""
    k = r if block_count is None else block_count
    blocks = largest_gap_blocks(g.degrees, min(g.node_count, k))
    values = block_densities(g, blocks)
    sizes = np.array([len(b) for b in blocks])
    bounds = np.r_[0, np.cumsum(sizes)] / g.node_count
    return _resample_blocks(values, bounds, r)


def estimate_graphon(graphs: Sequence[Graph], cfg: EstimationConfig = EstimationConfig()) -> Graphon:
    """Largest-gap estimate per graph, averaged uniformly over graphs."""
    graphs = check_graphs(graphs)
    r = cfg.resolve(graphs)
    k = cfg.resolve_blocks(graphs)
    acc = np.zeros((r, r))
    for g in graphs:
        acc += graph_step_function(g, r, k)
    acc /= len(graphs)
    return Graphon(np.clip(0.5 * (acc + acc.T), 0.0, 1.0))


def sample_graph(f: Graphon, n: int, seed=None) -> Graph:
    """W-random graph: uniform latent positions, independent Bernoulli edges."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    latent = rng.random(n)
    probs = f(latent[:, None], latent[None, :])
    draws = rng.random((n, n))
    iu, ju = np.triu_indices(n, k=1)
    hit = draws[iu, ju] < probs[iu, ju]
    return Graph(n, np.column_stack([iu[hit], ju[hit]]))


def mix(basis: Sequence[Graphon], weights) -> Graphon:
    """Convex combination of graphons sharing one resolution."""
    if not len(basis):
        raise ValueError("basis must be non-empty")
    r = basis[0].resolution
    if any(b.resolution != r for b in basis):
        raise ValueError("all basis graphons must share a resolution; call resample() first")
    w = check_simplex(weights, k=len(basis))
    # elementwise accumulation keeps exactly symmetric inputs exactly symmetric
    out = np.zeros((r, r))
    for wi, b in zip(w, basis):
        out += wi * b.grid
    return Graphon(np.clip(out, 0.0, 1.0))


class LargestGapGraphonEstimator(BaseEstimator):
    """Estimate one step graphon from a collection of graphs.

    Parameters
    ----------
    resolution : int or "auto", default="auto"
        Output grid size. ``"auto"`` uses the rounded mean node count.
    block_count : int or "auto", default="auto"
        Largest-gap blocks per graph, capped at the graph's node count.

    Attributes
    ----------
    graphon_ : Graphon
    resolution_ : int
    n_graphs_ : int
    """

    def __init__(self, resolution=AUTO, block_count=AUTO):
        self.resolution = resolution
        self.block_count = block_count

    def fit(self, X, y=None):
        graphs = check_graphs(X)
        cfg = EstimationConfig(resolution=self.resolution, block_count=self.block_count)
        self.graphon_ = estimate_graphon(graphs, cfg)
        self.resolution_ = self.graphon_.resolution
        self.n_graphs_ = len(graphs)
        return self

    def sample(self, n: int, count: int = 1, seed=None) -> list:
        """Draw ``count`` graphs of ``n`` nodes from the fitted graphon."""
        seeds = np.random.SeedSequence(seed).spawn(count)
        return [sample_graph(self.graphon_, n, s) for s in seeds]
