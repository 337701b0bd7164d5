"""Pre-training feasibility: graphon bases, mixture fitting under GW, and data selection."""

from __future__ import annotations

import hashlib
import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Mapping, NamedTuple, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.cluster import KMeans
from sklearn.utils.validation import check_is_fitted

from .features import extract_features
from .graph import Graph
from .graphon import AUTO, EstimationConfig, Graphon, estimate_graphon, mix
from .gw import GwConfig, gw_distance, gw_gradient_wrt_first
from ._validation import check_graphs, check_splits

SCHEMA_VERSION = "1.0"
BASIS_KINDS = ("integrated", "domain", "topological")


@dataclass(frozen=True)
class OptimizerConfig:
    learning_rate: float = 0.05
    max_steps: int = 300
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    tol: float = 1e-5
    kmeans_k: int = 5
    kmeans_max_iter: int = 300
    standardize_features: bool = True
    seed: int = 0

    def __post_init__(self):
        for name in ("learning_rate", "max_steps", "adam_eps", "tol", "kmeans_k", "kmeans_max_iter"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("Adam betas must lie in [0, 1)")


@dataclass(frozen=True, eq=False)
class GraphonBasis:
    kind: str
    elements: tuple
    split_labels: tuple

    def __post_init__(self):
        if self.kind not in BASIS_KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}")
        elements = tuple(self.elements)
        if not elements:
            raise ValueError("a basis needs at least one graphon")
        if len({b.resolution for b in elements}) != 1:
            raise ValueError("basis graphons must share one resolution")
        if self.kind == "integrated" and len(elements) != 1:
            raise ValueError("the integrated basis has exactly one element")
        if len(self.split_labels) != len(elements):
            raise ValueError("one split label per element")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "split_labels", tuple(str(s) for s in self.split_labels))

    @property
    def resolution(self) -> int:
        return self.elements[0].resolution

    def __len__(self):
        return len(self.elements)


class MixtureState:
    """Softmax-parameterized simplex weights with Adam moment buffers."""

    def __init__(self, k: int):
        self.logits = np.zeros(k)
        self.m = np.zeros(k)
        self.v = np.zeros(k)
        self.step_count = 0

    @property
    def weights(self) -> np.ndarray:
        z = np.exp(self.logits - self.logits.max())
        return z / z.sum()

    def logit_gradient(self, weight_grad: np.ndarray) -> np.ndarray:
        w = self.weights
        return w * (weight_grad - np.dot(w, weight_grad))

    def adam_step(self, grad: np.ndarray, cfg: OptimizerConfig) -> None:
        self.step_count += 1
        self.m = cfg.beta1 * self.m + (1 - cfg.beta1) * grad
        self.v = cfg.beta2 * self.v + (1 - cfg.beta2) * grad ** 2
        m_hat = self.m / (1 - cfg.beta1 ** self.step_count)
        v_hat = self.v / (1 - cfg.beta2 ** self.step_count)
        self.logits = self.logits - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)


class MixtureFit(NamedTuple):
    alpha_star: np.ndarray
    distance: float
    trace: np.ndarray
    converged: bool
    steps: int

    @property
    def best_trace(self) -> np.ndarray:
        return np.minimum.accumulate(self.trace)


def graphs_digest(graphs: Sequence[Graph]) -> str:
    h = hashlib.sha256()
    for g in graphs:
        h.update(np.int64(g.node_count).tobytes())
        h.update(np.ascontiguousarray(g.edges, dtype=np.int64).tobytes())
    return h.hexdigest()


def cluster_features(points, k: int, max_iter: int = 300, seed: int = 0, standardize: bool = True) -> np.ndarray:
    """k-means labels with k clamped to the number of distinct points.

    Labels are renumbered by first appearance so the output does not depend
    on the solver's internal cluster order.
    """
    x = np.asarray(points, dtype=np.float64)
    if standardize and len(x) > 1:
        std = x.std(axis=0)
        x = (x - x.mean(axis=0)) / np.where(std > 0, std, 1.0)
    k = int(min(k, len(np.unique(x, axis=0))))
    if k <= 1:
        return np.zeros(len(x), dtype=np.int64)
    km = KMeans(n_clusters=k, init="k-means++", n_init=1, max_iter=max_iter,
                algorithm="lloyd", random_state=seed).fit(x)
    _, first = np.unique(km.labels_, return_index=True)
    remap = np.empty(k, dtype=np.int64)
    remap[km.labels_[np.sort(first)]] = np.arange(k)
    return remap[km.labels_]


def _pooled_estimation(graphs, est: EstimationConfig) -> EstimationConfig:
    return EstimationConfig(resolution=est.resolve(graphs), block_count=est.resolve_blocks(graphs), seed=est.seed)


def build_bases(splits: Mapping[str, Sequence[Graph]], cfg: OptimizerConfig = OptimizerConfig(),
                est: EstimationConfig = EstimationConfig()) -> list:
    """Integrated, domain and topological bases at one shared resolution."""
    splits = check_splits(splits)
    pooled = [g for graphs in splits.values() for g in graphs]
    shared = _pooled_estimation(pooled, est)

    integrated = GraphonBasis("integrated", (estimate_graphon(pooled, shared),), ("all",))
    domain = GraphonBasis("domain", tuple(estimate_graphon(gs, shared) for gs in splits.values()),
                          tuple(splits))

    features = np.vstack([extract_features(g) for g in pooled])
    labels = cluster_features(features, cfg.kmeans_k, cfg.kmeans_max_iter, cfg.seed, cfg.standardize_features)
    clusters = [[g for g, lab in zip(pooled, labels) if lab == c] for c in range(labels.max() + 1)]
    topological = GraphonBasis("topological", tuple(estimate_graphon(c, shared) for c in clusters),
                               tuple(f"cluster{c}" for c in range(len(clusters))))
    return [integrated, domain, topological]


def _element_distance(b: Graphon, b_down: Graphon, gw: GwConfig, cache: Optional[dict]) -> float:
    if cache is None:
        return gw_distance(b, b_down, gw).value
    key = (b.digest(), b_down.digest(), gw)
    if key not in cache:
        cache[key] = gw_distance(b, b_down, gw).value
    return cache[key]


def optimize_mixture(basis: GraphonBasis, b_down: Graphon, cfg: OptimizerConfig = OptimizerConfig(),
                     gw: GwConfig = GwConfig(), cache: Optional[dict] = None) -> MixtureFit:
    """Minimize GW(sum_i alpha_i B_i, b_down) over the simplex with Adam on softmax logits.

    Each step re-solves the transport plan and differentiates the
    fixed-plan objective (envelope gradient). The first solve is a full
    multi-start one; later solves warm-start from the previous plan.

    The GW value is not convex in the weights, so the uniform start can
    settle in a basin that misses a basis element matching the target
    under a block permutation. Every one-hot weight vector is scored up
    front and competes for the best-seen result; ``trace`` holds only the
    Adam steps. ``cache`` memoizes these single-element distances by
    graphon digest, so bases and subsets sharing an element solve it once.
    """
    elements = basis.elements if isinstance(basis, GraphonBasis) else tuple(basis)
    k = len(elements)
    if k == 1:
        d = _element_distance(elements[0], b_down, gw, cache)
        return MixtureFit(np.ones(1), d, np.array([d]), True, 0)

    stack = np.stack([b.grid for b in elements])
    state = MixtureState(k)
    best_w, best_d = state.weights, np.inf
    for i, b in enumerate(elements):
        d = _element_distance(b, b_down, gw, cache)
        if d < best_d:
            best_d, best_w = d, np.eye(k)[i]
    trace = []
    converged = False
    prev = plan = None
    for _ in range(cfg.max_steps):
        w = state.weights
        res = gw_distance(mix(elements, w), b_down, gw, init=plan)
        plan = res.plan
        trace.append(res.value)
        if res.value < best_d:
            best_d, best_w = res.value, w
        if prev is not None and abs(prev - res.value) < cfg.tol:
            converged = True
            break
        prev = res.value
        grad = gw_gradient_wrt_first(mix(elements, w), b_down, res.plan)
        weight_grad = np.tensordot(stack, grad, axes=([1, 2], [0, 1]))
        state.adam_step(state.logit_gradient(weight_grad), cfg)
    return MixtureFit(best_w, float(best_d), np.asarray(trace), converged, len(trace))


@dataclass
class BasisResult:
    kind: str
    optimized_distance: float
    alpha_star: list
    converged: bool
    split_labels: list
    steps: int


@dataclass
class FeasibilityReport:
    zeta: float
    winning_basis: str
    per_basis: list
    resolutions: dict
    sample_sizes: dict
    seeds: dict
    config: dict
    input_hashes: dict
    timings: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self, include_timings: bool = True) -> dict:
        out = asdict(self)
        if not include_timings:
            out.pop("timings")
        return out


def _run_bases(bases, b_down, cfg, gw, threads, cache):
    def job(basis):
        t0 = time.perf_counter()
        fit = optimize_mixture(basis, b_down, cfg, gw, cache)
        return fit, time.perf_counter() - t0

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(job, bases))
    return [job(b) for b in bases]


def feasibility(pretrain_splits: Mapping[str, Sequence[Graph]], downstream_graphs: Sequence[Graph],
                cfg: OptimizerConfig = OptimizerConfig(), est: EstimationConfig = EstimationConfig(),
                gw: GwConfig = GwConfig(), threads: int = 1, b_down: Optional[Graphon] = None,
                bases: Optional[list] = None, cache: Optional[dict] = None) -> FeasibilityReport:
    """Feasibility score zeta = -min over bases of the optimized mixture distance.

    ``cache`` (a dict) may be shared between calls against the same
    downstream graphon; results do not depend on it.
    """
    t_start = time.perf_counter()
    splits = check_splits(pretrain_splits, name="pretrain_splits")
    downstream = check_graphs(downstream_graphs, name="downstream_graphs")
    if b_down is None:
        b_down = estimate_graphon(downstream, _pooled_estimation(downstream, est))
    t_est = time.perf_counter()
    if bases is None:
        bases = build_bases(splits, cfg, est)
    t_bases = time.perf_counter()

    fits = _run_bases(bases, b_down, cfg, gw, threads, {} if cache is None else cache)
    per_basis = [
        BasisResult(b.kind, fit.distance, [float(a) for a in fit.alpha_star], bool(fit.converged),
                    list(b.split_labels), int(fit.steps))
        for b, (fit, _) in zip(bases, fits)
    ]
    best = min(range(len(per_basis)), key=lambda i: (per_basis[i].optimized_distance, i))
    pooled = [g for gs in splits.values() for g in gs]
    return FeasibilityReport(
        zeta=-per_basis[best].optimized_distance,
        winning_basis=per_basis[best].kind,
        per_basis=[asdict(p) for p in per_basis],
        resolutions={"basis": bases[0].resolution, "downstream": b_down.resolution},
        sample_sizes={"pretrain": {k: len(v) for k, v in splits.items()}, "downstream": len(downstream)},
        seeds={"optimizer": cfg.seed, "estimation": est.seed},
        config={"optimizer": asdict(cfg), "estimation": asdict(est), "gw": asdict(gw)},
        input_hashes={"pretrain": graphs_digest(pooled), "downstream": graphs_digest(downstream)},
        timings={
            "estimate_downstream_s": t_est - t_start,
            "build_bases_s": t_bases - t_est,
            "per_basis_s": {b.kind: dt for b, (_, dt) in zip(bases, fits)},
            "total_s": time.perf_counter() - t_start,
        },
    )


class SelectionRow(NamedTuple):
    subset: tuple
    zeta: float
    report: FeasibilityReport


def select_pretraining_data(candidates: Mapping[str, Sequence[Graph]], downstream: Sequence[Graph], budget: int,
                            cfg: OptimizerConfig = OptimizerConfig(), est: EstimationConfig = EstimationConfig(),
                            gw: GwConfig = GwConfig(), threads: int = 1) -> list:
    """Score every size-``budget`` subset of candidates; best zeta first, ties by name."""
    if budget < 1:
        raise ValueError("budget must be at least 1")
    candidates = check_splits(candidates, name="candidates")
    if budget > len(candidates):
        raise ValueError(f"budget {budget} exceeds the {len(candidates)} candidates")
    downstream = check_graphs(downstream, name="downstream")
    b_down = estimate_graphon(downstream, _pooled_estimation(downstream, est))
    subsets = list(itertools.combinations(sorted(candidates), budget))
    cache = {}

    def job(subset):
        return feasibility({name: candidates[name] for name in subset}, downstream, cfg, est, gw, 1, b_down,
                           cache=cache)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(job, subsets))
    else:
        reports = [job(s) for s in subsets]
    rows = [SelectionRow(s, r.zeta, r) for s, r in zip(subsets, reports)]
    return sorted(rows, key=lambda row: (-row.zeta, row.subset))


class FeasibilityEstimator(BaseEstimator):
    """Fit graphon bases on pre-training graphs, then score downstream datasets.

    ``fit`` takes either a mapping ``{domain: [Graph, ...]}`` or a list of
    graphs split by their ``label``. ``score`` returns zeta (higher means the
    downstream data is closer to the span of the pre-training generators).

    Attributes
    ----------
    bases_ : list of GraphonBasis
    resolution_ : int
    report_ : FeasibilityReport
        Report from the most recent ``score`` / ``report`` call.
    """

    def __init__(self, learning_rate=0.05, max_steps=300, tol=1e-5, kmeans_k=5, kmeans_max_iter=300,
                 standardize_features=True, resolution=AUTO, block_count=AUTO, epsilon=0.05,
                 outer_iters=200, sinkhorn_iters=100, gw_tol=1e-6, n_jobs=1, random_state=0):
        self.learning_rate = learning_rate
        self.max_steps = max_steps
        self.tol = tol
        self.kmeans_k = kmeans_k
        self.kmeans_max_iter = kmeans_max_iter
        self.standardize_features = standardize_features
        self.resolution = resolution
        self.block_count = block_count
        self.epsilon = epsilon
        self.outer_iters = outer_iters
        self.sinkhorn_iters = sinkhorn_iters
        self.gw_tol = gw_tol
        self.n_jobs = n_jobs
        self.random_state = random_state

    def _configs(self):
        cfg = OptimizerConfig(learning_rate=self.learning_rate, max_steps=self.max_steps, tol=self.tol,
                              kmeans_k=self.kmeans_k, kmeans_max_iter=self.kmeans_max_iter,
                              standardize_features=self.standardize_features, seed=self.random_state)
        est = EstimationConfig(resolution=self.resolution, block_count=self.block_count, seed=self.random_state)
        gw = GwConfig(epsilon=self.epsilon, outer_iters=self.outer_iters, sinkhorn_iters=self.sinkhorn_iters,
                      tol=self.gw_tol)
        return cfg, est, gw

    def fit(self, X, y=None):
        cfg, est, _ = self._configs()
        self.splits_ = check_splits(X, name="X")
        self.bases_ = build_bases(self.splits_, cfg, est)
        self.resolution_ = self.bases_[0].resolution
        return self

    def report(self, X) -> FeasibilityReport:
        check_is_fitted(self, "bases_")
        cfg, est, gw = self._configs()
        self.report_ = feasibility(self.splits_, X, cfg, est, gw, threads=self.n_jobs, bases=self.bases_)
        return self.report_

    def score(self, X, y=None) -> float:
        return self.report(X).zeta
