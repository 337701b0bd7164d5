"""Dataset catalog: a TOML file naming edge-list datasets, their domains and tasks.

Example::

    seed = 7

    [ego]
    hops = 2
    sample_size = 1000

    [[datasets]]
    name = "imdb"
    domain = "movies"
    task = "node"
    paths = ["imdb.edges"]

    [[datasets]]
    name = "zinc"
    task = "graph"
    paths = ["zinc/"]          # directory with index.txt or *.edges files

Relative paths resolve against the catalog's directory. Everything is
checked when the catalog is loaded, before any graph is read.
"""

from __future__ import annotations

import os
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .graph import ALL, EdgeListError, EgoNetConfig, load_edge_list, sample_ego_networks

TASKS = ("node", "graph")
INDEX_FILE = "index.txt"
EDGE_SUFFIX = ".edges"


class CatalogError(ValueError):
    """Invalid catalog contents or a dataset that cannot be read."""


@dataclass(frozen=True)
class Dataset:
    name: str
    domain: str
    task: str
    files: tuple
    ego: EgoNetConfig = field(default_factory=EgoNetConfig)


@dataclass(frozen=True)
class Catalog:
    datasets: tuple
    seed: int = 0
    source: Optional[str] = None

    @property
    def names(self) -> list:
        return [d.name for d in self.datasets]

    def get(self, name: str) -> Dataset:
        for d in self.datasets:
            if d.name == name:
                return d
        raise CatalogError(f"dataset {name!r} not in catalog (have: {', '.join(self.names)})")

    def subset(self, names: Iterable[str]) -> list:
        return [self.get(n) for n in names]


def _graph_files(entry: Path, dataset: str) -> list:
    if entry.is_file():
        return [entry]
    if not entry.is_dir():
        raise CatalogError(f"dataset {dataset!r}: path {entry} does not exist")
    index = entry / INDEX_FILE
    if index.is_file():
        files = []
        for lineno, raw in enumerate(index.read_text(encoding="utf-8").splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            f = entry / line
            if not f.is_file():
                raise CatalogError(f"dataset {dataset!r}: {index}:{lineno} lists missing file {line!r}")
            files.append(f)
    else:
        files = sorted(p for p in entry.iterdir() if p.suffix == EDGE_SUFFIX and p.is_file())
    if not files:
        raise CatalogError(f"dataset {dataset!r}: directory {entry} holds no graphs")
    return files


def _ego_config(raw, base: EgoNetConfig, where: str) -> EgoNetConfig:
    if raw is None:
        return base
    if not isinstance(raw, dict):
        raise CatalogError(f"{where}: 'ego' must be a table")
    unknown = set(raw) - {"hops", "sample_size"}
    if unknown:
        raise CatalogError(f"{where}: unknown ego keys {sorted(unknown)}")
    try:
        return EgoNetConfig(hops=int(raw.get("hops", base.hops)),
                            sample_size=raw.get("sample_size", base.sample_size), seed=base.seed)
    except (TypeError, ValueError) as exc:
        raise CatalogError(f"{where}: {exc}") from None


def parse_catalog(data: dict, root: Path, source: Optional[str] = None) -> Catalog:
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise CatalogError("catalog 'seed' must be a non-negative integer")
    default_ego = _ego_config(data.get("ego"), EgoNetConfig(), "catalog")
    entries = data.get("datasets")
    if not isinstance(entries, list) or not entries:
        raise CatalogError("catalog needs at least one [[datasets]] entry")

    datasets, seen = [], set()
    for i, entry in enumerate(entries):
        where = f"datasets[{i}]"
        if not isinstance(entry, dict):
            raise CatalogError(f"{where} must be a table")
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise CatalogError(f"{where}: missing 'name'")
        where = f"dataset {name!r}"
        if name in seen:
            raise CatalogError(f"duplicate dataset name {name!r}")
        seen.add(name)
        task = entry.get("task", "graph")
        if task not in TASKS:
            raise CatalogError(f"{where}: task must be one of {TASKS}, got {task!r}")
        paths = entry.get("paths")
        if isinstance(paths, str):
            paths = [paths]
        if not paths or not all(isinstance(p, str) for p in paths):
            raise CatalogError(f"{where}: 'paths' must be a non-empty list of strings")
        files = [f for p in paths for f in _graph_files(root / os.path.expanduser(p), name)]
        if task == "node" and len(files) != 1:
            raise CatalogError(f"{where}: node-task datasets take exactly one graph file, got {len(files)}")
        ego = _ego_config(entry.get("ego"), default_ego, where)
        domain = str(entry.get("domain", name))
        datasets.append(Dataset(name, domain, task, tuple(str(f) for f in files), ego))
    return Catalog(tuple(datasets), seed, source)


def load_catalog(path) -> Catalog:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise CatalogError(f"catalog {path} does not exist") from None
    except tomllib.TOMLDecodeError as exc:
        raise CatalogError(f"catalog {path}: {exc}") from None
    return parse_catalog(data, path.resolve().parent, str(path))


def dataset_seed(global_seed: int, name: str) -> int:
    """Per-dataset seed, stable across runs and independent of catalog order."""
    return int(np.random.SeedSequence([global_seed, zlib.crc32(name.encode("utf-8"))]).generate_state(1)[0])


def load_dataset_graphs(ds: Dataset) -> list:
    try:
        return [load_edge_list(f, label=ds.name) for f in ds.files]
    except EdgeListError as exc:
        raise CatalogError(f"dataset {ds.name!r}: {exc}") from None
    except OSError as exc:
        raise CatalogError(f"dataset {ds.name!r}: {exc}") from None


def materialize(ds: Dataset, role: str, global_seed: int = 0, sample_size=None) -> list:
    """Graphs a dataset contributes on one side of a feasibility study.

    Node-task datasets become 2-hop (by default) ego-networks: a sample of
    centers when pre-training, every node when downstream. ``sample_size``
    overrides the catalog's sample size for either role.
    """
    if role not in ("pretrain", "downstream"):
        raise ValueError(f"role must be 'pretrain' or 'downstream', got {role!r}")
    graphs = load_dataset_graphs(ds)
    if ds.task == "graph":
        return graphs
    size = sample_size if sample_size is not None else (ds.ego.sample_size if role == "pretrain" else ALL)
    cfg = EgoNetConfig(hops=ds.ego.hops, sample_size=size, seed=dataset_seed(global_seed, ds.name))
    return sample_ego_networks(graphs[0], cfg)


def splits_by_domain(catalog: Catalog, names: Sequence[str], seed: Optional[int] = None) -> dict:
    """Pre-training graphs grouped by domain label, in catalog order."""
    seed = catalog.seed if seed is None else seed
    splits = {}
    for ds in catalog.subset(names):
        splits.setdefault(ds.domain, []).extend(materialize(ds, "pretrain", seed))
    return splits
