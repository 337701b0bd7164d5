"""Command-line entry point: ``pretrain-feasibility <command> ...``.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 verify-suite failure.
Every command writes deterministic JSON (sorted keys) to ``--out`` or stdout.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import METHODS, baseline_score, pearson
from .catalog import Catalog, CatalogError, load_catalog, load_dataset_graphs, materialize, splits_by_domain
from .features import FEATURE_NAMES, extract_features
from .feasibility import (BASIS_KINDS, SCHEMA_VERSION, OptimizerConfig, build_bases, feasibility, graphs_digest,
                          select_pretraining_data)
from .graph import EdgeListError, load_edge_list, write_edge_list
from .graphon import AUTO, EstimationConfig, GraphonValidationError, estimate_graphon, load_graphon, sample_graph, \
    save_graphon
from .gw import GwConfig
from .verify import SUITES, run_suite

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2, 3

class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (tuple, set)):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False, default=_json_default) + "\n"


def _emit(obj, out=None) -> None:
    text = dumps(obj)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _fraction(text):
    value = float(text)
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"fraction must lie in (0, 1], got {text}")
    return value


def _resolution(text):
    return AUTO if text == AUTO else _positive_int(text)


# ---- shared plumbing -------------------------------------------------------

def _seed(args, catalog: Catalog = None) -> int:
    if args.seed is not None:
        return args.seed
    return catalog.seed if catalog is not None else 0


def _configs(args, seed):
    cfg = OptimizerConfig(learning_rate=args.lr, max_steps=args.max_steps, kmeans_k=args.kmeans_k, seed=seed)
    est = EstimationConfig(resolution=args.resolution, block_count=args.block_count, seed=seed)
    gw = GwConfig(epsilon=args.epsilon)
    return cfg, est, gw


def _pretrain_names(catalog: Catalog, requested, downstream: str, allow_overlap: bool) -> list:
    names = list(requested) if requested else [n for n in catalog.names if n != downstream]
    if not names:
        raise UsageError("no pre-training datasets left after removing the downstream dataset")
    catalog.subset(names)
    if not allow_overlap:
        down_files = {os.path.realpath(f) for f in catalog.get(downstream).files}
        for name in names:
            shared = down_files & {os.path.realpath(f) for f in catalog.get(name).files}
            if name == downstream or shared:
                raise CatalogError(f"pre-training dataset {name!r} overlaps the downstream dataset "
                                   f"{downstream!r}; pass --allow-overlap to run anyway")
    return names


def _graphs_from_paths(paths) -> list:
    graphs = []
    for p in paths:
        p = Path(p)
        files = sorted(f for f in p.iterdir() if f.suffix == ".edges") if p.is_dir() else [p]
        if not files:
            raise EdgeListError(f"{p}: no .edges files")
        graphs += [load_edge_list(f, label=str(f)) for f in files]
    return graphs


# ---- commands --------------------------------------------------------------

def cmd_fit_graphon(args) -> int:
    if args.catalog:
        if not args.dataset:
            raise UsageError("--catalog needs --dataset")
        catalog = load_catalog(args.catalog)
        graphs = materialize(catalog.get(args.dataset), args.role, _seed(args, catalog))
    elif args.paths:
        graphs = _graphs_from_paths(args.paths)
    else:
        raise UsageError("give edge-list paths or --catalog/--dataset")
    est = EstimationConfig(resolution=args.resolution, block_count=args.block_count, seed=_seed(args))
    b = estimate_graphon(graphs, est)
    save_graphon(b, args.out)
    _emit({"report": "graphon", "schema_version": SCHEMA_VERSION, "file": str(args.out),
           "resolution": b.resolution, "digest": b.digest(), "graph_count": len(graphs),
           "input_hash": graphs_digest(graphs)}, args.manifest)
    return EXIT_OK


def cmd_fit_basis(args) -> int:
    catalog = load_catalog(args.catalog)
    seed = _seed(args, catalog)
    names = args.datasets or catalog.names
    splits = splits_by_domain(catalog, names, seed)
    cfg, est, _ = _configs(args, seed)
    basis = {b.kind: b for b in build_bases(splits, cfg, est)}[args.basis]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    elements = []
    for i, (g, label) in enumerate(zip(basis.elements, basis.split_labels)):
        name = f"{basis.kind}_{i:03d}.json"
        save_graphon(g, out / name)
        elements.append({"file": name, "split_label": label, "digest": g.digest()})
    manifest = {"report": "basis", "schema_version": SCHEMA_VERSION, "kind": basis.kind,
                "resolution": basis.resolution, "elements": elements, "datasets": list(names), "seed": seed,
                "input_hash": graphs_digest([g for gs in splits.values() for g in gs])}
    _emit(manifest, out / "manifest.json")
    _emit(manifest)
    return EXIT_OK


def cmd_feasibility(args) -> int:
    catalog = load_catalog(args.catalog)
    seed = _seed(args, catalog)
    names = _pretrain_names(catalog, args.pretrain, args.downstream, args.allow_overlap)
    splits = splits_by_domain(catalog, names, seed)
    downstream = materialize(catalog.get(args.downstream), "downstream", seed)
    cfg, est, gw = _configs(args, seed)
    report = feasibility(splits, downstream, cfg, est, gw, threads=args.threads)
    out = {"report": "feasibility", "downstream": args.downstream, "pretrain": names,
           **report.to_dict(include_timings=not args.no_timings)}
    _emit(out, args.out)
    return EXIT_OK


def cmd_select(args) -> int:
    catalog = load_catalog(args.catalog)
    seed = _seed(args, catalog)
    names = _pretrain_names(catalog, args.candidates, args.downstream, args.allow_overlap)
    if args.budget > len(names):
        raise UsageError(f"--budget {args.budget} exceeds the {len(names)} candidates")
    candidates = {n: materialize(catalog.get(n), "pretrain", seed) for n in names}
    downstream = materialize(catalog.get(args.downstream), "downstream", seed)
    cfg, est, gw = _configs(args, seed)
    rows = select_pretraining_data(candidates, downstream, args.budget, cfg, est, gw, threads=args.threads)
    _emit({"report": "select", "schema_version": SCHEMA_VERSION, "downstream": args.downstream,
           "budget": args.budget,
           "rows": [{"rank": i + 1, "subset": list(r.subset), "zeta": r.zeta,
                     "winning_basis": r.report.winning_basis, "per_basis": r.report.per_basis}
                    for i, r in enumerate(rows)]}, args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    b = load_graphon(args.graphon)
    seed = _seed(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(args.count)):
        name = f"graph_{i:05d}.edges"
        write_edge_list(sample_graph(b, args.n, child), out / name)
        files.append(name)
    manifest = {"report": "sample", "schema_version": SCHEMA_VERSION, "graphon": str(args.graphon),
                "graphon_digest": b.digest(), "n": args.n, "count": args.count, "seed": seed, "files": files}
    _emit(manifest, out / "manifest.json")
    _emit(manifest)
    return EXIT_OK


def cmd_features(args) -> int:
    if args.catalog:
        if not args.dataset:
            raise UsageError("--catalog needs --dataset")
        catalog = load_catalog(args.catalog)
        graphs = materialize(catalog.get(args.dataset), args.role, _seed(args, catalog))
        sources = [args.dataset] * len(graphs)
    elif args.paths or args.graph:
        graphs = _graphs_from_paths(args.paths + args.graph)
        sources = [g.label for g in graphs]
    else:
        raise UsageError("give edge-list paths or --catalog/--dataset")
    rows = [{"source": src, "index": i, "features": dict(zip(FEATURE_NAMES, map(float, extract_features(g))))}
            for i, (src, g) in enumerate(zip(sources, graphs))]
    _emit({"report": "features", "schema_version": SCHEMA_VERSION, "feature_names": list(FEATURE_NAMES),
           "graphs": rows}, args.out)
    return EXIT_OK


def _baseline_graphs(catalog, name, role, seed, fraction):
    ds = catalog.get(name)
    if ds.task == "node" and fraction is not None:
        n = load_dataset_graphs(ds)[0].node_count
        return materialize(ds, role, seed, sample_size=max(1, math.ceil(fraction * n)))
    return materialize(ds, role, seed)


def cmd_baseline(args) -> int:
    catalog = load_catalog(args.catalog)
    seed = _seed(args, catalog)
    names = _pretrain_names(catalog, args.pretrain, args.downstream, args.allow_overlap)
    pre = [g for n in names for g in _baseline_graphs(catalog, n, "pretrain", seed, args.fraction)]
    down = _baseline_graphs(catalog, args.downstream, "downstream", seed, args.fraction)
    measure = baseline_score(pre, down, args.method)
    _emit({"report": "baseline", "schema_version": SCHEMA_VERSION, "method": measure.method,
           "value": measure.value, "downstream": args.downstream, "pretrain": names,
           "fraction": 1.0 if args.fraction is None else args.fraction,
           "sample_sizes": {"pretrain": len(pre), "downstream": len(down)}}, args.out)
    return EXIT_OK


CSV_COLUMNS = ("pair_id", "score", "downstream_performance")


def read_correlate_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in CSV_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}; expected {list(CSV_COLUMNS)}")
        ids, xs, ys = [], [], []
        for lineno, row in enumerate(reader, start=2):
            try:
                x, y = float(row["score"]), float(row["downstream_performance"])
            except (TypeError, ValueError):
                raise ValueError(f"{path}:{lineno}: non-numeric score or performance") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError(f"{path}:{lineno}: non-finite value")
            ids.append(row["pair_id"])
            xs.append(x)
            ys.append(y)
    return ids, xs, ys


def cmd_correlate(args) -> int:
    ids, xs, ys = read_correlate_csv(args.csv)
    _emit({"report": "correlate", "schema_version": SCHEMA_VERSION, "pearson": pearson(xs, ys), "n": len(xs),
           "pair_ids": ids}, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    result = run_suite(args.suite, _seed(args))
    _emit({"report": "verify", "schema_version": SCHEMA_VERSION, **result}, args.out)
    return EXIT_OK if result["passed"] else EXIT_VERIFY


# ---- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_non_negative_int, default=None,
                        help="global seed (default: the catalog's seed, else 0)")
    common.add_argument("--threads", type=_positive_int, default=1, help="worker threads")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--epsilon", type=_positive_float, default=GwConfig.epsilon, help="GW entropic regularization")
    model.add_argument("--lr", type=_positive_float, default=OptimizerConfig.learning_rate)
    model.add_argument("--max-steps", type=_positive_int, default=OptimizerConfig.max_steps)
    model.add_argument("--kmeans-k", type=_positive_int, default=OptimizerConfig.kmeans_k)
    model.add_argument("--resolution", type=_resolution, default=AUTO, help="graphon resolution or 'auto'")
    model.add_argument("--block-count", type=_resolution, default=AUTO,
                       help="largest-gap blocks per graph or 'auto'")

    parser = _Parser(prog="pretrain-feasibility", description="Graphon-based feasibility scores for graph pre-training data.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit-graphon", parents=[common], help="estimate one graphon from edge lists")
    p.add_argument("paths", nargs="*", help="edge-list files or directories of *.edges")
    p.add_argument("--catalog")
    p.add_argument("--dataset")
    p.add_argument("--role", choices=("pretrain", "downstream"), default="pretrain")
    p.add_argument("--resolution", type=_resolution, default=AUTO)
    p.add_argument("--block-count", type=_resolution, default=AUTO)
    p.add_argument("--manifest", help="where to write the summary (default: stdout)")
    p.set_defaults(func=cmd_fit_graphon, out_required=True)

    p = sub.add_parser("fit-basis", parents=[common, model], help="write a graphon basis and manifest")
    p.add_argument("--catalog", required=True)
    p.add_argument("--basis", choices=BASIS_KINDS, required=True)
    p.add_argument("--datasets", nargs="+", help="datasets to use (default: all)")
    p.set_defaults(func=cmd_fit_basis, out_required=True)

    p = sub.add_parser("feasibility", parents=[common, model], help="score pre-training data for a downstream set")
    p.add_argument("--catalog", required=True)
    p.add_argument("--downstream", required=True)
    p.add_argument("--pretrain", nargs="+", help="pre-training datasets (default: all others)")
    p.add_argument("--allow-overlap", action="store_true", help="allow the downstream data on both sides")
    p.add_argument("--no-timings", action="store_true", help="omit wall-clock timings")
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("select", parents=[common, model], help="rank candidate subsets by feasibility")
    p.add_argument("--catalog", required=True)
    p.add_argument("--downstream", required=True)
    p.add_argument("--budget", type=_positive_int, required=True)
    p.add_argument("--candidates", nargs="+", help="candidate datasets (default: all others)")
    p.add_argument("--allow-overlap", action="store_true")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("sample", parents=[common], help="draw W-random graphs from a graphon file")
    p.add_argument("--graphon", required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--count", type=_non_negative_int, required=True)
    p.set_defaults(func=cmd_sample, out_required=True)

    p = sub.add_parser("features", parents=[common], help="topological feature vectors")
    p.add_argument("paths", nargs="*")
    p.add_argument("--graph", action="append", default=[], help="edge-list file (repeatable)")
    p.add_argument("--catalog")
    p.add_argument("--dataset")
    p.add_argument("--role", choices=("pretrain", "downstream"), default="pretrain")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("baseline", parents=[common], help="comparison transferability measures")
    p.add_argument("--catalog", required=True)
    p.add_argument("--downstream", required=True)
    p.add_argument("--pretrain", nargs="+")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--fraction", type=_fraction, default=None,
                   help="share of nodes used as ego-net centers on node-task datasets")
    p.add_argument("--allow-overlap", action="store_true")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("correlate", parents=[common], help="Pearson correlation of scores and performance")
    p.add_argument("--csv", required=True, help=f"CSV with columns {', '.join(CSV_COLUMNS)}")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("verify", parents=[common], help="run the built-in property suites")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "out_required", False) and not args.out:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"{parser.prog} {args.command}: error: --out is required\n")
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"{parser.prog} {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except (CatalogError, EdgeListError, GraphonValidationError, ValueError, OSError) as exc:
        sys.stderr.write(f"{parser.prog} {args.command}: invalid input: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
