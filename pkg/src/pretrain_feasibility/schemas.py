"""JSON Schemas (draft 2020-12) for every report the CLI writes.

Each report carries ``report`` (its kind) and ``schema_version``; the pair
selects the schema below.
"""

from __future__ import annotations

from .feasibility import BASIS_KINDS, SCHEMA_VERSION

_NUMBER = {"type": "number"}
_STRING = {"type": "string"}
_INT = {"type": "integer"}


def _report(kind: str, properties: dict, required: list) -> dict:
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": f"{kind} report",
        "type": "object",
        "properties": {"report": {"const": kind}, "schema_version": {"const": SCHEMA_VERSION}, **properties},
        "required": ["report", "schema_version", *required],
    }


_BASIS_RESULT = {
    "type": "object",
    "properties": {
        "kind": {"enum": list(BASIS_KINDS)},
        "optimized_distance": {"type": "number", "minimum": 0},
        "alpha_star": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}, "minItems": 1},
        "converged": {"type": "boolean"},
        "split_labels": {"type": "array", "items": _STRING},
        "steps": {"type": "integer", "minimum": 0},
    },
    "required": ["kind", "optimized_distance", "alpha_star", "converged", "split_labels", "steps"],
}

_FEASIBILITY_BODY = {
    "zeta": {"type": "number", "maximum": 0},
    "winning_basis": {"enum": list(BASIS_KINDS)},
    "per_basis": {"type": "array", "items": _BASIS_RESULT, "minItems": 1},
    "resolutions": {"type": "object", "properties": {"basis": _INT, "downstream": _INT}},
    "sample_sizes": {"type": "object"},
    "seeds": {"type": "object"},
    "config": {"type": "object"},
    "input_hashes": {"type": "object", "additionalProperties": _STRING},
    "timings": {"type": "object"},
}
_FEASIBILITY_REQUIRED = ["zeta", "winning_basis", "per_basis", "resolutions", "sample_sizes", "seeds",
                         "config", "input_hashes"]

SCHEMAS = {
    "feasibility": _report("feasibility", {
        **_FEASIBILITY_BODY,
        "downstream": _STRING,
        "pretrain": {"type": "array", "items": _STRING},
    }, _FEASIBILITY_REQUIRED + ["downstream", "pretrain"]),
    "select": _report("select", {
        "downstream": _STRING,
        "budget": {"type": "integer", "minimum": 1},
        "rows": {"type": "array", "items": {
            "type": "object",
            "properties": {
                "rank": {"type": "integer", "minimum": 1},
                "subset": {"type": "array", "items": _STRING, "minItems": 1},
                "zeta": _NUMBER,
                "winning_basis": {"enum": list(BASIS_KINDS)},
                "per_basis": {"type": "array", "items": _BASIS_RESULT},
            },
            "required": ["rank", "subset", "zeta", "winning_basis", "per_basis"],
        }},
    }, ["downstream", "budget", "rows"]),
    "basis": _report("basis", {
        "kind": {"enum": list(BASIS_KINDS)},
        "resolution": {"type": "integer", "minimum": 1},
        "elements": {"type": "array", "minItems": 1, "items": {
            "type": "object",
            "properties": {"file": _STRING, "split_label": _STRING, "digest": _STRING},
            "required": ["file", "split_label", "digest"],
        }},
        "datasets": {"type": "array", "items": _STRING},
        "seed": _INT,
        "input_hash": _STRING,
    }, ["kind", "resolution", "elements", "datasets", "seed", "input_hash"]),
    "graphon": _report("graphon", {
        "file": _STRING,
        "resolution": {"type": "integer", "minimum": 1},
        "digest": _STRING,
        "graph_count": {"type": "integer", "minimum": 1},
        "input_hash": _STRING,
    }, ["file", "resolution", "digest", "graph_count", "input_hash"]),
    "sample": _report("sample", {
        "graphon": _STRING,
        "graphon_digest": _STRING,
        "n": {"type": "integer", "minimum": 1},
        "count": {"type": "integer", "minimum": 0},
        "seed": _INT,
        "files": {"type": "array", "items": _STRING},
    }, ["graphon", "graphon_digest", "n", "count", "seed", "files"]),
    "features": _report("features", {
        "feature_names": {"type": "array", "items": _STRING},
        "graphs": {"type": "array", "items": {
            "type": "object",
            "properties": {"source": _STRING, "index": _INT,
                           "features": {"type": "object", "additionalProperties": _NUMBER}},
            "required": ["source", "index", "features"],
        }},
    }, ["feature_names", "graphs"]),
    "baseline": _report("baseline", {
        "method": _STRING,
        "value": _NUMBER,
        "downstream": _STRING,
        "pretrain": {"type": "array", "items": _STRING},
        "fraction": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "sample_sizes": {"type": "object"},
    }, ["method", "value", "downstream", "pretrain", "fraction"]),
    "correlate": _report("correlate", {
        "pearson": {"type": "number", "minimum": -1, "maximum": 1},
        "n": {"type": "integer", "minimum": 2},
        "pair_ids": {"type": "array", "items": _STRING},
    }, ["pearson", "n", "pair_ids"]),
    "verify": _report("verify", {
        "suite": {"enum": ["theorems", "gw", "features", "all"]},
        "seed": _INT,
        "passed": {"type": "boolean"},
        "checks": {"type": "array", "items": {
            "type": "object",
            "properties": {"name": _STRING, "suite": _STRING, "passed": {"type": "boolean"},
                           "details": {"type": "object"}},
            "required": ["name", "suite", "passed", "details"],
        }},
    }, ["suite", "seed", "passed", "checks"]),
}


def schema_for(report: dict) -> dict:
    """Schema matching a report's ``report`` field; KeyError for unknown kinds."""
    return SCHEMAS[report["report"]]
