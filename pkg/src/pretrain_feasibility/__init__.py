"""Graphon-based feasibility scores for choosing graph pre-training data."""

from .baselines import METHODS, baseline_score, mmd, pearson
from .catalog import Catalog, CatalogError, load_catalog
from .feasibility import (FeasibilityEstimator, FeasibilityReport, GraphonBasis, OptimizerConfig, build_bases,
                          feasibility, optimize_mixture, select_pretraining_data)
from .features import FEATURE_NAMES, TopologicalFeatureExtractor, extract_features
from .graph import EgoNetConfig, Graph, ego_network, load_edge_list, sample_ego_networks, write_edge_list
from .graphon import (EstimationConfig, Graphon, GraphonValidationError, LargestGapGraphonEstimator,
                      estimate_graphon, load_graphon, mix, resample, sample_graph, save_graphon)
from .gw import GwConfig, GwResult, gw_distance, gw_gradient_wrt_first
from .motifs import MOTIFS, Motif, cut_norm, hom_density_graph, hom_density_graphon

__version__ = "0.1.0"

__all__ = [
    "METHODS", "baseline_score", "mmd", "pearson",
    "Catalog", "CatalogError", "load_catalog",
    "FeasibilityEstimator", "FeasibilityReport", "GraphonBasis", "OptimizerConfig", "build_bases", "feasibility",
    "optimize_mixture", "select_pretraining_data",
    "FEATURE_NAMES", "TopologicalFeatureExtractor", "extract_features",
    "EgoNetConfig", "Graph", "ego_network", "load_edge_list", "sample_ego_networks", "write_edge_list",
    "EstimationConfig", "Graphon", "GraphonValidationError", "LargestGapGraphonEstimator", "estimate_graphon",
    "load_graphon", "mix", "resample", "sample_graph", "save_graphon",
    "GwConfig", "GwResult", "gw_distance", "gw_gradient_wrt_first",
    "MOTIFS", "Motif", "cut_norm", "hom_density_graph", "hom_density_graphon",
]
