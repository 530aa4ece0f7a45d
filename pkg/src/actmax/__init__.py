"""Seed selection maximizing expected interaction strength on arcs whose both
endpoints become active under independent-cascade or linear-threshold
diffusion.

The package provides the graph container and edge-list ingestion, exact
enumeration oracles for small instances, reverse-reachable hyperedge polling,
greedy coverage over hyperedge pools, stopping-rule estimation, selection
algorithms (including the sandwich framework with its computable quality
bound), and a command line experiment harness.
"""

from .errors import (ActivityMaxError, DegenerateWeightsError, EdgeListError,
                     EnumerationLimitError, ModelViolationError)
from .graph import (DIFFUSION, DIRECTED, UNDIRECTED, UNIFORM, Graph,
                    IngestionReport, assign_activity, assign_diffusion_params,
                    from_arcs, load_edge_list, to_edge_list)
from .exact import (ExactEvaluator, LiveEdgeGraph, enumerate_outcomes,
                    exact_objective, forward_reachable, mc_forward_estimate,
                    sample_live_edge)
from .polling import (IC, LT, EdgeStateCache, PairHyperedge, PollingEngine,
                      generate_lower_hyperedge, generate_pair_hyperedge,
                      generate_upper_hyperedge, reverse_reachable)
from .coverage import (CoverageState, GreedyResult, PairIndex, PairPool,
                       SingleIndex, SinglePool, build_index, degree,
                       greedy_pair_cover, greedy_single_cover, marginal_gain)
from .selector import (ALGORITHMS, SandwichResult, SelectionReport, SsaResult,
                       StoppingConfig, StoppingEstimate, degree_seeds,
                       estimate_with_stopping, infmax_seeds, interaction_ratio,
                       pagerank_scores, pagerank_seeds, sandwich_select,
                       select, ssa_select, upsilon, upsilon1)

__version__ = "0.1.0"

__all__ = [
    "ActivityMaxError", "DegenerateWeightsError", "EdgeListError",
    "EnumerationLimitError", "ModelViolationError",
    "DIFFUSION", "DIRECTED", "UNDIRECTED", "UNIFORM", "Graph",
    "IngestionReport", "assign_activity", "assign_diffusion_params",
    "from_arcs", "load_edge_list", "to_edge_list",
    "ExactEvaluator", "LiveEdgeGraph", "enumerate_outcomes", "exact_objective",
    "forward_reachable", "mc_forward_estimate", "sample_live_edge",
    "IC", "LT", "EdgeStateCache", "PairHyperedge", "PollingEngine",
    "generate_lower_hyperedge", "generate_pair_hyperedge",
    "generate_upper_hyperedge", "reverse_reachable",
    "CoverageState", "GreedyResult", "PairIndex", "PairPool", "SingleIndex",
    "SinglePool", "build_index", "degree", "greedy_pair_cover",
    "greedy_single_cover", "marginal_gain",
    "ALGORITHMS", "SandwichResult", "SelectionReport", "SsaResult",
    "StoppingConfig", "StoppingEstimate", "degree_seeds",
    "estimate_with_stopping", "infmax_seeds", "interaction_ratio",
    "pagerank_scores", "pagerank_seeds", "sandwich_select", "select",
    "ssa_select", "upsilon", "upsilon1",
    "__version__",
]
