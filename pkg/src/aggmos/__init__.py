"""Multi-objective A* over hidden objectives with aggregated solution costs."""

from .aggregation import (
    AggregationScheme,
    coverage_length_scheme,
    get_scheme,
    max_risk_length_scheme,
    path_cost,
    road_scheme,
    solution_cost,
    trivial_scheme,
)
from .core import ContractError, MOGraph, ParetoFrontier, dominates, eps_dominates, lex_less, pareto_filter
from .oracle import EnumerationBudget, EnumerationIncomplete, brute_force_pof, verify_eps_cover
from .search import SearchMode, SearchResult, graph_distance_heuristic, mos_astar

__all__ = [
    "AggregationScheme",
    "ContractError",
    "EnumerationBudget",
    "EnumerationIncomplete",
    "MOGraph",
    "ParetoFrontier",
    "SearchMode",
    "SearchResult",
    "brute_force_pof",
    "coverage_length_scheme",
    "dominates",
    "eps_dominates",
    "get_scheme",
    "graph_distance_heuristic",
    "lex_less",
    "max_risk_length_scheme",
    "mos_astar",
    "pareto_filter",
    "path_cost",
    "road_scheme",
    "solution_cost",
    "trivial_scheme",
    "verify_eps_cover",
]
