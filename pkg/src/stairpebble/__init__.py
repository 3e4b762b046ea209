"""Exact optimal pebbling of staircase graphs and grid windows."""

from ._kernels import BACKEND, HAS_NUMBA
from .grid import (
    GridCoord,
    PebbleGraph,
    QuotientMap,
    StaircaseSpec,
    Variant,
    build_grid_window,
    build_staircase,
    collapse,
    merge_negative_diagonals_7to6,
    path_graph,
    slash_to_path_map,
)
from .pebble import (
    Distribution,
    Move,
    ReachQuery,
    SearchLimit,
    apply_move,
    first_unreachable,
    is_k_reachable,
    is_k_solvable,
    split_at_cut,
)
from .search import Budget, BudgetExhausted, SearchReport, k_optimal_size_path, optimal_pebbling_number

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HAS_NUMBA",
    "Budget",
    "BudgetExhausted",
    "Distribution",
    "GridCoord",
    "Move",
    "PebbleGraph",
    "QuotientMap",
    "ReachQuery",
    "SearchLimit",
    "SearchReport",
    "StaircaseSpec",
    "Variant",
    "apply_move",
    "build_grid_window",
    "build_staircase",
    "collapse",
    "first_unreachable",
    "is_k_reachable",
    "is_k_solvable",
    "k_optimal_size_path",
    "merge_negative_diagonals_7to6",
    "optimal_pebbling_number",
    "path_graph",
    "slash_to_path_map",
    "split_at_cut",
]
