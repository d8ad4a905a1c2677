"""The nine workloads, plus baseline variants for the traversal kernels."""

from .bc import bc, select_sources
from .bfs import bfs_direction_optimizing, bfs_pull, bfs_push, bfs_quadratic
from .cc import cc_label_propagation
from .pagerank import PageRankResult, pagerank
from .sgd import FactorModel, rmse, sgd_mf
from .spmv import spmv
from .sssp import default_delta, sssp_bellman, sssp_delta_stepping
from .symgs import (Coloring, check_coloring, diagonally_dominant_system, greedy_coloring,
                    residual_norm, symgs)
from .tc import triangle_count

__all__ = [
    "Coloring", "FactorModel", "PageRankResult",
    "bc", "bfs_direction_optimizing", "bfs_pull", "bfs_push", "bfs_quadratic",
    "cc_label_propagation", "check_coloring", "default_delta", "diagonally_dominant_system", "greedy_coloring",
    "pagerank", "residual_norm", "rmse", "select_sources", "sgd_mf", "spmv",
    "sssp_bellman", "sssp_delta_stepping", "symgs", "triangle_count",
]
