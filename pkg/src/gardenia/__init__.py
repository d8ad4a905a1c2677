"""Multicore graph-analytics kernels with serial oracles and a benchmark harness."""

from .errors import GardeniaError
from .graph import DegreeStats, EdgeList, Graph, build_graph, degree_stats, transpose

__version__ = "0.1.0"

__all__ = ["DegreeStats", "EdgeList", "GardeniaError", "Graph", "build_graph",
           "degree_stats", "transpose", "__version__"]
