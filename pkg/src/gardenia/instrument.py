"""Software irregularity proxies: per-iteration traversal traces and
partition work-imbalance statistics.

These are algorithm-level stand-ins for hardware divergence counters and are
reported under their own names (frontier size, edges scanned, work CV); they
do not claim equivalence with any counter.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import parallel
from .errors import ParameterError

TRACE_COLUMNS = ("iter", "frontier_size", "edges_scanned", "direction")


@dataclass
class TraceRecord:
    iter: int
    frontier_size: int
    edges_scanned: int
    direction: str | None = None
    phase: str | None = None
    bucket: int | None = None


@dataclass
class IterationTrace:
    """One record per traversal iteration, in execution order.

    Kernels call :meth:`record` at each level-synchronous checkpoint; the
    edge count is the sum of per-worker counters returned by that step.
    """

    kernel: str = ""
    records: list[TraceRecord] = field(default_factory=list)
    result: np.ndarray | None = None

    def record(self, frontier_size: int, edges_scanned: int, direction: str | None = None,
               phase: str | None = None, bucket: int | None = None) -> None:
        self.records.append(TraceRecord(len(self.records), int(frontier_size),
                                        int(edges_scanned), direction, phase, bucket))

    def __len__(self) -> int:
        return len(self.records)

    @property
    def frontier_sizes(self) -> list[int]:
        return [r.frontier_size for r in self.records]

    @property
    def edges_scanned(self) -> int:
        return sum(r.edges_scanned for r in self.records)

    @property
    def directions(self) -> list[str | None]:
        return [r.direction for r in self.records]

    def to_csv(self, path_or_file) -> None:
        """Columns: iter, frontier_size, edges_scanned, direction (blank when unset)."""
        if hasattr(path_or_file, "write"):
            self._write(path_or_file)
        else:
            with open(path_or_file, "w", newline="") as fh:
                self._write(fh)

    def _write(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for r in self.records:
            writer.writerow([r.iter, r.frontier_size, r.edges_scanned, r.direction or ""])


def _traversal_kernels():
    from .kernels import bfs, sssp
    from .kernels.bc import bc as bc_kernel

    return {
        "bfs": bfs.bfs_direction_optimizing,
        "bfs_push": bfs.bfs_push,
        "bfs_pull": bfs.bfs_pull,
        "bfs_do": bfs.bfs_direction_optimizing,
        "bfs_quadratic": bfs.bfs_quadratic,
        "sssp": sssp.sssp_delta_stepping,
        "sssp_bellman": sssp.sssp_bellman,
        "sssp_delta": sssp.sssp_delta_stepping,
        "bc": lambda g, source, trace=None, **kw: bc_kernel(g, sources=[source], trace=trace, **kw),
    }


TRAVERSAL_KERNELS = ("bfs", "bfs_push", "bfs_pull", "bfs_do", "bfs_quadratic",
                     "sssp", "sssp_bellman", "sssp_delta", "bc")


def trace_traversal(kernel: str, g, source: int, **params) -> IterationTrace:
    """Run a traversal kernel from ``source`` and return its iteration trace.

    For ``bc`` the trace covers the forward (level discovery) pass of the
    single source. Extra keyword arguments go to the kernel.
    """
    table = _traversal_kernels()
    if kernel not in table:
        raise ParameterError(f"{kernel!r} is not a traversal kernel; choose from {TRAVERSAL_KERNELS}")
    trace = IterationTrace(kernel)
    trace.result = table[kernel](g, source, trace=trace, **params)
    return trace


@dataclass
class ImbalanceStats:
    partitions: int
    work_cv: float
    max_over_mean: float
    work: np.ndarray

    def summary(self) -> str:
        return (f"partitions={self.partitions} work_cv={self.work_cv:.4f} "
                f"max_over_mean={self.max_over_mean:.4f}")


PARTITIONINGS = ("equal_vertices", "equal_edges")


def partition_work(g, partitioning: str, workers: int) -> np.ndarray:
    """Out-edge work assigned to each of ``workers`` static partitions.

    ``equal_vertices`` gives each worker a contiguous block of ~n/workers
    rows. ``equal_edges`` cuts the concatenated neighbor lists at edge
    granularity, as the traversal kernels do, so a hub can be shared.
    """
    if workers < 1:
        raise ParameterError("workers must be >= 1")
    if partitioning == "equal_vertices":
        bounds = parallel.equal_bounds(g.n, workers)
        return np.diff(g.row_offsets[bounds]).astype(np.int64)
    if partitioning == "equal_edges":
        return np.diff(parallel.equal_bounds(g.m, workers)).astype(np.int64)
    raise ParameterError(f"partitioning must be one of {PARTITIONINGS}")


def imbalance(g, partitioning: str = "equal_vertices", workers: int = 8) -> ImbalanceStats:
    work = partition_work(g, partitioning, workers)
    mean = work.mean()
    if mean == 0:
        return ImbalanceStats(workers, 0.0, 1.0, work)
    return ImbalanceStats(workers, float(work.std() / mean), float(work.max() / mean), work)
