"""Worker pool and work partitioning for the parallel kernels.

A kernel step is a numba ``nogil`` function over a half-open work range.
:func:`run_chunks` fans those ranges out over a shared thread pool; with one
worker (or a single range) the function is called inline.
"""

from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import ParameterError

# below this much work per chunk, splitting costs more than it saves
MIN_CHUNK_WORK = 2048

_pools: dict[int, ThreadPoolExecutor] = {}
_lock = threading.Lock()


def default_workers() -> int:
    env = os.environ.get("GARDENIA_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ParameterError(f"GARDENIA_THREADS must be an integer, got {env!r}") from None
        if value < 1:
            raise ParameterError("GARDENIA_THREADS must be >= 1")
        return value
    return os.cpu_count() or 1


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        return default_workers()
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    return int(workers)


def _pool(workers: int) -> ThreadPoolExecutor:
    with _lock:
        pool = _pools.get(workers)
        if pool is None:
            pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="gardenia")
            _pools[workers] = pool
        return pool


def run_chunks(fn, bounds, args, workers: int) -> list:
    """Call ``fn(*args, lo, hi)`` for each consecutive pair in ``bounds``.

    Returns the per-chunk results in chunk order, so reductions over them are
    deterministic for a fixed partition.
    """
    ranges = [(int(bounds[i]), int(bounds[i + 1])) for i in range(len(bounds) - 1)]
    if workers == 1 or len(ranges) <= 1:
        return [fn(*args, lo, hi) for lo, hi in ranges]
    futures = [_pool(workers).submit(fn, *args, lo, hi) for lo, hi in ranges]
    return [f.result() for f in futures]


def split_count(total: int, workers: int) -> int:
    """How many chunks to cut ``total`` units of work into."""
    if workers <= 1 or total <= MIN_CHUNK_WORK:
        return 1
    return int(min(workers, max(1, total // MIN_CHUNK_WORK)))


def equal_bounds(total: int, parts: int) -> np.ndarray:
    """Boundaries splitting ``range(total)`` into ``parts`` near-equal pieces."""
    parts = max(1, parts)
    return (np.arange(parts + 1, dtype=np.int64) * total) // parts


def vertex_bounds(n: int, workers: int) -> np.ndarray:
    """Equal-vertex partition, the straightforward static schedule."""
    return equal_bounds(n, split_count(n, workers))


def edge_prefix(row_offsets: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Exclusive prefix sum of the degrees of ``vertices`` (length ``len+1``)."""
    deg = row_offsets[vertices + 1] - row_offsets[vertices]
    out = np.zeros(vertices.size + 1, dtype=np.int64)
    np.cumsum(deg, out=out[1:])
    return out


def edge_bounds(total_edges: int, workers: int) -> np.ndarray:
    """Equal-edge partition over the concatenated neighbor lists of a frontier.

    Chunk boundaries are edge positions, so a single hub's neighbor list can
    be shared between workers.
    """
    return equal_bounds(total_edges, split_count(total_edges, workers))


def row_bounds_by_work(row_offsets: np.ndarray, workers: int) -> np.ndarray:
    """Contiguous row ranges holding near-equal numbers of nonzeros."""
    n = row_offsets.size - 1
    m = int(row_offsets[-1])
    parts = split_count(m + n, workers)
    if parts == 1:
        return np.array([0, n], dtype=np.int64)
    targets = equal_bounds(m, parts)
    bounds = np.searchsorted(row_offsets, targets, side="left").astype(np.int64)
    bounds[0], bounds[-1] = 0, n
    return np.maximum.accumulate(np.minimum(bounds, n))
