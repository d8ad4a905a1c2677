"""Triangle counting by sorted neighbor-list intersection."""

from __future__ import annotations

import numpy as np
from numba import njit

from .. import parallel
from ..errors import PreconditionError


@njit(nogil=True, cache=True)
def _count(offsets, cols, lo, hi):
    total = 0
    for u in range(lo, hi):
        for k in range(offsets[u], offsets[u + 1]):
            v = cols[k]
            if v >= u:
                break
            # triangles w < v < u: intersect N(u) below position k with N(v) below v
            i = offsets[u]
            j = offsets[v]
            jend = offsets[v + 1]
            while i < k and j < jend:
                a = cols[i]
                b = cols[j]
                if b >= v:
                    break
                if a == b:
                    total += 1
                    i += 1
                    j += 1
                elif a < b:
                    i += 1
                else:
                    j += 1
    return total


def check_sorted_simple(g) -> None:
    """Raise unless every neighbor slice is strictly ascending and loop-free."""
    cols = g.col_indices
    if cols.size < 1:
        return
    row_start = np.zeros(cols.size, dtype=bool)
    starts = g.row_offsets[:-1][g.out_degrees() > 0]
    row_start[starts] = True
    if np.any((cols[1:] <= cols[:-1]) & ~row_start[1:]):
        raise PreconditionError("adjacency must be sorted ascending without duplicates")
    if np.any(g.edge_sources() == cols):
        raise PreconditionError("adjacency must not contain self-loops")


def triangle_count(g, workers: int | None = None) -> int:
    """Exact number of triangles; each is counted once at its largest vertex."""
    if g.directed:
        raise PreconditionError("triangle counting needs an undirected graph")
    check_sorted_simple(g)
    workers = parallel.resolve_workers(workers)
    bounds = parallel.row_bounds_by_work(g.row_offsets, workers)
    return int(sum(parallel.run_chunks(_count, bounds, (g.row_offsets, g.col_indices), workers)))
