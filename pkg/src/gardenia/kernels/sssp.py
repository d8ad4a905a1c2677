"""Single-source shortest paths over non-negative weights.

Both kernels relax edges from a frontier with an atomic minimum on the
distance array (float64 viewed as int64) and admit each improved vertex to
the next frontier once, via a test-and-set bitmap.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .. import parallel
from .._atomics import atomic_add, atomic_min, bits_float, float_bits, test_and_set
from ..errors import ParameterError, PreconditionError, UnsupportedInputError
from ..frontier import bitmap_words
from ._common import check_source

ALL_EDGES, LIGHT_EDGES, HEAVY_EDGES = 0, 1, 2


@njit(nogil=True, cache=True)
def _relax_chunk(offsets, cols, weights, frontier, prefix, dist, dist_bits, queued,
                 next_q, tail, mode, delta, elo, ehi):
    i = np.searchsorted(prefix, elo, side="right") - 1
    e = elo
    while e < ehi:
        u = frontier[i]
        du = dist[u]
        stop = min(prefix[i + 1], ehi)
        start = offsets[u] + (e - prefix[i])
        for k in range(start, start + (stop - e)):
            w = np.float64(weights[k])
            if mode == 1 and w > delta:
                continue
            if mode == 2 and w <= delta:
                continue
            v = cols[k]
            nd = du + w
            if nd < dist[v]:
                old = atomic_min(dist_bits, v, float_bits(nd))
                if nd < bits_float(old) and not test_and_set(queued, v):
                    next_q[atomic_add(tail, 0, 1)] = v
        e = stop
        i += 1
    return ehi - elo


class _Relaxer:
    def __init__(self, g, source: int, workers: int):
        self.g = g
        self.workers = workers
        self.dist = np.full(g.n, np.inf)
        self.dist[source] = 0.0
        self.bits = self.dist.view(np.int64)
        self.queued = np.zeros(bitmap_words(g.n), dtype=np.uint64)
        self.next_q = np.empty(max(g.n, 1), dtype=np.int32)
        self.tail = np.zeros(1, dtype=np.int64)

    def relax(self, frontier: np.ndarray, mode: int = ALL_EDGES,
              delta: float = 0.0) -> tuple[np.ndarray, int]:
        """Relax out-edges of ``frontier``; returns improved vertices and edges scanned."""
        g = self.g
        prefix = parallel.edge_prefix(g.row_offsets, frontier)
        total = int(prefix[-1])
        self.tail[0] = 0
        if total:
            parallel.run_chunks(_relax_chunk, parallel.edge_bounds(total, self.workers),
                                (g.row_offsets, g.col_indices, g.weights, frontier, prefix,
                                 self.dist, self.bits, self.queued, self.next_q, self.tail,
                                 mode, float(delta)), self.workers)
        improved = self.next_q[:self.tail[0]].copy()
        self.queued[improved >> 6] = 0
        return improved, total


def _check_weighted(g):
    if g.weights is None:
        raise PreconditionError("shortest paths need a weighted graph")
    if g.m and (not np.all(np.isfinite(g.weights)) or g.weights.min() < 0):
        raise UnsupportedInputError("edge weights must be finite and non-negative")


def sssp_bellman(g, source: int, workers: int | None = None, trace=None) -> np.ndarray:
    """Frontier-based Bellman-Ford."""
    _check_weighted(g)
    source = check_source(g, source)
    r = _Relaxer(g, source, parallel.resolve_workers(workers))
    frontier = np.array([source], dtype=np.int32)
    while frontier.size:
        nxt, scanned = r.relax(frontier)
        if trace is not None:
            trace.record(frontier.size, scanned)
        frontier = nxt
    return r.dist


def default_delta(g) -> float:
    """Mean edge weight (1.0 for a graph without edges or with all-zero weights)."""
    if g.weights is None or g.m == 0:
        return 1.0
    mean = float(g.weights.astype(np.float64).mean())
    return mean if mean > 0 else 1.0


def sssp_delta_stepping(g, source: int, delta: float | None = None,
                        workers: int | None = None, trace=None) -> np.ndarray:
    """Delta-stepping: tentative distances are binned into width-``delta`` buckets.

    Buckets are settled in ascending order. Within a bucket, light edges
    (``w <= delta``) are relaxed repeatedly until the bucket stays empty; the
    heavy edges of every vertex settled there are then relaxed once.
    """
    _check_weighted(g)
    source = check_source(g, source)
    if delta is None:
        delta = default_delta(g)
    if not delta > 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    r = _Relaxer(g, source, parallel.resolve_workers(workers))
    dist = r.dist
    buckets: dict[int, list[np.ndarray]] = {0: [np.array([source], dtype=np.int32)]}

    def file_into_buckets(vertices: np.ndarray):
        if not vertices.size:
            return
        idx = np.floor(dist[vertices] / delta).astype(np.int64)
        order = np.argsort(idx, kind="stable")
        idx, vertices = idx[order], vertices[order]
        keys, starts = np.unique(idx, return_index=True)
        for key, part in zip(keys.tolist(), np.split(vertices, starts[1:])):
            buckets.setdefault(key, []).append(part)

    while buckets:
        current = min(buckets)
        settled = []
        while current in buckets:
            members = np.unique(np.concatenate(buckets.pop(current)))
            # drop stale entries that have since moved to a lower bucket
            members = members[np.floor(dist[members] / delta) == current]
            if not members.size:
                continue
            settled.append(members)
            improved, scanned = r.relax(members, LIGHT_EDGES, delta)
            if trace is not None:
                trace.record(members.size, scanned, phase="light", bucket=current)
            file_into_buckets(improved)
        if settled:
            members = np.unique(np.concatenate(settled))
            improved, scanned = r.relax(members, HEAVY_EDGES, delta)
            if trace is not None:
                trace.record(members.size, scanned, phase="heavy", bucket=current)
            file_into_buckets(improved)
    return dist
