"""Breadth-first search: push, pull, direction-optimizing and quadratic variants.

All variants are level-synchronous and return float64 hop distances with
``inf`` for unreached vertices. Push steps walk a frontier queue and split
its concatenated neighbor lists into equal-edge chunks; pull steps have every
unvisited vertex look for a parent in a bitmap of the current frontier.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .. import parallel
from .._atomics import atomic_add, atomic_or, bit_is_set, test_and_set
from ..frontier import Frontier, bitmap_words
from ._common import HOP_INF, check_source, hops_to_dist

DEFAULT_ALPHA = 15.0
DEFAULT_BETA = 18.0


@njit(nogil=True, cache=True)
def _push_chunk(offsets, cols, frontier, prefix, hops, visited, next_q, tail, level, elo, ehi):
    i = np.searchsorted(prefix, elo, side="right") - 1
    e = elo
    while e < ehi:
        u = frontier[i]
        stop = min(prefix[i + 1], ehi)
        start = offsets[u] + (e - prefix[i])
        for k in range(start, start + (stop - e)):
            v = cols[k]
            if not test_and_set(visited, v):
                hops[v] = level + 1
                next_q[atomic_add(tail, 0, 1)] = v
        e = stop
        i += 1
    return ehi - elo


@njit(nogil=True, cache=True)
def _pull_chunk(in_offsets, in_cols, front, visited, next_bits, hops, level, lo, hi):
    awake = 0
    scanned = 0
    for v in range(lo, hi):
        if bit_is_set(visited, v):
            continue
        for k in range(in_offsets[v], in_offsets[v + 1]):
            scanned += 1
            if bit_is_set(front, in_cols[k]):
                hops[v] = level + 1
                bit = np.uint64(1) << np.uint64(v & 63)
                atomic_or(visited, v >> 6, bit)
                atomic_or(next_bits, v >> 6, bit)
                awake += 1
                break
    return awake, scanned


@njit(nogil=True, cache=True)
def _quadratic_chunk(offsets, cols, hops, level, lo, hi):
    active = 0
    scanned = 0
    found = 0
    for v in range(lo, hi):
        if hops[v] != level:
            continue
        active += 1
        for k in range(offsets[v], offsets[v + 1]):
            scanned += 1
            w = cols[k]
            if hops[w] == HOP_INF:
                # racing writers all store the same value
                hops[w] = level + 1
                found += 1
    return active, scanned, found


class _State:
    """Per-search shared arrays."""

    def __init__(self, n: int, source: int):
        self.hops = np.full(n, HOP_INF, dtype=np.int32)
        self.visited = np.zeros(bitmap_words(n), dtype=np.uint64)
        self.next_q = np.empty(max(n, 1), dtype=np.int32)
        self.tail = np.zeros(1, dtype=np.int64)
        self.hops[source] = 0
        self.visited[source >> 6] |= np.uint64(1) << np.uint64(source & 63)


def push_step(g, frontier: np.ndarray, state: _State, level: int, workers: int,
              prefix: np.ndarray | None = None) -> tuple[np.ndarray, int]:
    """Expand one frontier queue; returns the next queue and edges scanned."""
    if prefix is None:
        prefix = parallel.edge_prefix(g.row_offsets, frontier)
    total = int(prefix[-1])
    state.tail[0] = 0
    if total:
        bounds = parallel.edge_bounds(total, workers)
        parallel.run_chunks(_push_chunk, bounds,
                            (g.row_offsets, g.col_indices, frontier, prefix, state.hops,
                             state.visited, state.next_q, state.tail, level), workers)
    return state.next_q[:state.tail[0]].copy(), total


def pull_step(incoming, front_bits: np.ndarray, state: _State, level: int,
              workers: int) -> tuple[np.ndarray, int, int]:
    """One bottom-up step; returns (next bitmap, vertices woken, edges scanned)."""
    n = incoming.n
    next_bits = np.zeros_like(front_bits)
    bounds = parallel.row_bounds_by_work(incoming.row_offsets, workers)
    # keep chunk edges on word boundaries
    bounds[1:-1] = np.minimum((bounds[1:-1] + 63) // 64 * 64, n)
    parts = parallel.run_chunks(_pull_chunk, bounds,
                                (incoming.row_offsets, incoming.col_indices, front_bits,
                                 state.visited, next_bits, state.hops, level), workers)
    awake = sum(p[0] for p in parts)
    scanned = sum(p[1] for p in parts)
    return next_bits, awake, scanned


def bfs_push(g, source: int, workers: int | None = None, trace=None) -> np.ndarray:
    """Top-down BFS driven by a frontier queue."""
    source = check_source(g, source)
    workers = parallel.resolve_workers(workers)
    state = _State(g.n, source)
    frontier = np.array([source], dtype=np.int32)
    level = 0
    while frontier.size:
        nxt, scanned = push_step(g, frontier, state, level, workers)
        if trace is not None:
            trace.record(frontier.size, scanned)
        frontier = nxt
        level += 1
    return hops_to_dist(state.hops)


def bfs_pull(g, source: int, workers: int | None = None, trace=None) -> np.ndarray:
    """Bottom-up BFS; needs in-edges (undirected graph or one with an inverse)."""
    source = check_source(g, source)
    incoming = g.incoming()
    workers = parallel.resolve_workers(workers)
    state = _State(g.n, source)
    front = state.visited.copy()
    size = 1
    level = 0
    while size:
        front, awake, scanned = pull_step(incoming, front, state, level, workers)
        if trace is not None:
            trace.record(size, scanned)
        size = awake
        level += 1
    return hops_to_dist(state.hops)


def bfs_direction_optimizing(g, source: int, alpha: float = DEFAULT_ALPHA,
                             beta: float = DEFAULT_BETA, workers: int | None = None,
                             trace=None) -> np.ndarray:
    """Hybrid BFS switching between push and pull steps.

    Goes bottom-up once the frontier's out-edge count exceeds the unexplored
    edge count divided by ``alpha``; returns to top-down once the frontier is
    shrinking and smaller than ``n / beta``. At least one push step follows
    every pull phase.
    """
    source = check_source(g, source)
    incoming = g.incoming()
    workers = parallel.resolve_workers(workers)
    offsets = g.row_offsets
    n = g.n
    state = _State(n, source)
    queue = np.array([source], dtype=np.int32)
    edges_to_check = g.m
    level = 0
    force_push = False
    while queue.size:
        prefix = parallel.edge_prefix(offsets, queue)
        scout = int(prefix[-1])
        if not force_push and scout > edges_to_check / alpha:
            front = Frontier(n, ids=queue).to_dense().bits
            awake = queue.size
            while True:
                old_awake = awake
                front, awake, scanned = pull_step(incoming, front, state, level, workers)
                if trace is not None:
                    trace.record(old_awake, scanned, direction="pull")
                level += 1
                if awake == 0:
                    break
                edges_to_check -= _bitmap_degree_sum(offsets, front, n)
                if awake < old_awake and awake <= n / beta:
                    break
            queue = Frontier(n, bits=front).to_sparse().ids if awake else queue[:0]
            force_push = True
        else:
            edges_to_check -= scout
            nxt, scanned = push_step(g, queue, state, level, workers, prefix)
            if trace is not None:
                trace.record(queue.size, scanned, direction="push")
            queue = nxt
            level += 1
            force_push = False
    return hops_to_dist(state.hops)


def _bitmap_degree_sum(offsets, bits, n) -> int:
    ids = Frontier(n, bits=bits).to_sparse().ids
    return int((offsets[ids + 1] - offsets[ids]).sum())


def bfs_quadratic(g, source: int, workers: int | None = None, trace=None) -> np.ndarray:
    """Straightforward BFS: every level scans all vertices for active ones.

    Vertices are split into equal-count static chunks, with no frontier queue
    and no degree awareness.
    """
    source = check_source(g, source)
    workers = parallel.resolve_workers(workers)
    hops = np.full(g.n, HOP_INF, dtype=np.int32)
    hops[source] = 0
    bounds = parallel.vertex_bounds(g.n, workers)
    level = 0
    while True:
        parts = parallel.run_chunks(_quadratic_chunk, bounds,
                                    (g.row_offsets, g.col_indices, hops, level), workers)
        active = sum(p[0] for p in parts)
        if trace is not None:
            trace.record(active, sum(p[1] for p in parts))
        level += 1
        if not sum(p[2] for p in parts):
            break
    return hops_to_dist(hops)
