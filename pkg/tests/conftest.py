import numpy as np
import pytest

from gardenia import parallel
from gardenia.generators import RmatParams, gen_grid2d, gen_rmat, gen_uniform, with_random_weights
from gardenia.graph import EdgeList, build_graph


def graph_from(pairs, n=None, directed=False, weighted=None):
    g = build_graph(EdgeList.from_pairs(pairs, n, weighted), directed=directed)
    return g.with_inverse()


@pytest.fixture
def triangle():
    return graph_from([(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3():
    return graph_from([(0, 1), (1, 2)])


@pytest.fixture
def star4():
    """Center 0 with leaves 1..3."""
    return graph_from([(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def k4():
    return graph_from([(u, v) for u in range(4) for v in range(u + 1, 4)])


@pytest.fixture
def force_chunks(monkeypatch):
    """Make every parallel step split into several chunks even on tiny inputs."""
    monkeypatch.setattr(parallel, "MIN_CHUNK_WORK", 8)


def rmat_graph(scale, seed=0, directed=False, weighted=False, edge_factor=8):
    edges = gen_rmat(RmatParams(scale, edge_factor, seed=seed))
    if weighted:
        edges = with_random_weights(edges, seed)
    return build_graph(edges, directed=directed).with_inverse()


def grid_graph(rows, cols, weighted=False, seed=0):
    edges = gen_grid2d(rows, cols)
    if weighted:
        edges = with_random_weights(edges, seed)
    return build_graph(edges)


def uniform_graph(n, m, seed=0, directed=True, weighted=False):
    edges = gen_uniform(n, m, seed)
    if weighted:
        edges = with_random_weights(edges, seed)
    return build_graph(edges, directed=directed).with_inverse()


def random_sources(g, count, seed=0):
    rng = np.random.default_rng(seed)
    return rng.choice(g.n, size=min(count, g.n), replace=False).tolist()


class FakeClock:
    """Deterministic clock: reading it never advances time; ``advance`` does."""

    def __init__(self):
        self.now = 0.0

    def __call__(self):
        return self.now

    def advance(self, seconds):
        self.now += seconds


def instrument_bench(monkeypatch, clock, kernel, load_cost=1000.0, verify_cost=500.0,
                     run_cost=1.0):
    """Make loading, verification and kernel calls advance ``clock`` by fixed amounts.

    If loading or verification leaked into a timed trial, that trial would
    read far more than ``run_cost``.
    """
    import dataclasses

    from gardenia import bench

    real_load = bench.load_input

    def slow_load(*args, **kwargs):
        clock.advance(load_cost)
        return real_load(*args, **kwargs)

    spec = bench.KERNELS[kernel]

    def run(p, w):
        out = spec.run(p, w)
        clock.advance(run_cost)
        return out

    def check(p, out, ref):
        clock.advance(verify_cost)
        return spec.check(p, out, ref)

    monkeypatch.setattr(bench, "load_input", slow_load)
    monkeypatch.setitem(bench.KERNELS, kernel, dataclasses.replace(spec, run=run, check=check))
