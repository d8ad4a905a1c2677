import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gardenia.errors import ParameterError, PreconditionError
from gardenia.generators import gen_grid2d
from gardenia.graph import EdgeList, build_graph
from gardenia.instrument import IterationTrace
from gardenia.kernels import bfs_direction_optimizing, bfs_pull, bfs_push, bfs_quadratic
from gardenia.verify import oracle_bfs

from conftest import graph_from, random_sources, rmat_graph

VARIANTS = [bfs_push, bfs_pull, bfs_direction_optimizing, bfs_quadratic]


@pytest.mark.parametrize("kernel", VARIANTS)
def test_triangle(kernel, triangle):
    assert kernel(triangle, 0).tolist() == [0, 1, 1]


@pytest.mark.parametrize("kernel", VARIANTS)
def test_isolated_pair(kernel):
    g = build_graph(EdgeList.from_pairs([], 2))
    assert kernel(g, 0).tolist() == [0, np.inf]


@pytest.mark.parametrize("kernel", VARIANTS)
def test_rmat10_matches_oracle(kernel):
    g = rmat_graph(10, seed=1)
    for s in random_sources(g, 5):
        assert np.array_equal(kernel(g, s), oracle_bfs(g, s))


@pytest.mark.parametrize("kernel", VARIANTS)
def test_source_out_of_range(kernel, triangle):
    with pytest.raises(ParameterError):
        kernel(triangle, 3)


@pytest.mark.parametrize("kernel", [bfs_pull, bfs_direction_optimizing])
def test_pull_needs_inverse(kernel):
    g = build_graph(EdgeList.from_pairs([(0, 1)]), directed=True)
    with pytest.raises(PreconditionError):
        kernel(g, 0)


def test_directed_reachability():
    g = graph_from([(0, 1), (1, 2), (3, 0)], directed=True)
    for kernel in VARIANTS:
        assert kernel(g, 0).tolist() == [0, 1, 2, np.inf]


def test_do_grid_2x2():
    g = build_graph(gen_grid2d(2, 2))
    trace = IterationTrace()
    assert bfs_direction_optimizing(g, 0, trace=trace).tolist() == [0, 1, 1, 2]
    # scout 2 > 8/15 already at the corner, so the heuristic pulls from the start
    assert trace.directions[0] == "pull"
    trace = IterationTrace()
    assert bfs_direction_optimizing(g, 0, alpha=0.1, trace=trace).tolist() == [0, 1, 1, 2]
    assert set(trace.directions) == {"push"}


def test_do_star_switch_rule():
    # center 0 with 40 leaves: the first frontier's scout count is 40 out-edges and
    # 80 directed edges are unexplored, so 40 > 80/15 and the first step pulls
    n = 41
    g = graph_from([(0, v) for v in range(1, n)])
    trace = IterationTrace()
    dist = bfs_direction_optimizing(g, 0, alpha=15, beta=18, trace=trace)
    assert dist[0] == 0 and np.all(dist[1:] == 1)
    assert trace.directions[0] == "pull"
    # with alpha below 1 the scout count can never exceed the unexplored edges / alpha
    trace = IterationTrace()
    bfs_direction_optimizing(g, 0, alpha=0.5, beta=18, trace=trace)
    assert set(trace.directions) == {"push"}


def test_do_rmat12_matches_oracle():
    g = rmat_graph(12, seed=2, edge_factor=16)
    for s in random_sources(g, 5, seed=1):
        assert np.array_equal(bfs_direction_optimizing(g, s), oracle_bfs(g, s))


def test_do_switches_on_scale_free_graph():
    g = rmat_graph(12, seed=2, edge_factor=16)
    trace = IterationTrace()
    bfs_direction_optimizing(g, int(np.argmax(g.out_degrees())), trace=trace)
    assert "pull" in trace.directions


@pytest.mark.parametrize("kernel", VARIANTS)
def test_workers_agree(kernel, force_chunks):
    g = rmat_graph(9, seed=3, directed=True)
    for s in random_sources(g, 3, seed=2):
        ref = kernel(g, s, workers=1)
        for w in (2, 3, 8):
            assert np.array_equal(kernel(g, s, workers=w), ref)


graphs = st.integers(2, 40).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=150),
    st.booleans(),
    st.integers(0, n - 1)))


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_variants_identical_property(data):
    n, pairs, directed, source = data
    g = graph_from(pairs, n, directed=directed)
    ref = oracle_bfs(g, source)
    for kernel in VARIANTS:
        assert np.array_equal(kernel(g, source), ref)
