import numpy as np
import pytest
from scipy.sparse import csr_matrix

from gardenia.errors import ParameterError, PreconditionError, UnsupportedInputError
from gardenia.graph import Graph
from gardenia.instrument import IterationTrace
from gardenia.kernels import default_delta, sssp_bellman, sssp_delta_stepping
from gardenia.verify import oracle_dijkstra

from conftest import graph_from, grid_graph, random_sources, rmat_graph, uniform_graph

KERNELS = [sssp_bellman, sssp_delta_stepping]


@pytest.mark.parametrize("kernel", KERNELS)
def test_single_edge(kernel):
    g = graph_from([(0, 1, 2.5)], directed=True)
    assert kernel(g, 0).tolist() == [0.0, 2.5]


@pytest.mark.parametrize("kernel", KERNELS)
def test_triangle_two_paths(kernel):
    g = graph_from([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)])
    assert kernel(g, 0)[2] == 2.0


@pytest.mark.parametrize("kernel", KERNELS)
def test_uniform_500_matches_dijkstra(kernel):
    g = uniform_graph(500, 4000, seed=1, weighted=True)
    for s in random_sources(g, 5):
        assert np.array_equal(kernel(g, s), oracle_dijkstra(g, s))


@pytest.mark.parametrize("factor", [0.5, 1, 2, 4])
@pytest.mark.parametrize("make", [
    lambda: rmat_graph(10, seed=4, weighted=True),
    lambda: grid_graph(30, 30, weighted=True, seed=2),
    lambda: uniform_graph(800, 6000, seed=3, weighted=True),
])
def test_delta_values_match_dijkstra(make, factor):
    g = make()
    delta = factor * default_delta(g)
    for s in random_sources(g, 3, seed=5):
        ref = oracle_dijkstra(g, s)
        assert np.array_equal(sssp_delta_stepping(g, s, delta=delta), ref)
        assert np.array_equal(sssp_bellman(g, s), ref)


def test_large_delta_single_bucket():
    g = uniform_graph(200, 1500, seed=6, weighted=True)
    trace = IterationTrace()
    dist = sssp_delta_stepping(g, 0, delta=1e12, trace=trace)
    assert np.array_equal(dist, oracle_dijkstra(g, 0))
    assert {r.bucket for r in trace.records} == {0}


def test_path_buckets_in_order():
    g = graph_from([(0, 1, 1.0), (1, 2, 1.0)], directed=True)
    trace = IterationTrace()
    assert sssp_delta_stepping(g, 0, delta=1.0, trace=trace).tolist() == [0.0, 1.0, 2.0]
    light = [r.bucket for r in trace.records if r.phase == "light"]
    assert light == [0, 1, 2]


def test_relaxation_fixpoint():
    g = rmat_graph(11, seed=7, directed=True, weighted=True)
    dist = sssp_delta_stepping(g, 0)
    src = g.edge_sources()
    w = g.weights.astype(np.float64)
    reached = np.isfinite(dist[src])
    assert np.all(dist[g.col_indices][reached] <= dist[src][reached] + w[reached])


def test_unreachable_is_inf():
    g = graph_from([(0, 1, 1.0), (2, 3, 1.0)])
    assert sssp_delta_stepping(g, 0).tolist() == [0.0, 1.0, np.inf, np.inf]


@pytest.mark.parametrize("kernel", KERNELS)
def test_negative_weight_rejected(kernel):
    g = Graph.from_scipy(csr_matrix(np.array([[0, -1.0], [0, 0]])), directed=True)
    with pytest.raises(UnsupportedInputError):
        kernel(g, 0)


@pytest.mark.parametrize("kernel", KERNELS)
def test_unweighted_rejected(kernel, triangle):
    with pytest.raises(PreconditionError):
        kernel(triangle, 0)


@pytest.mark.parametrize("delta", [0.0, -1.0])
def test_bad_delta(delta):
    g = graph_from([(0, 1, 1.0)])
    with pytest.raises(ParameterError):
        sssp_delta_stepping(g, 0, delta=delta)


def test_default_delta_is_mean_weight():
    g = graph_from([(0, 1, 1.0), (1, 2, 3.0)])
    assert default_delta(g) == 2.0


@pytest.mark.parametrize("kernel", KERNELS)
def test_workers_agree(kernel, force_chunks):
    g = rmat_graph(9, seed=8, directed=True, weighted=True)
    for s in random_sources(g, 3, seed=1):
        ref = kernel(g, s, workers=1)
        for w in (2, 4, 8):
            assert np.array_equal(kernel(g, s, workers=w), ref)
