import numpy as np
import pytest

from gardenia.errors import ParameterError
from gardenia.generators import (RmatParams, from_recipe, gen_grid2d, gen_ratings, gen_rmat,
                                 gen_uniform, parse_recipe, with_random_weights)
from gardenia.graph import build_graph, degree_stats
from gardenia.verify import oracle_bfs


def test_rmat_count_contract():
    # edge_factor * 2**scale edges over 2**scale vertices
    e = gen_rmat(RmatParams(scale=1, edge_factor=1, seed=7))
    assert len(e) == 2 and e.n == 2
    e = gen_rmat(RmatParams(scale=5, edge_factor=3, seed=7))
    assert len(e) == 96 and e.n == 32


def test_rmat_skew_at_scale_10():
    g = build_graph(gen_rmat(RmatParams(scale=10, edge_factor=16)))
    s = degree_stats(g)
    assert s.max_deg > 8 * s.avg_deg


def test_rmat_skew_grows_with_scale():
    ratios = []
    for scale in (8, 11, 14):
        s = degree_stats(build_graph(gen_rmat(RmatParams(scale, 16, seed=1))))
        ratios.append(s.max_deg / s.avg_deg)
    assert ratios[0] < ratios[1] < ratios[2]


def test_rmat_deterministic():
    a = gen_rmat(RmatParams(8, seed=5))
    b = gen_rmat(RmatParams(8, seed=5))
    c = gen_rmat(RmatParams(8, seed=6))
    assert np.array_equal(a.src, b.src) and np.array_equal(a.dst, b.dst)
    assert not np.array_equal(a.src, c.src)


@pytest.mark.parametrize("kwargs", [dict(scale=0), dict(scale=4, edge_factor=0),
                                    dict(scale=4, a=0.5, b=0.5, c=0.5, d=0.5)])
def test_rmat_param_validation(kwargs):
    with pytest.raises(ParameterError):
        RmatParams(**kwargs)


def test_grid_counts():
    e = gen_grid2d(2, 3)
    assert e.n == 6 and len(e) == 7
    e = gen_grid2d(1, 1)
    assert e.n == 1 and len(e) == 0


def test_grid_corner_eccentricity():
    g = build_graph(gen_grid2d(100, 100))
    assert oracle_bfs(g, 0).max() == 198


@pytest.mark.parametrize("rows,cols", [(3, 3), (10, 7), (50, 50)])
def test_grid_low_degree_cv(rows, cols):
    assert degree_stats(build_graph(gen_grid2d(rows, cols))).degree_cv <= 0.35


def test_uniform_saturation():
    e = gen_uniform(2, 2, seed=0)
    assert e.as_set() == {(0, 1), (1, 0)}


def test_uniform_density_and_concentration():
    e = gen_uniform(1000, 10000, seed=1)
    assert len(e.as_set()) == 10000
    assert not np.any(e.src == e.dst)
    s = degree_stats(build_graph(e, directed=True))
    assert s.avg_deg == 10.0
    assert s.degree_cv < 0.5


def test_uniform_too_many_edges():
    with pytest.raises(ParameterError):
        gen_uniform(3, 7)


def test_uniform_deterministic():
    assert gen_uniform(100, 500, 4).as_set() == gen_uniform(100, 500, 4).as_set()


def test_ratings_single():
    e = gen_ratings(1, 1, 1, (1, 5), seed=0)
    assert len(e) == 1 and 1 <= e.weights[0] <= 5


def test_ratings_mean_and_distinct():
    e = gen_ratings(100, 100, 2000, (1, 5), seed=0)
    assert abs(e.weights.mean() - 3.0) <= 0.2
    assert len(set(zip(e.src.tolist(), e.dst.tolist()))) == 2000
    assert set(np.unique(e.weights).tolist()) <= {1.0, 2.0, 3.0, 4.0, 5.0}


def test_ratings_too_many():
    with pytest.raises(ParameterError):
        gen_ratings(2, 2, 5)


def test_random_weights_are_float32_exact():
    e = with_random_weights(gen_grid2d(4, 4), seed=3)
    assert np.array_equal(e.weights, e.weights.astype(np.float32).astype(np.float64))
    assert e.weights.min() >= 1.0


def test_recipes():
    assert parse_recipe("gen:rmat:scale=10,ef=4") == ("rmat", {"scale": 10, "ef": 4})
    assert len(from_recipe("gen:rmat:scale=6,ef=4")) == 256
    assert from_recipe("grid:rows=3,cols=4").symmetric
    assert from_recipe("gen:uniform:n=50,m=100,seed=2,weighted=1").weighted
    with pytest.raises(ParameterError):
        parse_recipe("gen:rmat:bogus=1")
    with pytest.raises(ParameterError):
        parse_recipe("gen:tree:n=3")
