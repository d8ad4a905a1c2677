"""Acceptance criteria 1-11, each printing one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see only these lines,
or as part of the full suite (the lines are printed with capture disabled).
"""

import os
import time
from collections import Counter

import numpy as np
import pytest

from gardenia import io, parallel
from gardenia.bench import BenchConfig, run_benchmark
from gardenia.generators import (RmatParams, gen_grid2d, gen_ratings, gen_rmat, gen_uniform,
                                 with_random_weights)
from gardenia.graph import EdgeList, build_graph
from gardenia.instrument import trace_traversal
from gardenia.kernels import (bc, bfs_direction_optimizing, bfs_pull, bfs_push, bfs_quadratic,
                              cc_label_propagation, default_delta, diagonally_dominant_system,
                              greedy_coloring, pagerank, residual_norm, select_sources, sgd_mf,
                              spmv, sssp_bellman, sssp_delta_stepping, symgs, triangle_count)
from gardenia.verify import (BC_ALLPAIRS_LIMIT, compare, oracle_bc_allpairs, oracle_bfs,
                             oracle_cc_unionfind, oracle_coloring_firstfit, oracle_dijkstra,
                             oracle_gs_serial, oracle_pagerank, oracle_sgd_serial, oracle_spmv,
                             oracle_tc)

from conftest import FakeClock, instrument_bench

GRAPHS_PER_CLASS = 20
CLASS_IDS = {"rmat": 0, "grid": 1, "uniform": 2}
WORKERS = 4


def report(capsys, number, passed, detail):
    with capsys.disabled():
        print(f"\nCRITERION {number}: {'PASS' if passed else 'FAIL'} - {detail}")
    assert passed, detail


def _class_edges(cls, i):
    rng = np.random.default_rng([i, CLASS_IDS[cls]])
    if cls == "rmat":
        return gen_rmat(RmatParams(8 + i % 5, 16, seed=i))
    if cls == "grid":
        rows, cols = rng.integers(2, 65, size=2)
        return gen_grid2d(int(rows), int(cols))
    n = int(rng.integers(50, 2001))
    return gen_uniform(n, int(rng.integers(n, 8 * n)), seed=i)


@pytest.fixture(scope="module")
def corpus():
    """(name, undirected weighted graph, directed weighted graph) for every class and seed."""
    out = []
    for cls in CLASS_IDS:
        for i in range(GRAPHS_PER_CLASS):
            edges = with_random_weights(_class_edges(cls, i), seed=i)
            und = build_graph(edges, directed=False)
            dire = build_graph(edges, directed=True).with_inverse()
            out.append((f"{cls}-{i}", und, dire))
    return out


def _sources(g, count, seed):
    return np.random.default_rng(seed).choice(g.n, size=min(count, g.n), replace=False).tolist()


# --- 1 ---

def _check_graph(name, und, dire, failures):
    def check(kernel, report_):
        if not report_.passed:
            failures.append(f"{name}/{kernel}: {report_.summary()}")

    for label, g in (("und", und), ("dir", dire)):
        for s in _sources(g, 2, 1):
            check(f"bfs-{label}", compare(bfs_direction_optimizing(g, s, workers=WORKERS),
                                          oracle_bfs(g, s), "exact"))
            ref = oracle_dijkstra(g, s)
            check(f"sssp-{label}", compare(sssp_delta_stepping(g, s, workers=WORKERS), ref, "exact"))
            check(f"bellman-{label}", compare(sssp_bellman(g, s, workers=WORKERS), ref, "exact"))
        check(f"spmv-{label}", compare(spmv(g, np.linspace(-1, 1, g.n), workers=WORKERS),
                                       oracle_spmv(g, np.linspace(-1, 1, g.n)), "relative"))
        pr = pagerank(g, tolerance=1e-13, max_iters=2000, workers=WORKERS)
        check(f"pr-{label}", compare(pr.scores, oracle_pagerank(g), "relative"))
        sources = select_sources(g.n, None if g.n <= BC_ALLPAIRS_LIMIT else 32, seed=1)
        check(f"bc-{label}", compare(bc(g, sources=sources, workers=WORKERS),
                                     oracle_bc_allpairs(g, sources), "relative"))
    labels = cc_label_propagation(und, workers=WORKERS)
    check("cc", compare(labels, oracle_cc_unionfind(und), "partition"))
    check("cc-exact", compare(labels, oracle_cc_unionfind(und), "exact"))
    check("tc", compare(np.array([triangle_count(und, workers=WORKERS)]),
                        np.array([oracle_tc(und)]), "exact"))
    check("coloring", compare(greedy_coloring(und).color, oracle_coloring_firstfit(und), "exact"))
    A, b = diagonally_dominant_system(und)
    coloring = greedy_coloring(A)
    order = np.concatenate(coloring.classes())
    check("symgs", compare(symgs(A, np.zeros(A.n), b, coloring, 2, workers=WORKERS),
                           oracle_gs_serial(A, np.zeros(A.n), b, 2, order), "relative"))


def test_criterion_01_oracle_equivalence(corpus, monkeypatch, capsys):
    # small chunks so every kernel actually splits its work across threads
    monkeypatch.setattr(parallel, "MIN_CHUNK_WORK", 64)
    t0 = time.perf_counter()
    failures = []
    for name, und, dire in corpus:
        _check_graph(name, und, dire, failures)
    for i in range(GRAPHS_PER_CLASS):
        r = gen_ratings(60, 60, 600, seed=i)
        model = sgd_mf(r, k=8, epochs=4, seed=i, workers=1, num_users=60, num_items=60)
        ref = oracle_sgd_serial(r, 8, 0.05, 0.01, 4, i, 60, 60)[2]
        rep = compare(np.array([model.rmse_trace[-1]]), np.array([ref]), "relative", rtol=1e-4)
        if not rep.passed:
            failures.append(f"ratings-{i}/sgd: {rep.summary()}")
    elapsed = time.perf_counter() - t0
    passed = not failures and elapsed < 300
    report(capsys, 1, passed,
           f"{len(corpus)} graphs x 13 kernel checks + {GRAPHS_PER_CLASS} SGD runs, "
           f"{len(failures)} mismatches, {elapsed:.1f}s (budget 300s)"
           + (f"; first: {failures[0]}" if failures else ""))


# --- 2 ---

def test_criterion_02_bfs_variants(corpus, capsys):
    variants = (bfs_push, bfs_pull, bfs_direction_optimizing, bfs_quadratic)
    bad, runs = [], 0
    for name, und, dire in corpus:
        for label, g in (("und", und), ("dir", dire)):
            for s in _sources(g, 5, 2):
                outs = [fn(g, s, workers=WORKERS) for fn in variants]
                runs += 1
                if not all(np.array_equal(outs[0], o) for o in outs[1:]):
                    bad.append(f"{name}-{label} from {s}")
    report(capsys, 2, not bad, f"{runs} (graph, source) pairs, 4 variants each, "
           f"{len(bad)} disagreements" + (f"; first: {bad[0]}" if bad else ""))


# --- 3 ---

def test_criterion_03_delta_stepping(corpus, capsys):
    bad, runs = [], 0
    for name, und, dire in corpus:
        for label, g in (("und", und), ("dir", dire)):
            avg = default_delta(g)
            for s in _sources(g, 2, 3):
                ref = oracle_dijkstra(g, s)
                for factor in (0.5, 1, 2, 4):
                    runs += 1
                    if not np.array_equal(sssp_delta_stepping(g, s, factor * avg, WORKERS), ref):
                        bad.append(f"{name}-{label} from {s}, delta={factor}*avg")
    report(capsys, 3, not bad, f"{runs} runs over delta in {{0.5,1,2,4}}*avg weight, "
           f"{len(bad)} mismatches vs Dijkstra" + (f"; first: {bad[0]}" if bad else ""))


# --- 4 ---

def test_criterion_04_pagerank_invariants(corpus, capsys):
    tol = 1e-4
    worst_sum = 0.0
    for _, und, dire in corpus:
        for g in (und, dire):
            worst_sum = max(worst_sum, abs(pagerank(g, tolerance=tol).scores.sum() - 1))
    cycle = build_graph(EdgeList.from_pairs([(0, 1), (1, 0)]), directed=True).with_inverse()
    cycle_err = float(np.max(np.abs(pagerank(cycle).scores - 0.5)))
    worst_relabel = 0.0
    for k, (_, _, g) in enumerate(corpus[::6]):
        perm = np.random.default_rng(k).permutation(g.n)
        e = g.edges()
        h = build_graph(EdgeList(perm[e.src], perm[e.dst], e.weights, g.n),
                        directed=True).with_inverse()
        diff = pagerank(h, tolerance=tol).scores[perm] - pagerank(g, tolerance=tol).scores
        worst_relabel = max(worst_relabel, float(np.max(np.abs(diff))))
    passed = worst_sum <= 1e-6 and cycle_err <= 1e-6 and worst_relabel <= 10 * tol
    report(capsys, 4, passed, f"max |sum-1| = {worst_sum:.2e} (<= 1e-6), 2-cycle error "
           f"{cycle_err:.2e} (<= 1e-6), max relabel diff {worst_relabel:.2e} (<= {10 * tol:g})")


# --- 5 ---

def test_criterion_05_symgs_monotone(capsys):
    details, passed = [], True
    for seed in range(10):
        n = int(np.random.default_rng(seed).integers(100, 501))
        g = build_graph(with_random_weights(gen_uniform(n, 4 * n, seed), seed), directed=False)
        A, _ = diagonally_dominant_system(g)
        b = np.random.default_rng(seed).standard_normal(A.n)
        coloring = greedy_coloring(A)
        x = np.zeros(A.n)
        res = [residual_norm(A, x, b)]
        for _ in range(5):
            x = symgs(A, x, b, coloring, sweeps=1, workers=WORKERS)
            res.append(residual_norm(A, x, b))
        monotone = all(b_ <= a_ for a_, b_ in zip(res, res[1:]))
        drop = 1 - res[-1] / res[0]
        passed &= monotone and drop >= 0.10
        details.append(f"{drop:.0%}")
    report(capsys, 5, passed, f"10 SPD systems (n <= 500), residual non-increasing over 5 sweeps; "
           f"cumulative drops {', '.join(details)} (need >= 10%)")


# --- 6 ---

def test_criterion_06_sgd_descent(capsys):
    r = gen_ratings(100, 100, 2000, seed=0)
    a = sgd_mf(r, seed=0, workers=1)
    b = sgd_mf(r, seed=0, workers=1)
    first, last = a.rmse_trace[0], a.rmse_trace[9]
    reproducible = (np.array_equal(a.user_factors, b.user_factors)
                    and np.array_equal(a.item_factors, b.item_factors)
                    and a.rmse_trace == b.rmse_trace)
    passed = last < 0.8 * first and reproducible
    report(capsys, 6, passed, f"epoch-10 RMSE {last:.4f} vs 0.8 x epoch-1 {0.8 * first:.4f}; "
           f"single-worker bit-reproducible: {reproducible}")


# --- 7 ---

def test_criterion_07_optimization_effect(capsys):
    workers = max(8, os.cpu_count() or 1)
    lines, edge_ok, time_ok = [], True, True
    for seed in range(3):
        g = build_graph(gen_rmat(RmatParams(16, 16, seed=seed))).with_inverse()
        src = int(np.random.default_rng(seed).choice(np.flatnonzero(g.out_degrees() > 0)))
        push_edges = trace_traversal("bfs_push", g, src, workers=workers).edges_scanned
        do_edges = trace_traversal("bfs_do", g, src, workers=workers).edges_scanned
        recs = {k: run_benchmark(BenchConfig(k, f"gen:rmat:scale=16,ef=16,seed={seed}", source=src,
                                             trials=5, workers=workers), loaded=g)
                for k in ("bfs_push", "bfs_quadratic")}
        edge_ratio = do_edges / push_edges
        speedup = recs["bfs_quadratic"].time_avg_s / recs["bfs_push"].time_avg_s
        edge_ok &= edge_ratio <= 0.5
        time_ok &= speedup >= 2.0
        lines.append(f"seed {seed}: DO/push edges {edge_ratio:.3f}, "
                     f"quadratic/push time {speedup:.2f}x")
    report(capsys, "7a", edge_ok, "direction-optimizing scans <= 0.5x push edges; "
           + "; ".join(lines))
    report(capsys, "7b", time_ok, f"frontier-queue BFS >= 2x faster than quadratic with "
           f"{workers} workers on {os.cpu_count()} cores; " + "; ".join(lines))


# --- 8 ---

def test_criterion_08_dataset_sensitivity(capsys):
    lines, passed = [], True
    for seed in range(3):
        rmat = build_graph(gen_rmat(RmatParams(14, 16, seed=seed))).with_inverse()
        side = int(round(np.sqrt(rmat.m_undirected / 2)))
        grid = build_graph(gen_grid2d(side, side))
        recs = {(k, name): run_benchmark(BenchConfig(k, name, trials=5, seed=seed), loaded=g)
                for k in ("bfs", "bfs_push") for name, g in (("rmat", rmat), ("grid", grid))}
        spread = lambda a, b: max(a, b) / min(a, b)
        ratio = spread(recs["bfs", "rmat"].mteps, recs["bfs", "grid"].mteps)
        passed &= ratio >= 2.0
        # diagnostics only: push-only MTEPS and raw wall time for the same pair
        push_ratio = spread(recs["bfs_push", "rmat"].mteps, recs["bfs_push", "grid"].mteps)
        time_ratio = spread(recs["bfs", "rmat"].time_avg_s, recs["bfs", "grid"].time_avg_s)
        lines.append(f"seed {seed}: R-MAT-14 m={rmat.m_undirected} "
                     f"{recs['bfs', 'rmat'].mteps:.1f} MTEPS, grid {side}x{side} "
                     f"m={grid.m_undirected} {recs['bfs', 'grid'].mteps:.1f} MTEPS, ratio "
                     f"{ratio:.1f}x (push-only {push_ratio:.1f}x, wall time {time_ratio:.1f}x)")
    report(capsys, 8, passed, "BFS MTEPS (scanned edges) differ by >= 2x; " + "; ".join(lines))


# --- 9 ---

def _multiset(e):
    w = [None] * len(e) if e.weights is None else e.weights.tolist()
    return Counter(zip(e.src.tolist(), e.dst.tolist(), w))


def test_criterion_09_round_trips(tmp_path, capsys):
    bad = []
    for i in range(50):
        rng = np.random.default_rng(i)
        n = int(rng.integers(2, 300))
        edges = gen_uniform(n, int(rng.integers(1, min(n * (n - 1), 6 * n) + 1)), seed=i)
        if i % 2:
            edges = with_random_weights(edges, seed=i)
        for suffix, write, load in (
                (".mtx", io.write_matrix_market, io.load_matrix_market),
                (".el", io.write_edge_list, lambda p: io.load_edge_list(
                    p, weighted=edges.weighted, remap=False))):
            p = tmp_path / f"g{i}{suffix}"
            write(edges, p)
            back = load(p)
            if _multiset(EdgeList(back.src, back.dst, back.weights, n)) != _multiset(edges):
                bad.append(f"graph {i} {suffix}")
        g = build_graph(edges, directed=bool(i % 3))
        a, b = tmp_path / f"g{i}a.bin", tmp_path / f"g{i}b.bin"
        io.save_binary(g, a)
        io.save_binary(build_graph(edges, directed=bool(i % 3)), b)
        back = io.load_binary(a)
        if not back.structurally_equal(g) or _multiset(back.edges()) != _multiset(g.edges()):
            bad.append(f"graph {i} .bin")
        if a.read_bytes() != b.read_bytes():
            bad.append(f"graph {i} .bin not byte-deterministic")
    report(capsys, 9, not bad, f"50 random graphs through mtx, edge list and binary; "
           f"{len(bad)} failures" + (f"; first: {bad[0]}" if bad else ""))


# --- 10 ---

def test_criterion_10_dataset_counts(capsys):
    data_dir = os.environ.get("GARDENIA_DATA_DIR")
    manifest = io.load_manifest()
    present = ([e for e in manifest.entries if io.local_path(e, data_dir).exists()]
               if data_dir else [])
    if not present:
        with capsys.disabled():
            print("\nCRITERION 10: SKIP - no cached datasets (set GARDENIA_DATA_DIR and run "
                  "`gardenia fetch --name <dataset>`)")
        pytest.skip("no cached datasets")
    lines, passed = [], True
    for entry in present:
        check = io.check_counts(entry, io.load_edges(io.local_path(entry, data_dir), entry.format))
        passed &= check.passed
        lines.append(f"{entry.name}: n={check.n} m={check.m_candidates} avg={check.avg_deg:.2f} "
                     f"vs {entry.expected_n.text}/{entry.expected_m.text}/{entry.avg_deg} "
                     f"{'ok' if check.passed else 'MISMATCH'}")
    report(capsys, 10, passed, "; ".join(lines))


# --- 11 ---

def test_criterion_11_timing_hygiene(monkeypatch, capsys):
    clock = FakeClock()
    instrument_bench(monkeypatch, clock, "bfs", load_cost=1000.0, verify_cost=500.0, run_cost=1.0)
    rec = run_benchmark(BenchConfig("bfs", "gen:rmat:scale=10,ef=8", trials=10, workers=1,
                                    verify=True), clock=clock)
    fake_ok = rec.verified and rec.time_avg_s == 1.0 and rec.time_min_s == 1.0
    real = run_benchmark(BenchConfig("pr", "gen:rmat:scale=10,ef=8", trials=10))
    real_ok = real.time_min_s <= real.time_avg_s
    report(capsys, 11, fake_ok and real_ok,
           f"fake clock: every trial read {rec.time_min_s}..{rec.time_avg_s} s although load "
           f"costs 1000 s and verify 500 s; real clock min {real.time_min_s:.2e} <= avg "
           f"{real.time_avg_s:.2e}")
