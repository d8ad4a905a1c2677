"""Benchmark harness: timing protocol, throughput metrics and CSV output.

A run loads its input untimed, performs one untimed warm-up call, then times
``trials`` kernel calls. Verification and the serial-oracle timing happen
after the timed trials and never overlap them.
"""

from __future__ import annotations

import csv
import dataclasses
import time
from dataclasses import dataclass, field
from pathlib import Path
from types import SimpleNamespace
from typing import Callable

import numpy as np

from . import generators, io, kernels, parallel, verify
from .errors import ConfigurationError, GardeniaError, OracleSizeError
from .graph import EdgeList, build_graph
from .instrument import IterationTrace
from .kernels.bfs import DEFAULT_ALPHA, DEFAULT_BETA
from .kernels.pagerank import DEFAULT_DAMPING, DEFAULT_MAX_ITERS, DEFAULT_TOLERANCE
from .kernels.sgd import DEFAULT_EPOCHS, DEFAULT_K, DEFAULT_LAMBDA, DEFAULT_LR

DEFAULT_TRIALS = 10


@dataclass
class BenchConfig:
    kernel: str
    graph: str
    format: str | None = None
    symmetrize: bool = False
    source: int | None = None
    trials: int = DEFAULT_TRIALS
    workers: int | None = None
    damping: float = DEFAULT_DAMPING
    tolerance: float = DEFAULT_TOLERANCE
    max_iters: int = DEFAULT_MAX_ITERS
    delta: float | None = None
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    k: int = DEFAULT_K
    lr: float = DEFAULT_LR
    lam: float = DEFAULT_LAMBDA
    epochs: int = DEFAULT_EPOCHS
    sweeps: int = 1
    bc_sources: int | None = None
    seed: int = 0
    verify: bool = False
    trace: bool = False
    output: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if self.workers is not None and self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        if self.kernel not in KERNELS:
            raise ConfigurationError(f"unknown kernel {self.kernel!r}; choose from {sorted(KERNELS)}")

    @property
    def dataset(self) -> str:
        return self.graph if self.graph.startswith("gen:") else Path(self.graph).name


COLUMNS = ("kernel", "dataset", "n", "m", "trials", "time_avg_s", "time_min_s", "mteps",
           "gflops", "speedup_vs_serial", "verified", "workers", "speedup_vs_1worker", "error")


@dataclass
class BenchRecord:
    kernel: str
    dataset: str
    n: int = 0
    m: int = 0
    trials: int = 0
    time_avg_s: float | None = None
    time_min_s: float | None = None
    mteps: float | None = None
    gflops: float | None = None
    speedup_vs_serial: float | None = None
    verified: bool | None = None
    workers: int = 1
    speedup_vs_1worker: float | None = None
    error: str = ""
    report: verify.VerifyReport | None = field(default=None, compare=False, repr=False)
    trace: IterationTrace | None = field(default=None, compare=False, repr=False)

    @property
    def ok(self) -> bool:
        return not self.error and self.verified is not False

    def row(self) -> list[str]:
        return [_fmt(getattr(self, c)) for c in COLUMNS]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


# --- input loading --------------------------------------------------------

def load_input(cfg: BenchConfig, ratings: bool = False):
    """Graph (or a ratings EdgeList when ``ratings``) named by ``cfg.graph``."""
    if cfg.graph.startswith("gen:"):
        edges = generators.from_recipe(cfg.graph)
        if ratings:
            return edges
        undirected = cfg.symmetrize or edges.symmetric
        return build_graph(edges, directed=not undirected).with_inverse()
    if ratings:
        return io.load_edge_list(cfg.graph, weighted=True, remap=False)
    return io.load_graph(cfg.graph, cfg.format, symmetrize=cfg.symmetrize)


# --- kernel registry ------------------------------------------------------

@dataclass(frozen=True)
class KernelSpec:
    """How the harness prepares, runs, checks and meters one kernel."""

    name: str
    prepare: Callable
    run: Callable
    oracle: Callable
    check: Callable
    input: str = "graph"
    traced: Callable | None = None
    flops: Callable | None = None


def _require(g, cfg, undirected=False, weighted=False):
    if undirected and g.directed:
        raise ConfigurationError(f"{cfg.kernel} needs an undirected graph; pass --symmetrize")
    if weighted and not g.weighted:
        raise ConfigurationError(f"{cfg.kernel} needs edge weights")


def _pick_source(g, cfg) -> int:
    if cfg.source is not None:
        if not 0 <= cfg.source < g.n:
            raise ConfigurationError(f"source {cfg.source} outside [0, {g.n})")
        return cfg.source
    candidates = np.flatnonzero(g.out_degrees() > 0)
    if not candidates.size:
        return 0
    return int(np.random.default_rng(cfg.seed).choice(candidates))


def _traversal(kernel_fn, weighted=False, extra=lambda cfg: {}):
    def prepare(g, cfg):
        _require(g, cfg, weighted=weighted)
        return SimpleNamespace(g=g, source=_pick_source(g, cfg), params=extra(cfg))

    def run(p, workers):
        return kernel_fn(p.g, p.source, workers=workers, **p.params)

    def traced(p, workers, trace):
        kernel_fn(p.g, p.source, workers=workers, trace=trace, **p.params)

    oracle = ((lambda p: verify.oracle_dijkstra(p.g, p.source)) if weighted
              else (lambda p: verify.oracle_bfs(p.g, p.source)))
    return dict(prepare=prepare, run=run, traced=traced, oracle=oracle,
                check=lambda p, out, ref: verify.compare(out, ref, "exact"))


def _bc_sources(g, cfg):
    count = cfg.bc_sources
    if count is None and g.n > verify.BC_ALLPAIRS_LIMIT:
        count = 64
    return kernels.select_sources(g.n, count, cfg.seed)


def _bc_spec():
    def prepare(g, cfg):
        return SimpleNamespace(g=g, sources=_bc_sources(g, cfg))

    return dict(
        prepare=prepare,
        run=lambda p, w: kernels.bc(p.g, sources=p.sources, workers=w),
        traced=lambda p, w, t: kernels.bc(p.g, sources=p.sources, workers=w, trace=t),
        oracle=lambda p: verify.oracle_bc_allpairs(p.g, p.sources),
        check=lambda p, out, ref: verify.compare(out, ref, "relative"))


def _pr_spec():
    def prepare(g, cfg):
        return SimpleNamespace(g=g, damping=cfg.damping, tol=cfg.tolerance, iters=cfg.max_iters)

    def check(p, out, ref):
        # distance to the fixed point of a d-contraction is at most d/(1-d) times the last step
        budget = p.damping / (1.0 - p.damping) * out.l1_change + 1e-9
        return verify.compare(out.scores, ref, "l1", atol=budget)

    return dict(
        prepare=prepare,
        run=lambda p, w: kernels.pagerank(p.g, p.damping, p.tol, p.iters, workers=w),
        oracle=lambda p: verify.oracle_pagerank(p.g, p.damping),
        check=check)


def _cc_spec():
    def prepare(g, cfg):
        _require(g, cfg, undirected=True)
        return SimpleNamespace(g=g)

    return dict(
        prepare=prepare,
        run=lambda p, w: kernels.cc_label_propagation(p.g, workers=w),
        traced=lambda p, w, t: kernels.cc_label_propagation(p.g, workers=w, trace=t),
        oracle=lambda p: verify.oracle_cc_unionfind(p.g),
        check=lambda p, out, ref: verify.compare(out, ref, "partition"))


def _tc_spec():
    def prepare(g, cfg):
        _require(g, cfg, undirected=True)
        return SimpleNamespace(g=g)

    return dict(
        prepare=prepare,
        run=lambda p, w: kernels.triangle_count(p.g, workers=w),
        oracle=lambda p: verify.oracle_tc(p.g),
        check=lambda p, out, ref: verify.compare(np.array([out]), np.array([ref]), "exact"))


def _spmv_spec():
    def prepare(g, cfg):
        x = np.random.default_rng(cfg.seed).uniform(-1.0, 1.0, g.n)
        return SimpleNamespace(g=g, x=x)

    return dict(
        prepare=prepare,
        run=lambda p, w: kernels.spmv(p.g, p.x, workers=w),
        oracle=lambda p: verify.oracle_spmv(p.g, p.x),
        check=lambda p, out, ref: verify.compare(out, ref, "relative"),
        flops=lambda p: 2.0 * p.g.m)


def _symgs_spec():
    def prepare(g, cfg):
        _require(g, cfg, undirected=True)
        A, b = kernels.diagonally_dominant_system(g)
        coloring = kernels.greedy_coloring(A)
        order = np.concatenate(coloring.classes()) if A.n else np.zeros(0, np.int64)
        return SimpleNamespace(g=A, b=b, x0=np.zeros(A.n), coloring=coloring, order=order,
                               sweeps=cfg.sweeps)

    return dict(
        prepare=prepare,
        run=lambda p, w: kernels.symgs(p.g, p.x0, p.b, p.coloring, p.sweeps, workers=w),
        oracle=lambda p: verify.oracle_gs_serial(p.g, p.x0, p.b, p.sweeps, p.order),
        check=lambda p, out, ref: verify.compare(out, ref, "relative"),
        # each sweep is a forward and a backward pass, one multiply-add per nonzero
        flops=lambda p: 4.0 * p.g.m * p.sweeps)


def _sgd_spec():
    def prepare(r, cfg):
        if len(r) == 0 or r.weights is None:
            raise ConfigurationError("sgd needs a non-empty weighted ratings list (user item rating)")
        return SimpleNamespace(r=r, cfg=cfg, users=int(r.src.max()) + 1, items=int(r.dst.max()) + 1)

    def run(p, w):
        c = p.cfg
        return kernels.sgd_mf(p.r, c.k, c.lr, c.lam, c.epochs, c.seed, workers=w,
                              num_users=p.users, num_items=p.items)

    def oracle(p):
        c = p.cfg
        return verify.oracle_sgd_serial(p.r, c.k, c.lr, c.lam, c.epochs, c.seed, p.users, p.items)[2]

    def check(p, out, ref):
        final = out.rmse_trace[-1] if out.rmse_trace else kernels.rmse(out, p.r)
        # concurrent lock-free updates follow a different trajectory than the serial run
        rtol = 1e-4 if p.workers == 1 else 0.05
        return verify.compare(np.array([final]), np.array([ref]), "relative", rtol=rtol)

    return dict(prepare=prepare, run=run, oracle=oracle, check=check, input="ratings")


def _registry() -> dict[str, KernelSpec]:
    delta = lambda cfg: {"delta": cfg.delta}
    do = lambda cfg: {"alpha": cfg.alpha, "beta": cfg.beta}
    table = {
        "bfs": _traversal(kernels.bfs_direction_optimizing, extra=do),
        "bfs_push": _traversal(kernels.bfs_push),
        "bfs_pull": _traversal(kernels.bfs_pull),
        "bfs_quadratic": _traversal(kernels.bfs_quadratic),
        "sssp": _traversal(kernels.sssp_delta_stepping, weighted=True, extra=delta),
        "sssp_bellman": _traversal(kernels.sssp_bellman, weighted=True),
        "bc": _bc_spec(),
        "pr": _pr_spec(),
        "cc": _cc_spec(),
        "tc": _tc_spec(),
        "spmv": _spmv_spec(),
        "symgs": _symgs_spec(),
        "sgd": _sgd_spec(),
    }
    return {name: KernelSpec(name, **spec) for name, spec in table.items()}


KERNELS = _registry()
WORKLOADS = ("bfs", "sssp", "bc", "pr", "cc", "tc", "sgd", "spmv", "symgs")


# --- running --------------------------------------------------------------

def _time_trials(spec, prep, workers, trials, clock) -> list[float]:
    spec.run(prep, workers)  # untimed warm-up
    times = []
    for _ in range(trials):
        t0 = clock()
        spec.run(prep, workers)
        times.append(clock() - t0)
    return times


def run_benchmark(cfg: BenchConfig, clock: Callable[[], float] = time.perf_counter,
                  loaded=None) -> BenchRecord:
    """Time ``cfg.kernel`` on ``cfg.graph``; see the module docstring for the protocol.

    ``loaded`` lets a caller pass an already loaded input (sweeps reuse
    datasets). Incompatible kernel/input pairs raise ConfigurationError.
    """
    spec = KERNELS[cfg.kernel]
    workers = parallel.resolve_workers(cfg.workers)
    data = loaded if loaded is not None else load_input(cfg, ratings=spec.input == "ratings")
    if spec.input == "ratings" and not isinstance(data, EdgeList):
        raise ConfigurationError("sgd needs a ratings edge list, not a built graph")
    if spec.input == "graph" and isinstance(data, EdgeList):
        raise ConfigurationError(f"{cfg.kernel} needs a graph input")
    prep = spec.prepare(data, cfg)
    prep.workers = workers
    times = _time_trials(spec, prep, workers, cfg.trials, clock)
    avg = sum(times) / len(times)
    rec = BenchRecord(cfg.kernel, cfg.dataset, trials=cfg.trials, workers=workers,
                      time_avg_s=avg, time_min_s=min(times))
    if spec.input == "ratings":
        rec.n, rec.m = data.n, len(data)
    else:
        rec.n, rec.m = data.n, data.m

    result = spec.run(prep, workers)
    if spec.traced is not None:
        trace = IterationTrace(cfg.kernel)
        spec.traced(prep, workers, trace)
        if trace.edges_scanned and avg > 0:
            rec.mteps = trace.edges_scanned / avg / 1e6
        if cfg.trace:
            rec.trace = trace
    if spec.flops is not None and avg > 0:
        rec.gflops = spec.flops(prep) / avg / 1e9

    verify.warm_up()
    try:
        t0 = clock()
        reference = spec.oracle(prep)
        oracle_time = clock() - t0
    except OracleSizeError as exc:
        reference, oracle_time = None, None
        rec.error = str(exc) if cfg.verify else ""
    if oracle_time is not None and avg > 0:
        rec.speedup_vs_serial = oracle_time / avg
    if cfg.verify and reference is not None:
        rec.report = spec.check(prep, result, reference)
        rec.report.kernel = cfg.kernel
        rec.verified = rec.report.passed
    if workers > 1:
        serial = _time_trials(spec, prep, 1, cfg.trials, clock)
        rec.speedup_vs_1worker = (sum(serial) / len(serial)) / avg if avg > 0 else None
    return rec


def sweep(cfgs: list[BenchConfig], clock: Callable[[], float] = time.perf_counter,
          on_record: Callable[[BenchRecord], None] | None = None) -> list[BenchRecord]:
    """Run every config in order; a failing cell yields a record with ``error`` set.

    Inputs are loaded once per (graph, format, symmetrize, kind) and reused.
    ``on_record`` is called after each cell, for incremental output.
    """
    cache: dict[tuple, object] = {}
    records = []
    for cfg in cfgs:
        try:
            kind = KERNELS[cfg.kernel].input
            key = (cfg.graph, cfg.format, cfg.symmetrize, kind)
            if key not in cache:
                cache[key] = load_input(cfg, ratings=kind == "ratings")
            rec = run_benchmark(cfg, clock, loaded=cache[key])
        except (GardeniaError, ValueError, ArithmeticError, OSError) as exc:
            rec = BenchRecord(cfg.kernel, cfg.dataset, trials=cfg.trials,
                              workers=parallel.resolve_workers(cfg.workers),
                              error=f"{type(exc).__name__}: {exc}")
        records.append(rec)
        if on_record is not None:
            on_record(rec)
    return records


# --- CSV ------------------------------------------------------------------

def emit_csv(records, path) -> None:
    """Header plus one row per record, columns in :data:`COLUMNS` order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for rec in records:
            writer.writerow(rec.row())


class CsvSink:
    """Append records to a CSV as they arrive (header written on open)."""

    def __init__(self, path):
        self.fh = open(path, "w", newline="")
        self.writer = csv.writer(self.fh, lineterminator="\n")
        self.writer.writerow(COLUMNS)
        self.fh.flush()

    def __call__(self, rec: BenchRecord) -> None:
        self.writer.writerow(rec.row())
        self.fh.flush()

    def close(self) -> None:
        self.fh.close()


_PARSERS = {
    "n": int, "m": int, "trials": int, "workers": int,
    "time_avg_s": float, "time_min_s": float, "mteps": float, "gflops": float,
    "speedup_vs_serial": float, "speedup_vs_1worker": float,
    "verified": lambda s: s == "true",
}


def read_csv(path) -> list[BenchRecord]:
    records = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            values = {}
            for key in COLUMNS:
                raw = row.get(key, "")
                parse = _PARSERS.get(key)
                values[key] = (None if raw == "" and parse is not None
                               else parse(raw) if parse else raw)
            values["n"] = values["n"] or 0
            values["m"] = values["m"] or 0
            values["trials"] = values["trials"] or 0
            values["workers"] = values["workers"] or 1
            records.append(BenchRecord(**values))
    return records


def format_record(rec: BenchRecord) -> str:
    """One human-readable summary line."""
    if rec.error and rec.time_avg_s is None:
        return f"{rec.kernel} on {rec.dataset}: ERROR {rec.error}"
    head = f"{rec.kernel} on {rec.dataset} (n={rec.n}, m={rec.m}, workers={rec.workers}): "
    parts = [f"avg {rec.time_avg_s * 1e3:.3f} ms", f"min {rec.time_min_s * 1e3:.3f} ms"]
    if rec.mteps is not None:
        parts.append(f"{rec.mteps:.1f} MTEPS")
    if rec.gflops is not None:
        parts.append(f"{rec.gflops:.3f} GFLOP/s")
    if rec.speedup_vs_serial is not None:
        parts.append(f"{rec.speedup_vs_serial:.2f}x vs serial")
    if rec.speedup_vs_1worker is not None:
        parts.append(f"{rec.speedup_vs_1worker:.2f}x vs 1 worker")
    return head + ", ".join(parts)


def replace(cfg: BenchConfig, **changes) -> BenchConfig:
    return dataclasses.replace(cfg, **changes)


__all__ = ["BenchConfig", "BenchRecord", "COLUMNS", "CsvSink", "KERNELS", "WORKLOADS",
           "emit_csv", "format_record", "load_input", "read_csv", "replace",
           "run_benchmark", "sweep"]
