"""Command-line entry point.

    gardenia <kernel> --graph PATH|gen:RECIPE [options]   time one kernel
    gardenia gen rmat|grid|uniform|ratings ... --out PATH  write a synthetic input
    gardenia fetch --name NAME [--manifest FILE] [--dest DIR]
    gardenia stats --graph PATH|gen:RECIPE                 degree and imbalance proxies

Exit status is 0 on success, 1 when verification fails, 2 on any error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import bench, generators, io, parallel
from .errors import GardeniaError
from .graph import EdgeList, build_graph, degree_stats
from .instrument import PARTITIONINGS, imbalance

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_ERROR = 0, 1, 2
FORMAT_CHOICES = ("mtx", "el", "edgelist", "snap", "bin")


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True, help="input file, or gen:<recipe> e.g. gen:rmat:scale=16,ef=16")
    p.add_argument("--format", choices=FORMAT_CHOICES, help="input format (default: from the suffix)")
    p.add_argument("--symmetrize", action="store_true", help="treat the input as undirected")


def _kernel_parser(sub, name: str) -> None:
    p = sub.add_parser(name, help=f"benchmark the {name} kernel")
    _add_graph_args(p)
    p.add_argument("--source", type=int, help="traversal source (default: seeded random non-isolated vertex)")
    p.add_argument("--runs", type=int, default=bench.DEFAULT_TRIALS, help="timed trials (default 10)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $GARDENIA_THREADS or the CPU count)")
    p.add_argument("--delta", type=float, help="delta-stepping bucket width (default: mean weight)")
    p.add_argument("--alpha", type=float, default=bench.DEFAULT_ALPHA)
    p.add_argument("--beta", type=float, default=bench.DEFAULT_BETA)
    p.add_argument("--damping", type=float, default=bench.DEFAULT_DAMPING)
    p.add_argument("--tol", type=float, default=bench.DEFAULT_TOLERANCE)
    p.add_argument("--max-iters", type=int, default=bench.DEFAULT_MAX_ITERS)
    p.add_argument("--k", type=int, default=bench.DEFAULT_K)
    p.add_argument("--lr", type=float, default=bench.DEFAULT_LR)
    p.add_argument("--lambda", dest="lam", type=float, default=bench.DEFAULT_LAMBDA)
    p.add_argument("--epochs", type=int, default=bench.DEFAULT_EPOCHS)
    p.add_argument("--sweeps", type=int, default=1)
    p.add_argument("--bc-sources", type=int, help="BC source sample size (default: all up to 2000 vertices, else 64)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verify", action="store_true", help="check the result against the serial oracle")
    p.add_argument("--trace", nargs="?", const="-", metavar="PATH",
                   help="write the per-iteration trace as CSV (stdout without PATH)")
    p.add_argument("--out", help="append-free CSV of the benchmark record")
    p.set_defaults(handler=_run_kernel, kernel=name)


def _gen_parser(sub) -> None:
    p = sub.add_parser("gen", help="write a synthetic graph or ratings file")
    kinds = p.add_subparsers(dest="kind", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", required=True)
    common.add_argument("--format", choices=FORMAT_CHOICES, help="output format (default: from the suffix)")
    common.add_argument("--weighted", action="store_true", help="attach uniform random weights")
    common.add_argument("--symmetrize", action="store_true", help="store as undirected (binary output)")

    r = kinds.add_parser("rmat", parents=[common])
    r.add_argument("--scale", type=int, required=True)
    r.add_argument("--edge-factor", type=int, default=16)
    for name, default in zip("abcd", (0.57, 0.19, 0.19, 0.05)):
        r.add_argument(f"--{name}", type=float, default=default)
    g = kinds.add_parser("grid", parents=[common])
    g.add_argument("--rows", type=int, required=True)
    g.add_argument("--cols", type=int, required=True)
    u = kinds.add_parser("uniform", parents=[common])
    u.add_argument("--n", type=int, required=True)
    u.add_argument("--m", type=int, required=True)
    t = kinds.add_parser("ratings", parents=[common])
    t.add_argument("--users", type=int, required=True)
    t.add_argument("--items", type=int, required=True)
    t.add_argument("--ratings", type=int, required=True)
    t.add_argument("--low", type=int, default=1)
    t.add_argument("--high", type=int, default=5)
    p.set_defaults(handler=_run_gen)


def _fetch_parser(sub) -> None:
    p = sub.add_parser("fetch", help="download a dataset from the manifest")
    p.add_argument("--manifest", help="manifest file (default: the packaged one)")
    p.add_argument("--name", help="dataset name")
    p.add_argument("--dest", default=os.environ.get("GARDENIA_DATA_DIR", "datasets"))
    p.add_argument("--no-verify", action="store_true", help="skip the published-count check")
    p.add_argument("--list", action="store_true", help="list manifest entries and exit")
    p.set_defaults(handler=_run_fetch)


def _stats_parser(sub) -> None:
    p = sub.add_parser("stats", help="degree statistics and partition work imbalance")
    _add_graph_args(p)
    p.add_argument("--threads", type=int, default=None, help="partitions for the imbalance proxy")
    p.set_defaults(handler=_run_stats)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gardenia", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in bench.KERNELS:
        _kernel_parser(sub, name)
    _gen_parser(sub)
    _fetch_parser(sub)
    _stats_parser(sub)
    return parser


def _run_kernel(args) -> int:
    cfg = bench.BenchConfig(
        kernel=args.kernel, graph=args.graph, format=args.format, symmetrize=args.symmetrize,
        source=args.source, trials=args.runs, workers=args.threads, damping=args.damping,
        tolerance=args.tol, max_iters=args.max_iters, delta=args.delta, alpha=args.alpha,
        beta=args.beta, k=args.k, lr=args.lr, lam=args.lam, epochs=args.epochs,
        sweeps=args.sweeps, bc_sources=args.bc_sources, seed=args.seed, verify=args.verify,
        trace=args.trace is not None, output=args.out)
    rec = bench.run_benchmark(cfg)
    print(bench.format_record(rec))
    if rec.report is not None:
        print(rec.report.summary())
    elif rec.error:
        print(f"note: {rec.error}")
    if args.trace is not None:
        if rec.trace is None:
            print(f"note: {args.kernel} has no iteration trace", file=sys.stderr)
        elif args.trace == "-":
            rec.trace.to_csv(sys.stdout)
        else:
            rec.trace.to_csv(args.trace)
    if args.out:
        bench.emit_csv([rec], args.out)
    if rec.error and cfg.verify:
        return EXIT_ERROR
    return EXIT_VERIFY_FAILED if rec.verified is False else EXIT_OK


def _write_output(edges: EdgeList, args) -> None:
    fmt = io.normalize_format(args.format, args.out)
    if fmt == "bin":
        undirected = args.symmetrize or edges.symmetric
        io.save_binary(build_graph(edges, directed=not undirected), args.out)
    elif fmt == "mtx":
        io.write_matrix_market(edges, args.out, symmetric=edges.symmetric)
    else:
        if edges.symmetric:
            w = None if edges.weights is None else np.concatenate([edges.weights, edges.weights])
            edges = EdgeList(np.concatenate([edges.src, edges.dst]),
                             np.concatenate([edges.dst, edges.src]), w, edges.num_vertices)
        io.write_edge_list(edges, args.out)


def _run_gen(args) -> int:
    if args.kind == "rmat":
        edges = generators.gen_rmat(generators.RmatParams(
            args.scale, args.edge_factor, args.a, args.b, args.c, args.d, args.seed))
    elif args.kind == "grid":
        edges = generators.gen_grid2d(args.rows, args.cols)
    elif args.kind == "uniform":
        edges = generators.gen_uniform(args.n, args.m, args.seed)
    else:
        edges = generators.gen_ratings(args.users, args.items, args.ratings,
                                       (args.low, args.high), args.seed)
    if args.weighted and args.kind != "ratings":
        edges = generators.with_random_weights(edges, args.seed)
    _write_output(edges, args)
    print(f"wrote {args.kind}: n={edges.n} edges={len(edges)} -> {args.out}")
    return EXIT_OK


def _run_fetch(args) -> int:
    manifest = io.load_manifest(args.manifest)
    if args.list:
        for e in manifest.entries:
            n = e.expected_n.text if e.expected_n else "?"
            m = e.expected_m.text if e.expected_m else "?"
            print(f"{e.name:20s} {e.format:8s} n={n:6s} m={m:6s} {e.topology:6s} {e.description}")
        return EXIT_OK
    if not args.name:
        raise GardeniaError("fetch needs --name (or --list)")
    path = io.fetch_dataset(manifest, args.name, args.dest, verify=not args.no_verify)
    print(path)
    return EXIT_OK


def _run_stats(args) -> int:
    cfg = bench.BenchConfig("bfs", args.graph, args.format, args.symmetrize, trials=1)
    g = bench.load_input(cfg)
    workers = parallel.resolve_workers(args.threads)
    print(f"n={g.n} m={g.m} directed={g.directed}")
    print(degree_stats(g).summary())
    for part in PARTITIONINGS:
        print(f"work imbalance proxy ({part}): {imbalance(g, part, workers).summary()}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (GardeniaError, OSError, ValueError, ArithmeticError) as exc:
        print(f"gardenia: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
