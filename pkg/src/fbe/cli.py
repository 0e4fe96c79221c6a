"""Command-line front end.

Subcommands: gen, embed, hamming, rip, bounds, angle, retrieval, bench,
storage.  Text reports go to --out (default stdout) as CSV (header row,
'.' decimal) or newline-delimited JSON; --plot additionally renders a
figure of the same rows.  Exit codes: 0 success, 1 usage error, 2 runtime
error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import bench as bench_mod
from . import bounds as bounds_mod
from . import fileio, rip, similarity
from .baselines import METHODS, make_projector
from .bincode import hamming_matrix


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # the contract wants usage failures to exit 1, not argparse's 2
    def error(self, message):
        raise _UsageError(message)


def _add_common(p: _Parser) -> None:
    p.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> _Parser:
    top = _Parser(prog="fbe", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("gen", help="build and serialize a projector")
    _add_common(p)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)

    p = sub.add_parser("embed", help="embed a vector batch file into a code file")
    _add_common(p)
    p.add_argument("--projector", required=True)
    p.add_argument("--vectors", required=True, dest="vectors")

    p = sub.add_parser("hamming", help="normalized distances between code files")
    _add_common(p)
    p.add_argument("--codes", required=True, help="corpus code file")
    p.add_argument("--queries", default=None, help="query code file (default: corpus)")
    p.add_argument("--top-k", type=int, default=None, help="emit top-k per query instead of the matrix")

    p = sub.add_parser("rip", help="Monte-Carlo distortion estimate")
    _add_common(p)
    p.add_argument("--matrix", choices=rip.MATRIX_KINDS, default="proposed")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, default=rip.DEFAULT_TRIALS)
    p.add_argument("--values", choices=("binary", "gaussian"), default="binary")
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--plot", default=None, help="also render the histogram to this file")

    p = sub.add_parser("bounds", help="isometry probability lower-bound curve")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--plot", default=None)

    p = sub.add_parser("angle", help="Hamming-vs-angle law measurement")
    _add_common(p)
    p.add_argument("--method", choices=METHODS, default="proposed")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--thetas", default="0.3927,0.7854,1.5708,2.3562",
                   help="comma-separated angles in radians")
    p.add_argument("--replicates", type=int, default=200)
    p.add_argument("--sparsity", type=int, default=None, help="k-sparse pairs (default dense)")
    p.add_argument("--plot", default=None)

    p = sub.add_parser("retrieval", help="synthetic clustered-corpus retrieval")
    _add_common(p)
    p.add_argument("--method", choices=METHODS, action="append", dest="methods",
                   help="repeatable; default proposed and lsh")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, action="append", dest="ms", required=True,
                   help="repeatable code size")
    p.add_argument("--corpus-size", type=int, default=5000)
    p.add_argument("--queries", type=int, default=200)
    p.add_argument("--top-k", type=int, default=50)
    p.add_argument("--clusters", type=int, default=10)
    p.add_argument("--plot", default=None)

    p = sub.add_parser("bench", help="embedding time benchmark")
    _add_common(p)
    p.add_argument("--method", choices=METHODS, action="append", dest="methods", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--m-sweep", default=None, help="lo:hi, swept over powers of two")
    p.add_argument("--repetitions", type=int, default=25)
    p.add_argument("--warmup", type=int, default=5)
    p.add_argument("--plot", default=None)

    p = sub.add_parser("storage",
                       help="projection storage accounting (megabytes = 2^20 bytes, "
                            "matrix elements 32-bit)")
    _add_common(p)
    p.add_argument("--n", required=True, help="comma-separated input dimensions")
    p.add_argument("--m", default=None, help="comma-separated code sizes (default: m = n)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--all-methods", action="store_true")
    group.add_argument("--method", choices=METHODS, action="append", dest="methods")
    p.add_argument("--plot", default=None)

    return top


def _emit(rows: list[dict], fieldnames: list[str], args) -> None:
    if args.format == "json":
        text = "\n".join(json.dumps({k: row[k] for k in fieldnames}, sort_keys=True)
                         for row in rows) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _floats(row: dict) -> dict:
    return {k: (float(v) if isinstance(v, np.floating) else v) for k, v in row.items()}


def _cmd_gen(args) -> None:
    if not args.out:
        raise _UsageError("gen requires --out for the projector file")
    fileio.write_projector(args.out, make_projector(args.method, args.n, args.m, args.seed))


def _cmd_embed(args) -> None:
    if not args.out:
        raise _UsageError("embed requires --out for the code file")
    projector = fileio.read_projector(args.projector)
    batch = fileio.read_vectors(args.vectors)
    fileio.write_codes(args.out, (projector.embed_batch_words(batch), projector.m))


def _cmd_hamming(args) -> None:
    corpus_words, m = fileio.codes_to_words(fileio.read_codes(args.codes))
    if args.queries:
        query_words, mq = fileio.codes_to_words(fileio.read_codes(args.queries))
        if mq != m:
            raise ValueError(f"query codes have {mq} bits but corpus codes have {m}")
    else:
        query_words = corpus_words
    dist = hamming_matrix(query_words, corpus_words) / m
    if args.top_k is not None:
        if not 1 <= args.top_k <= dist.shape[1]:
            raise _UsageError("--top-k must lie in 1..corpus size")
        rows, names = [], ["query", "rank", "index", "distance"]
        for q, row in enumerate(dist):
            order = np.lexsort((np.arange(row.size), row))[: args.top_k]
            rows.extend({"query": q, "rank": r, "index": int(i), "distance": float(row[i])}
                        for r, i in enumerate(order))
    else:
        names = [f"d{j}" for j in range(dist.shape[1])]
        rows = [{f"d{j}": float(v) for j, v in enumerate(row)} for row in dist]
    _emit(rows, names, args)


def _cmd_rip(args) -> None:
    value_model = "binary01" if args.values == "binary" else "gaussian"
    estimate = rip.estimate_rip(args.matrix, args.n, args.m, args.k, value_model,
                                args.trials, args.seed, args.workers)
    hist = rip.rip_histogram(estimate, args.bins)
    record = {
        "params": estimate.params(),
        "mean_delta": estimate.mean_delta,
        "cdf": estimate.cdf_points(),
        "histogram": [[lo, hi, c] for lo, hi, c in hist],
    }
    if args.format == "json":
        text = json.dumps(record, sort_keys=True) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        rows = [{"mean_delta": estimate.mean_delta, "cdf_t": t, "cdf_p": p}
                for t, p in record["cdf"]]
        _emit(rows, ["mean_delta", "cdf_t", "cdf_p"], args)
    if args.plot:
        from . import plots

        plots.save_rip_histogram(hist, args.plot,
                                 title=f"{args.matrix} n={args.n} m={args.m} k={args.k}")


def _bound_rows(n: int, m: int, k: int) -> list[dict]:
    rows = []
    for point in bounds_mod.distortion_level_curve(n, m, k):
        delta = float(point.delta)
        rows.append({
            "delta": delta,
            "exact": point.exact,
            "stirling": point.stirling,
            "theorem1": (bounds_mod.concentration_lower_bound(k, m, delta)
                         if 0.0 < delta < 1.0 else 0.0),
        })
    return rows


def _cmd_bounds(args) -> None:
    rows = _bound_rows(args.n, args.m, args.k)
    _emit(rows, ["delta", "exact", "stirling", "theorem1"], args)
    if args.plot:
        from . import plots

        plots.save_bound_curves(rows, args.plot)


def _cmd_angle(args) -> None:
    thetas = [float(t) for t in args.thetas.split(",") if t]
    results = similarity.charikar_experiment(args.method, args.n, args.m, thetas,
                                             args.replicates, args.seed, args.sparsity)
    rows = [{
        "theta": theta,
        "mean_h": stats.mean_h,
        "var_h": stats.var_h,
        "predicted_mean": similarity.predicted_mean(theta),
        "predicted_var": similarity.predicted_var(theta, args.m),
    } for theta, stats in results]
    _emit(rows, ["theta", "mean_h", "var_h", "predicted_mean", "predicted_var"], args)
    if args.plot:
        from . import plots

        plots.save_angle_curves(rows, args.plot, title=f"{args.method} m={args.m}")


def _cmd_retrieval(args) -> None:
    methods = args.methods or ["proposed", "lsh"]
    spec = similarity.ClusterSpec(clusters=args.clusters)
    rows = []
    for m in args.ms:
        for method in methods:
            result = similarity.synthetic_retrieval(method, args.n, m, args.corpus_size,
                                                    args.queries, args.top_k, spec, args.seed)
            rows.append({"method": method, "m": m, "map_at_k": result.map_at_k})
    _emit(rows, ["method", "m", "map_at_k"], args)
    if args.plot:
        from . import plots

        plots.save_retrieval_bars(rows, args.plot)


def _cmd_bench(args) -> None:
    if (args.m is None) == (args.m_sweep is None):
        raise _UsageError("bench needs exactly one of --m or --m-sweep")
    if args.m_sweep:
        lo, sep, hi = args.m_sweep.partition(":")
        if not sep:
            raise _UsageError("--m-sweep expects lo:hi")
        m_values = bench_mod.powers_of_two(int(lo), int(hi))
    else:
        m_values = [args.m]
    rows = []
    for method in args.methods:
        for result in bench_mod.sweep_m(method, args.n, m_values,
                                        args.repetitions, args.warmup, args.seed):
            rows.append({"method": result.method, "m": result.m,
                         "median_s": result.median_s, "iqr_s": result.iqr_s})
    _emit(rows, ["method", "m", "median_s", "iqr_s"], args)
    if args.plot:
        from . import plots

        plots.save_bench_sweep(rows, args.plot, title=f"n={args.n}")


def _cmd_storage(args) -> None:
    n_values = [int(v) for v in str(args.n).split(",") if v]
    m_values = [int(v) for v in str(args.m).split(",") if v] if args.m else None
    methods = METHODS if (args.all_methods or not args.methods) else tuple(args.methods)
    rows = [_floats(r) for r in bench_mod.storage_table(n_values, m_values, methods)]
    _emit(rows, ["method", "n", "m", "bytes", "megabytes"], args)
    if args.plot:
        from . import plots

        plots.save_storage_bars(rows, args.plot)


_HANDLERS = {
    "gen": _cmd_gen,
    "embed": _cmd_embed,
    "hamming": _cmd_hamming,
    "rip": _cmd_rip,
    "bounds": _cmd_bounds,
    "angle": _cmd_angle,
    "retrieval": _cmd_retrieval,
    "bench": _cmd_bench,
    "storage": _cmd_storage,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a subcommand is required")
        _HANDLERS[args.command](args)
        return 0
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fbe: error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 2
    except Exception as exc:  # runtime failures map to exit 2 by contract
        print(f"fbe: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
