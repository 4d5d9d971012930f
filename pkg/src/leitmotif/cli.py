"""Command-line interface binding discovery, learning, synthesis and scoring.

Exit codes: 0 success, 1 no leitmotif found, 2 parameter error, 3 I/O error,
4 capacity (memory/budget) error. Every command writes a machine-readable
JSON record next to any flat tables and prints a short human summary; given
the same inputs, config and seed, the written files are byte-identical
across runs (wall time is reported on stdout only, it never enters a record).
"""

from __future__ import annotations

import argparse
import sys
import time

from . import __version__
from .bench import NoiseConfig, evaluate, generate_synthetic, noise_experiment
from .distances import DEFAULT_MEMORY_BUDGET, Measure
from .errors import CapacityError, InputFormatError, ParameterError
from .io import (
    SCHEMA_VERSION,
    read_record,
    read_series,
    write_record,
    write_series,
    write_table,
)
from .learn import learn_parameters
from .search import find_leitmotif

EXIT_OK = 0
EXIT_NO_LEITMOTIF = 1
EXIT_PARAMETER = 2
EXIT_IO = 3
EXIT_CAPACITY = 4


def _add_input_args(p):
    p.add_argument("--input", required=True, help="series file (delimited text)")
    p.add_argument("--delimiter", default=None, help="field delimiter (sniffed when omitted)")
    p.add_argument("--timestamp-column", action="store_true",
                   help="drop the first column before processing")


def _add_param_args(p, lengths=True):
    p.add_argument("--measure", default="zed", choices=[m.value for m in Measure])
    p.add_argument("--alpha", type=float, default=1.0,
                   help="trivial-match exclusion width as a fraction of l")
    p.add_argument("--f", type=int, required=True,
                   help="number of dimensions the motif manifests in")
    if lengths:
        p.add_argument("--l", type=int, default=None, help="motif length (pin)")
        p.add_argument("--l-min", type=int, default=None)
        p.add_argument("--l-max", type=int, default=None)
        p.add_argument("--l-step", type=int, default=1)
    p.add_argument("--k", type=int, default=None, help="motif set size (pin)")
    p.add_argument("--k-max", type=int, default=10,
                   help="largest set size considered when learning k")
    p.add_argument("--memory-budget-mb", type=int, default=DEFAULT_MEMORY_BUDGET >> 20,
                   help="dense-matrix budget; larger instances go sparse")
    p.add_argument("--sparse", action="store_true", help="force the sparse backend")
    p.add_argument("--threads", type=int, default=0,
                   help="reserved; computations are deterministic single-process")


def _resolve_length_mode(args, ts):
    has_range = args.l_min is not None or args.l_max is not None
    if (args.l is None) == (not has_range):
        raise ParameterError("supply exactly one of --l and --l-min/--l-max")
    if has_range:
        if args.l_min is None or args.l_max is None:
            raise ParameterError("--l-min and --l-max must be given together")
        return None, (args.l_min, args.l_max, args.l_step)
    return args.l, None


def _series_meta(path, ts):
    return {"path": str(path), "d": ts.d, "n": ts.n}


def cmd_discover(args):
    ts = read_series(args.input, args.delimiter, args.timestamp_column)
    budget = args.memory_budget_mb << 20
    l, l_range = _resolve_length_mode(args, ts)
    started = time.perf_counter()
    learned = {"l": False, "k": False}
    if l is None or args.k is None:
        params = learn_parameters(
            ts, f=args.f, l=l, l_range=l_range, k_max=args.k_max,
            measure=args.measure, alpha=args.alpha, memory_budget=budget,
        )
        if l is None:
            l = params.l
            learned["l"] = True
        k = args.k if args.k is not None else params.k
        learned["k"] = args.k is None
    else:
        k = args.k
    backend = "sparse" if args.sparse else "auto"
    result = find_leitmotif(
        ts, l, k, args.f, measure=args.measure, alpha=args.alpha,
        backend=backend, memory_budget=budget,
    )
    elapsed = time.perf_counter() - started
    record = {
        "command": "discover",
        "schema_version": SCHEMA_VERSION,
        "input": _series_meta(args.input, ts),
        "params": {
            "l": int(l), "k": int(k), "f": int(args.f),
            "measure": args.measure, "alpha": args.alpha,
            "backend": result.backend,
        },
        "learned": learned,
        "counters": {
            "evaluated": result.counters.evaluated,
            "pruned": result.counters.pruned,
            "infeasible": result.counters.infeasible,
        },
        "status": "ok" if result.found else "no-leitmotif",
    }
    if result.found:
        motif = result.leitmotif
        record["result"] = {
            "offsets": [int(o) for o in motif.offsets],
            "dims": [int(x) for x in motif.dims],
            "extent": motif.extent,
            "length": motif.length,
        }
    write_record(args.output + ".json", record)
    if result.found:
        rows = []
        for dim in result.leitmotif.dims:
            for occ, off in enumerate(result.leitmotif.offsets):
                for step in range(l):
                    rows.append(
                        (int(dim), occ, int(off), step, ts.values[dim, off + step])
                    )
        write_table(
            args.output + "_occurrences.csv",
            ["dim", "occurrence", "offset", "step", "value"],
            rows,
        )
    print(f"status: {record['status']}")
    if result.found:
        motif = result.leitmotif
        print(f"offsets: {list(map(int, motif.offsets))}")
        print(f"dims:    {list(map(int, motif.dims))}")
        print(f"extent:  {motif.extent:.6g}  (l={l}, k={k}, f={args.f}, "
              f"measure={args.measure}, backend={result.backend})")
    print(f"counters: evaluated={result.counters.evaluated} "
          f"pruned={result.counters.pruned} infeasible={result.counters.infeasible}")
    print(f"wall time: {elapsed:.3f}s")
    return EXIT_OK if result.found else EXIT_NO_LEITMOTIF


def cmd_learn(args):
    ts = read_series(args.input, args.delimiter, args.timestamp_column)
    budget = args.memory_budget_mb << 20
    l, l_range = _resolve_length_mode(args, ts)
    started = time.perf_counter()
    params = learn_parameters(
        ts, f=args.f, l=l, l_range=l_range, k_max=args.k_max,
        measure=args.measure, alpha=args.alpha, memory_budget=budget,
    )
    elapsed = time.perf_counter() - started
    record = {
        "command": "learn",
        "schema_version": SCHEMA_VERSION,
        "input": _series_meta(args.input, ts),
        "params": {"f": int(args.f), "k_max": int(args.k_max),
                   "measure": args.measure, "alpha": args.alpha},
        "learned": {
            "l": params.l, "k": params.k,
            "l_confident": params.l_confident,
            "k_confident": params.k_confident,
        },
        "status": "ok",
    }
    write_record(args.output + ".json", record)
    ef = params.ef
    write_table(
        args.output + "_ef.csv", ["k", "extent"],
        [(int(k), float(e)) for k, e in zip(ef.ks, ef.extents)],
    )
    if params.profile is not None:
        write_table(
            args.output + "_auef.csv", ["l", "au_ef"],
            [(int(l_), float(a)) for l_, a in
             zip(params.profile.lengths, params.profile.au_ef)],
        )
    l_conf = "high" if params.l_confident else "low"
    k_conf = "high" if params.k_confident else "low"
    print(f"learned l={params.l} (confidence {l_conf}), "
          f"k={params.k} (confidence {k_conf})")
    print(f"wall time: {elapsed:.3f}s")
    return EXIT_OK


def cmd_synth(args):
    ts, gt = generate_synthetic(
        args.seed, args.n, args.d, args.k, args.l, args.f, noise=args.noise
    )
    write_series(args.output + "_series.csv", ts)
    write_record(args.output + "_gt.json", {
        "command": "synth",
        "schema_version": SCHEMA_VERSION,
        "occurrences": [[off, length] for off, length in gt.occurrences],
        "dims": list(gt.dims),
        "k_true": gt.k_true,
        "l_true": gt.l_true,
        "f_true": gt.f_true,
        "seed": args.seed,
        "noise": args.noise,
        "status": "ok",
    })
    print(f"series: {args.output}_series.csv ({args.d} x {args.n})")
    print(f"ground truth: {args.output}_gt.json "
          f"(k={gt.k_true}, l={gt.l_true}, dims={list(gt.dims)})")
    return EXIT_OK


def _gt_from_record(record):
    from .bench import GroundTruth

    try:
        return GroundTruth(
            occurrences=tuple((int(a), int(b)) for a, b in record["occurrences"]),
            dims=tuple(record.get("dims", ())),
            k_true=int(record.get("k_true", len(record["occurrences"]))),
            l_true=int(record.get("l_true", record["occurrences"][0][1])),
            f_true=int(record.get("f_true", max(1, len(record.get("dims", (0,)))))),
        )
    except (KeyError, IndexError, TypeError) as exc:
        raise InputFormatError(f"malformed ground-truth record: {exc}") from exc


def cmd_eval(args):
    found_rec = read_record(args.found)
    gt = _gt_from_record(read_record(args.gt))
    if found_rec.get("status") == "no-leitmotif":
        offsets, length = [], gt.l_true
    else:
        try:
            offsets = found_rec["result"]["offsets"]
            length = found_rec["result"]["length"]
        except KeyError as exc:
            raise InputFormatError(f"found record lacks {exc}") from exc
    report = evaluate(offsets, gt, threshold=args.threshold, length=length)
    record = {
        "command": "eval",
        "schema_version": SCHEMA_VERSION,
        "precision": report.precision,
        "recall": report.recall,
        "matched": [[f, g] for f, g in report.matched],
        "overlap_threshold": report.overlap_threshold,
        "status": "ok",
    }
    write_record(args.output + ".json", record)
    print(f"precision: {report.precision:.3f}  recall: {report.recall:.3f} "
          f"(threshold {args.threshold})")
    return EXIT_OK


def cmd_noise(args):
    levels = tuple(float(x) for x in args.levels.split(",") if x != "")
    config = NoiseConfig(
        levels=levels, seeds=args.seeds, n=args.n, d=args.d,
        k_true=args.k, l_true=args.l, f_true=args.f,
        measure=args.measure, base_seed=args.seed,
    )
    started = time.perf_counter()
    stats = noise_experiment(config)
    elapsed = time.perf_counter() - started
    write_table(
        args.output + ".csv",
        ["level", "precision_mean", "precision_std", "recall_mean", "recall_std"],
        [(s.level, s.precision_mean, s.precision_std, s.recall_mean, s.recall_std)
         for s in stats],
    )
    write_record(args.output + ".json", {
        "command": "noise",
        "schema_version": SCHEMA_VERSION,
        "levels": [s.level for s in stats],
        "precision_mean": [s.precision_mean for s in stats],
        "recall_mean": [s.recall_mean for s in stats],
        "seeds": args.seeds,
        "status": "ok",
    })
    for s in stats:
        print(f"level {s.level:4.0%}: precision {s.precision_mean:.3f} "
              f"+- {s.precision_std:.3f}, recall {s.recall_mean:.3f} "
              f"+- {s.recall_std:.3f}")
    print(f"wall time: {elapsed:.3f}s")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="leitmotif",
        description="Discover sub-dimensional motif sets in multivariate time series.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discover", help="find the top leitmotif of a series")
    _add_input_args(p)
    _add_param_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="output path prefix")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("learn", help="learn motif length and set size")
    _add_input_args(p)
    _add_param_args(p)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("synth", help="generate a planted synthetic series")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True, help="number of planted copies")
    p.add_argument("--l", type=int, required=True, help="planted motif length")
    p.add_argument("--f", type=int, required=True, help="number of planted dimensions")
    p.add_argument("--noise", type=float, default=0.0,
                   help="per-copy jitter as a fraction of the template std")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="score a discovery record against ground truth")
    p.add_argument("--found", required=True, help="record written by discover")
    p.add_argument("--gt", required=True, help="ground-truth record from synth")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("noise", help="noise-robustness experiment table")
    p.add_argument("--levels", default="0,0.1,0.2,0.3,0.4,0.5",
                   help="comma-separated fractions of the series std")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--n", type=int, default=1200)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--l", type=int, default=20)
    p.add_argument("--f", type=int, default=2)
    p.add_argument("--measure", default="zed", choices=[m.value for m in Measure])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_noise)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except InputFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
