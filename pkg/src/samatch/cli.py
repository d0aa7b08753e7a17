"""Command-line front end.

Subcommands: exact (closed-form probabilities), sample (empirical vs
exact fixed-point distribution), sa (one annealing run), table1 and
table2 (the replication experiments), census (brute-force oracle).

Exit codes: 0 success, 1 runtime failure, 2 invalid arguments.  Long
commands print progress to stderr only; stdout carries just the result.
The default master seed is 1729, overridable with the SAMATCH_SEED
environment variable or --seed.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from fractions import Fraction

from . import __version__, exact
from .annealing import AnnealTemplate, anneal, trace_to_csv
from .experiments import (
    DEFAULT_SAMPLES,
    DEFAULT_THRESHOLD,
    TABLE1_DEFAULT_N,
    TABLE2_DEFAULT_N,
    allow_big_int_strings,
    compare_exact_empirical,
    run_table1,
    run_table2,
)
from .graphs import generate_pair
from .permutations import CENSUS_MAX_N, exhaustive_fixed_point_census
from .rng import mix64


def _default_seed() -> int:
    env = os.environ.get("SAMATCH_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValueError(f"SAMATCH_SEED must be an integer, got {env!r}") from exc
    return 1729


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be a non-negative integer, got {text}")
    return value


def _n_list(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"malformed n list: {text!r}") from exc
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"n list must hold positive integers: {text!r}")
    return values


def _t0_value(text: str):
    if text == "auto":
        return "auto"
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"t0 must be 'auto' or a number, got {text!r}") from exc
    if value < 0:
        raise argparse.ArgumentTypeError(f"t0 must be >= 0, got {text}")
    return value


@contextlib.contextmanager
def _open_out(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as handle:
            yield handle


def _progress_printer(every: int = 200):
    seen = 0

    def emit(message: str) -> None:
        nonlocal seen
        seen += 1
        if seen % every == 0 or not message.startswith("table2"):
            print(message, file=sys.stderr)

    return emit


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="master seed (default: SAMATCH_SEED env var, else 1729)",
    )


def _add_anneal_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--operator", choices=("swap", "insertion", "inversion", "scramble"),
                        default="swap", help="neighborhood move (default: swap)")
    parser.add_argument("--objective", choices=("structural", "oracle"), default="structural",
                        help="energy to minimize (default: structural)")
    parser.add_argument("--steps", type=_positive_int, default=None,
                        help="proposals per run (default: 100*n)")
    parser.add_argument("--epoch", type=_positive_int, default=None,
                        help="proposals per temperature level (default: steps/100)")
    parser.add_argument("--cooling", type=float, default=0.95,
                        help="geometric cooling factor in (0,1) (default: 0.95)")
    parser.add_argument("--t0", type=_t0_value, default="auto",
                        help="initial temperature, number or 'auto' (default: auto)")
    parser.add_argument("--edge-prob", type=float, default=0.5,
                        help="edge probability of the random graphs (default: 0.5)")
    parser.add_argument("--relabel", choices=("identity", "random"), default="identity",
                        help="ground-truth labeling mode (default: identity)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="samatch",
        description="Exact fixed-point statistics of random permutations and "
        "simulated-annealing graph matching benchmarks.",
    )
    parser.add_argument("--version", action="version", version=f"samatch {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="closed-form fixed-point probabilities")
    p.add_argument("--n", type=_positive_int, default=None,
                   help="permutation size (required except for --kind limit)")
    p.add_argument("--m", type=_nonneg_int, required=True, help="fixed-point count")
    p.add_argument("--kind", choices=("point", "cumulative", "tail", "limit"), default="point",
                   help="exactly m / at most m / strictly more than m / large-n limit "
                        "of exactly m (default: point)")
    p.add_argument("--format", choices=("text", "json"), default="text",
                   help="output format (default: text)")

    p = sub.add_parser("sample", help="empirical fixed-point histogram vs exact distribution")
    p.add_argument("--n", type=_positive_int, required=True, help="permutation size")
    p.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES,
                   help="permutations to draw (default: 100000)")
    p.add_argument("--max-m", type=_nonneg_int, default=10,
                   help="largest bin to report (default: 10)")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="output format (default: csv)")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    _add_seed(p)

    p = sub.add_parser("sa", help="one annealing run on a random pair")
    p.add_argument("--n", type=_positive_int, required=True, help="vertices per graph")
    _add_anneal_flags(p)
    p.add_argument("--trace-out", default=None,
                   help="write the per-epoch trace CSV here (default: no trace file)")
    p.add_argument("--format", choices=("text", "json"), default="text",
                   help="output format (default: text)")
    _add_seed(p)

    p = sub.add_parser("table1", help="random-permutation census benchmark")
    p.add_argument("--n-list", type=_n_list, default=list(TABLE1_DEFAULT_N),
                   help="comma-separated sizes (default: 20,50,100,300,500,1000,10000)")
    p.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES,
                   help="permutations per size (default: 100000)")
    p.add_argument("--threshold", type=_nonneg_int, default=DEFAULT_THRESHOLD,
                   help="count permutations with MORE than this many fixed points (default: 3)")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="output format (default: csv)")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--workers", type=_positive_int, default=1,
                   help="parallel workers; output is worker-count independent (default: 1)")
    _add_seed(p)

    p = sub.add_parser("table2", help="annealing success-rate benchmark")
    p.add_argument("--n-list", type=_n_list, default=list(TABLE2_DEFAULT_N),
                   help="comma-separated sizes (default: 20,50,100,300,500,1000)")
    p.add_argument("--runs", type=_positive_int, default=None,
                   help="runs per size (default: 1000 for n<=100, 200 for n<=1000, else 50)")
    p.add_argument("--threshold", type=_nonneg_int, default=DEFAULT_THRESHOLD,
                   help="correct matches a run must exceed to count as a success (default: 3)")
    _add_anneal_flags(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="output format (default: csv)")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--workers", type=_positive_int, default=1,
                   help="parallel workers; output is worker-count independent (default: 1)")
    _add_seed(p)

    p = sub.add_parser("census", help="brute-force fixed-point census vs formula")
    p.add_argument("--n", type=_positive_int, required=True,
                   help=f"permutation size, at most {CENSUS_MAX_N}")

    return parser


def _cmd_exact(args: argparse.Namespace) -> int:
    allow_big_int_strings()  # exact rationals can have factorial-sized parts
    m = args.m
    if args.kind == "limit":
        value = exact.fixed_point_prob_limit(m)
        payload = {"kind": "limit", "m": m, "value": float(f"{value:.6g}")}
        text = f"{value:.6g}"
    else:
        if args.n is None:
            raise ValueError(f"--n is required for --kind {args.kind}")
        fn = {
            "point": exact.fixed_point_prob,
            "cumulative": exact.cumulative_prob,
            "tail": exact.tail_prob,
        }[args.kind]
        prob: Fraction = fn(args.n, m)
        rational = f"{prob.numerator}/{prob.denominator}"
        value = float(prob)
        payload = {
            "kind": args.kind,
            "n": args.n,
            "m": m,
            "rational": rational,
            "value": float(f"{value:.6g}"),
        }
        text = f"{rational} = {value:.6g}"
        if args.kind == "point":
            limit = exact.fixed_point_prob_limit(m)
            payload["limit"] = float(f"{limit:.6g}")
            text += f" (limit {limit:.6g})"
        elif args.kind == "tail":
            limit = exact.tail_prob_limit(m)
            payload["limit"] = float(f"{limit:.6g}")
            text += f" (limit {limit:.6g})"
    if args.format == "json":
        print(json.dumps(payload))
    else:
        print(text)
    return 0


def _cmd_sample(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    report = compare_exact_empirical(args.n, args.samples, master_seed=seed, max_m=args.max_m)
    with _open_out(args.out) as out:
        report.write(out, args.format)
    return 0


def _cmd_sa(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    template = AnnealTemplate(
        steps=args.steps,
        epoch_length=args.epoch,
        cooling_factor=args.cooling,
        initial_temperature=args.t0,
        operator=args.operator,
        objective=args.objective,
        trace=True,
    )
    pair = generate_pair(args.n, args.edge_prob, args.relabel, seed=mix64(seed, 1))
    config = template.materialize(args.n, seed=mix64(seed, 2))
    result = anneal(pair, config)
    if args.trace_out is not None:
        with open(args.trace_out, "w", encoding="utf-8") as handle:
            handle.write(trace_to_csv(result.trace))
    if args.format == "json":
        print(json.dumps({
            "n": args.n,
            "objective": args.objective,
            "operator": args.operator,
            "steps": config.steps,
            "best_objective": result.best_objective,
            "fixed_points": result.final_fixed_points,
            "precision": result.final_fixed_points / args.n,
            "accepted": result.accepted_count,
            "improved": result.improved_count,
            "initial_temperature": result.initial_temperature,
            "seed": seed,
        }))
    else:
        print(f"n={args.n} objective={args.objective} operator={args.operator} "
              f"steps={config.steps} t0={result.initial_temperature:.6g}")
        print(f"best objective      {result.best_objective:.6g}")
        print(f"correct matches     {result.final_fixed_points} / {args.n}")
        print(f"accepted / improved {result.accepted_count} / {result.improved_count}")
    return 0


def _cmd_table1(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    report = run_table1(
        n_values=args.n_list,
        samples=args.samples,
        threshold=args.threshold,
        master_seed=seed,
        workers=args.workers,
        progress=_progress_printer(),
    )
    with _open_out(args.out) as out:
        report.write(out, args.format)
    print(f"table1 done in {report.metadata['duration_seconds']:.1f}s", file=sys.stderr)
    return 0


def _cmd_table2(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    template = AnnealTemplate(
        steps=args.steps,
        epoch_length=args.epoch,
        cooling_factor=args.cooling,
        initial_temperature=args.t0,
        operator=args.operator,
        objective=args.objective,
    )
    report = run_table2(
        n_values=args.n_list,
        runs=args.runs,
        template=template,
        threshold=args.threshold,
        edge_probability=args.edge_prob,
        relabel=args.relabel,
        master_seed=seed,
        workers=args.workers,
        progress=_progress_printer(),
    )
    with _open_out(args.out) as out:
        report.write(out, args.format)
    print(f"table2 done in {report.metadata['duration_seconds']:.1f}s", file=sys.stderr)
    return 0


def _cmd_census(args: argparse.Namespace) -> int:
    from .exact import rencontres

    counts = exhaustive_fixed_point_census(args.n)
    print("m,exhaustive,formula")
    mismatched = False
    for m, count in enumerate(counts):
        expected = rencontres(args.n, m)
        print(f"{m},{count},{expected}")
        if count != expected:
            mismatched = True
    if mismatched:
        print("census mismatch: enumeration disagrees with formula", file=sys.stderr)
        return 1
    return 0


_COMMANDS = {
    "exact": _cmd_exact,
    "sample": _cmd_sample,
    "sa": _cmd_sa,
    "table1": _cmd_table1,
    "table2": _cmd_table2,
    "census": _cmd_census,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"samatch: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"samatch: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
