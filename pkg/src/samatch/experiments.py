"""Replication harnesses: random-permutation census and annealing success
rates, with exact-theory comparison statistics.

Every row is reproducible from (inputs, master_seed) alone: the seed for
each unit of work is mix64(master_seed, experiment id, n, run index), so
results are independent of worker count and completion order.  Reports
serialize to CSV (rows only, fixed column order) and JSON (rows plus
metadata); both print floats with 6 significant digits.  Wall-clock
duration is kept on the in-memory report but excluded from serialized
output so that reruns are byte-identical.
"""

from __future__ import annotations

import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, TextIO

import numpy as np

from . import __version__, _kernels
from .annealing import AnnealTemplate, anneal
from .exact import fixed_point_prob, tail_prob
from .graphs import RELABEL_MODES, generate_pair
from .rng import mix64

EXPERIMENT_TABLE1 = 1
EXPERIMENT_TABLE2 = 2
EXPERIMENT_COMPARE = 3

DEFAULT_MASTER_SEED = 1729
DEFAULT_SAMPLES = 100_000
DEFAULT_THRESHOLD = 3
TABLE1_DEFAULT_N = (20, 50, 100, 300, 500, 1000, 10000)
TABLE2_DEFAULT_N = (20, 50, 100, 300, 500, 1000)

GENERATOR_ID = "splitmix64-fisher-yates; graphs pcg64"

Progress = Callable[[str], None] | None


def default_runs(n: int) -> int:
    """Annealing run count per instance size: heavy sampling where runs are
    cheap, lighter where each run costs O(100 n^2)."""
    if n <= 100:
        return 1000
    if n <= 1000:
        return 200
    return 50


def count_trend_inversions(values: Sequence[float]) -> int:
    """Number of adjacent strict increases in a supposedly non-increasing row."""
    return sum(1 for prev, cur in zip(values, values[1:]) if cur > prev)


def allow_big_int_strings() -> None:
    """Lift the int-to-str digit cap: exact tails at n = 10000 have
    factorial-sized denominators, far past the CPython default of 4300."""
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _round6(x: float) -> float:
    return float(_fmt(x))


@dataclass(frozen=True)
class Table1Row:
    n: int
    samples: int
    threshold: int
    count: int
    fraction: float
    exact_tail: Fraction
    z_score: float
    master_seed: int

    CSV_HEADER = "n,samples,threshold,count,fraction,exact_tail,z_score,master_seed"

    def csv_line(self) -> str:
        return (
            f"{self.n},{self.samples},{self.threshold},{self.count},"
            f"{_fmt(self.fraction)},{_fmt(float(self.exact_tail))},"
            f"{_fmt(self.z_score)},{self.master_seed}"
        )

    def json_obj(self) -> dict:
        return {
            "n": self.n,
            "samples": self.samples,
            "threshold": self.threshold,
            "count": self.count,
            "fraction": _round6(self.fraction),
            "fraction_exact": f"{self.count}/{self.samples}",
            "exact_tail": _round6(float(self.exact_tail)),
            "exact_tail_exact": f"{self.exact_tail.numerator}/{self.exact_tail.denominator}",
            "z_score": _round6(self.z_score),
            "master_seed": self.master_seed,
        }


@dataclass(frozen=True)
class Table2Row:
    n: int
    runs: int
    threshold: int
    success_count: int
    success_fraction: float
    objective: str
    operator: str
    steps: int
    epoch_length: int
    cooling_factor: float
    t0_mode: str
    edge_prob: float
    master_seed: int

    CSV_HEADER = (
        "n,runs,threshold,success_count,success_fraction,objective,operator,"
        "steps,epoch_length,cooling_factor,t0_mode,edge_prob,master_seed"
    )

    def csv_line(self) -> str:
        return (
            f"{self.n},{self.runs},{self.threshold},{self.success_count},"
            f"{_fmt(self.success_fraction)},{self.objective},{self.operator},"
            f"{self.steps},{self.epoch_length},{_fmt(self.cooling_factor)},"
            f"{self.t0_mode},{_fmt(self.edge_prob)},{self.master_seed}"
        )

    def json_obj(self) -> dict:
        return {
            "n": self.n,
            "runs": self.runs,
            "threshold": self.threshold,
            "success_count": self.success_count,
            "success_fraction": _round6(self.success_fraction),
            "success_fraction_exact": f"{self.success_count}/{self.runs}",
            "objective": self.objective,
            "operator": self.operator,
            "steps": self.steps,
            "epoch_length": self.epoch_length,
            "cooling_factor": _round6(self.cooling_factor),
            "t0_mode": self.t0_mode,
            "edge_prob": _round6(self.edge_prob),
            "master_seed": self.master_seed,
        }


@dataclass(frozen=True)
class CompareRow:
    m: int
    count: int
    empirical: float
    exact: Fraction
    z_score: float

    CSV_HEADER = "m,count,empirical,exact,z_score"

    def csv_line(self) -> str:
        return (
            f"{self.m},{self.count},{_fmt(self.empirical)},"
            f"{_fmt(float(self.exact))},{_fmt(self.z_score)}"
        )

    def json_obj(self) -> dict:
        return {
            "m": self.m,
            "count": self.count,
            "empirical": _round6(self.empirical),
            "exact": _round6(float(self.exact)),
            "exact_exact": f"{self.exact.numerator}/{self.exact.denominator}",
            "z_score": _round6(self.z_score),
        }


@dataclass
class ExperimentReport:
    rows: list
    metadata: dict = field(default_factory=dict)

    def csv_header(self) -> str:
        return type(self.rows[0]).CSV_HEADER

    def to_csv(self) -> str:
        lines = [self.csv_header()]
        lines.extend(row.csv_line() for row in self.rows)
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        allow_big_int_strings()
        meta = {k: v for k, v in self.metadata.items() if k != "duration_seconds"}
        doc = {"metadata": meta, "rows": [row.json_obj() for row in self.rows]}
        return json.dumps(doc, indent=2) + "\n"

    def write(self, out: TextIO, fmt: str = "csv") -> None:
        if fmt == "csv":
            out.write(self.to_csv())
        elif fmt == "json":
            out.write(self.to_json())
        else:
            raise ValueError(f"unknown format {fmt!r}")


_warmed_up = False


def _warm_kernels() -> None:
    """Compile (or load cached) kernels before any thread fan-out."""
    global _warmed_up
    if _warmed_up:
        return
    pair = generate_pair(4, 0.5, seed=0)
    gt0 = pair.ground_truth_0based()
    for op in (_kernels.OP_SWAP, _kernels.OP_INSERTION, _kernels.OP_INVERSION, _kernels.OP_SCRAMBLE):
        _kernels.anneal_structural(
            pair.adjacency_1, pair.adjacency_2, op, 8, 4, 1.0, 0.5, np.uint64(1)
        )
        _kernels.anneal_oracle(gt0, op, 8, 4, 1.0, 0.5, np.uint64(1))
        _kernels.sample_uphill_structural(pair.adjacency_1, pair.adjacency_2, op, 4, np.uint64(1))
        _kernels.sample_uphill_oracle(gt0, op, 4, np.uint64(1))
    _kernels.count_fixed_over(4, 4, 1, np.uint64(1))
    _kernels.fixed_point_histogram(4, 4, np.uint64(1))
    _warmed_up = True


def _fan_out(tasks, worker, workers: int):
    """Run worker over tasks, preserving task order in the result list."""
    if workers <= 1:
        return [worker(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, tasks))


def run_table1(
    n_values: Sequence[int] = TABLE1_DEFAULT_N,
    samples: int = DEFAULT_SAMPLES,
    threshold: int = DEFAULT_THRESHOLD,
    master_seed: int = DEFAULT_MASTER_SEED,
    workers: int = 1,
    progress: Progress = None,
) -> ExperimentReport:
    """For each n, draw `samples` uniform permutations and count those with
    strictly more than `threshold` fixed points; compare with the exact tail."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    n_values = sorted(n_values)
    for n in n_values:
        if threshold >= n:
            raise ValueError(f"threshold {threshold} must be < n for row n={n}")
    _warm_kernels()
    started = time.monotonic()

    def row_for(n: int) -> Table1Row:
        seed = mix64(master_seed, EXPERIMENT_TABLE1, n, 0)
        count = int(_kernels.count_fixed_over(n, samples, threshold, np.uint64(seed)))
        exact = tail_prob(n, threshold)
        p = float(exact)
        sigma = math.sqrt(p * (1.0 - p) / samples)
        fraction = count / samples
        z = (fraction - p) / sigma if sigma > 0 else 0.0
        if progress is not None:
            progress(f"table1 n={n}: count={count} fraction={fraction:.4f}")
        return Table1Row(
            n=n,
            samples=samples,
            threshold=threshold,
            count=count,
            fraction=fraction,
            exact_tail=exact,
            z_score=z,
            master_seed=master_seed,
        )

    rows = _fan_out(n_values, row_for, workers)
    return ExperimentReport(
        rows=rows,
        metadata={
            "experiment": "table1",
            "master_seed": master_seed,
            "generator": GENERATOR_ID,
            "artifact_version": __version__,
            "samples": samples,
            "threshold": threshold,
            "n_values": list(n_values),
            "duration_seconds": time.monotonic() - started,
        },
    )


def run_table2(
    n_values: Sequence[int] = TABLE2_DEFAULT_N,
    runs: int | None = None,
    template: AnnealTemplate = AnnealTemplate(),
    threshold: int = DEFAULT_THRESHOLD,
    edge_probability: float = 0.5,
    relabel: str = "identity",
    master_seed: int = DEFAULT_MASTER_SEED,
    workers: int = 1,
    progress: Progress = None,
) -> ExperimentReport:
    """For each n, anneal `runs` independent random graph pairs and count
    runs whose best permutation exceeds `threshold` correct matches.

    runs=None picks default_runs(n) per size.  Every hyperparameter is
    echoed in the row so the table is self-describing.
    """
    if runs is not None and runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    if not 0.0 < edge_probability < 1.0:
        raise ValueError(f"edge probability must be in (0,1), got {edge_probability}")
    if relabel not in RELABEL_MODES:
        raise ValueError(f"relabel must be one of {RELABEL_MODES}, got {relabel!r}")
    n_values = sorted(n_values)
    for n in n_values:
        if threshold >= n:
            raise ValueError(f"threshold {threshold} must be < n for row n={n}")
    # materialize once per n to surface config errors before any work
    for n in n_values:
        template.materialize(n, 0)
    _warm_kernels()
    started = time.monotonic()

    t0 = template.initial_temperature
    t0_mode = t0 if isinstance(t0, str) else _fmt(float(t0))

    def run_one(task: tuple[int, int]) -> tuple[int, bool]:
        n, r = task
        run_seed = mix64(master_seed, EXPERIMENT_TABLE2, n, r)
        pair = generate_pair(n, edge_probability, relabel, seed=mix64(run_seed, 1))
        config = template.materialize(n, seed=mix64(run_seed, 2))
        result = anneal(pair, config)
        if progress is not None:
            progress(
                f"table2 n={n} run={r}: best={result.best_objective:.6g} "
                f"fixed={result.final_fixed_points}"
            )
        return n, result.final_fixed_points > threshold

    tasks = [(n, r) for n in n_values for r in range(runs if runs is not None else default_runs(n))]
    outcomes = _fan_out(tasks, run_one, workers)

    rows = []
    for n in n_values:
        n_runs = runs if runs is not None else default_runs(n)
        successes = sum(1 for m, ok in outcomes if m == n and ok)
        config = template.materialize(n, 0)
        rows.append(
            Table2Row(
                n=n,
                runs=n_runs,
                threshold=threshold,
                success_count=successes,
                success_fraction=successes / n_runs,
                objective=config.objective,
                operator=config.operator,
                steps=config.steps,
                epoch_length=config.epoch_length,
                cooling_factor=config.cooling_factor,
                t0_mode=t0_mode,
                edge_prob=edge_probability,
                master_seed=master_seed,
            )
        )
    return ExperimentReport(
        rows=rows,
        metadata={
            "experiment": "table2",
            "master_seed": master_seed,
            "generator": GENERATOR_ID,
            "artifact_version": __version__,
            "threshold": threshold,
            "edge_probability": edge_probability,
            "relabel": relabel,
            "runs": runs,
            "n_values": list(n_values),
            "operator": template.operator,
            "objective": template.objective,
            "cooling_factor": template.cooling_factor,
            "t0_mode": t0_mode,
            "duration_seconds": time.monotonic() - started,
        },
    )


def compare_exact_empirical(
    n: int,
    samples: int = DEFAULT_SAMPLES,
    master_seed: int = DEFAULT_MASTER_SEED,
    max_m: int = 10,
) -> ExperimentReport:
    """Empirical fixed-point histogram against the exact distribution,
    with a z-score per bin, for m = 0..min(n, max_m)."""
    if not 1 <= n <= 10_000:
        raise ValueError(f"n must be in 1..10000, got {n}")
    if samples < 1_000:
        raise ValueError(f"samples must be >= 1000, got {samples}")
    _warm_kernels()
    started = time.monotonic()
    seed = mix64(master_seed, EXPERIMENT_COMPARE, n, 0)
    hist = _kernels.fixed_point_histogram(n, samples, np.uint64(seed))
    rows = []
    for m in range(min(n, max_m) + 1):
        exact = fixed_point_prob(n, m)
        p = float(exact)
        sigma = math.sqrt(p * (1.0 - p) / samples)
        count = int(hist[m])
        empirical = count / samples
        z = (empirical - p) / sigma if sigma > 0 else 0.0
        rows.append(CompareRow(m=m, count=count, empirical=empirical, exact=exact, z_score=z))
    return ExperimentReport(
        rows=rows,
        metadata={
            "experiment": "compare",
            "master_seed": master_seed,
            "generator": GENERATOR_ID,
            "artifact_version": __version__,
            "n": n,
            "samples": samples,
            "duration_seconds": time.monotonic() - started,
        },
    )
