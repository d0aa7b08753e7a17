"""Simulated annealing over permutations for graph matching.

The chain starts from a uniform random permutation and proposes neighbor
moves with one of the four operators.  Moves that do not increase the
objective are always accepted; uphill moves are accepted with probability
exp(-delta / T) under a geometric cooling schedule (T is multiplied by
cooling_factor after every epoch of proposals).

Defaults, recorded in every experiment report: operator=swap,
steps=100*n, epoch_length=n, cooling_factor=0.95, initial temperature
auto-calibrated to accept 80% of uphill moves from random states,
objective=structural.  Deltas for the structural objective are raw
mismatch counts; the oracle objective works in normalized units
(misplaced/n), matching the value it reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .graphs import GraphPair
from .permutations import Permutation
from .rng import MASK64, mix64

OPERATORS = ("swap", "insertion", "inversion", "scramble")
OBJECTIVES = ("structural", "oracle")

_OP_CODES = {
    "swap": _kernels.OP_SWAP,
    "insertion": _kernels.OP_INSERTION,
    "inversion": _kernels.OP_INVERSION,
    "scramble": _kernels.OP_SCRAMBLE,
}

# sub-stream tags so the chain and the calibrator never share draws
_STREAM_RUN = 0
_STREAM_CALIBRATION = 1

T0_AUTO = "auto"


class TracePoint(NamedTuple):
    step: int
    temperature: float
    current_objective: float
    best_objective: float


@dataclass(frozen=True)
class AnnealConfig:
    """Fully resolved hyperparameters of one annealing run."""

    steps: int
    epoch_length: int
    cooling_factor: float = 0.95
    initial_temperature: float | str = T0_AUTO
    operator: str = "swap"
    objective: str = "structural"
    seed: int = 0
    t0_target_acceptance: float = 0.8
    t0_samples: int = 200
    trace: bool = False

    def validate(self) -> None:
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.epoch_length < 1:
            raise ValueError(f"epoch_length must be >= 1, got {self.epoch_length}")
        if not 0.0 < self.cooling_factor < 1.0:
            raise ValueError(f"cooling_factor must be in (0,1), got {self.cooling_factor}")
        t0 = self.initial_temperature
        if isinstance(t0, str):
            if t0 != T0_AUTO:
                raise ValueError(f"initial_temperature must be a number or 'auto', got {t0!r}")
        elif not (isinstance(t0, (int, float)) and t0 >= 0.0):
            raise ValueError(f"initial_temperature must be >= 0, got {t0!r}")
        if self.operator not in OPERATORS:
            raise ValueError(f"operator must be one of {OPERATORS}, got {self.operator!r}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not 0.0 < self.t0_target_acceptance < 1.0:
            raise ValueError(
                f"t0_target_acceptance must be in (0,1), got {self.t0_target_acceptance}"
            )
        if self.t0_samples < 1:
            raise ValueError(f"t0_samples must be >= 1, got {self.t0_samples}")


@dataclass(frozen=True)
class AnnealTemplate:
    """Partial configuration; None fields scale with the instance size.

    materialize(n, seed) yields a concrete AnnealConfig with steps=100*n
    unless given explicitly, and epoch_length=steps//100 (one hundred
    temperature levels per run; equals n at the default budget).
    """

    steps: int | None = None
    epoch_length: int | None = None
    cooling_factor: float = 0.95
    initial_temperature: float | str = T0_AUTO
    operator: str = "swap"
    objective: str = "structural"
    t0_target_acceptance: float = 0.8
    t0_samples: int = 200
    trace: bool = False

    def materialize(self, n: int, seed: int) -> AnnealConfig:
        steps = self.steps if self.steps is not None else 100 * n
        config = AnnealConfig(
            steps=steps,
            epoch_length=self.epoch_length if self.epoch_length is not None else max(1, steps // 100),
            cooling_factor=self.cooling_factor,
            initial_temperature=self.initial_temperature,
            operator=self.operator,
            objective=self.objective,
            seed=seed,
            t0_target_acceptance=self.t0_target_acceptance,
            t0_samples=self.t0_samples,
            trace=self.trace,
        )
        config.validate()
        return config


@dataclass(frozen=True)
class AnnealResult:
    """Outcome of one annealing run.

    best_permutation is the lowest-objective state ever visited;
    improved_count counts accepted proposals that strictly lowered the
    current objective, accepted_count all accepted proposals.
    """

    best_permutation: Permutation
    best_objective: float
    final_fixed_points: int
    accepted_count: int
    improved_count: int
    initial_temperature: float
    trace: tuple[TracePoint, ...] | None = None


def calibrate_initial_temperature(
    pair: GraphPair,
    operator: str = "swap",
    objective: str = "structural",
    target_acceptance: float = 0.8,
    samples: int = 200,
    seed: int = 0,
) -> float:
    """Find T0 such that uphill moves from random states are accepted at
    roughly the target rate.

    Samples random (state, move) deltas, keeps the uphill ones, and
    bisects T until mean(exp(-delta/T)) hits target_acceptance to a
    relative tolerance of 1e-3.  If no uphill move shows up in `samples`
    draws the landscape is degenerate and the fallback T0 = 1.0 is
    returned.
    """
    if not 0.0 < target_acceptance < 1.0:
        raise ValueError(f"target_acceptance must be in (0,1), got {target_acceptance}")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if operator not in OPERATORS:
        raise ValueError(f"operator must be one of {OPERATORS}, got {operator!r}")
    op = _OP_CODES[operator]
    kseed = np.uint64(seed & MASK64)
    if objective == "structural":
        deltas = _kernels.sample_uphill_structural(
            pair.adjacency_1, pair.adjacency_2, op, samples, kseed
        )
    elif objective == "oracle":
        deltas = _kernels.sample_uphill_oracle(pair.ground_truth_0based(), op, samples, kseed)
    else:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")

    if deltas.size == 0:
        return 1.0

    def acceptance(t: float) -> float:
        return float(np.mean(np.exp(-deltas / t)))

    lo = 1e-12
    hi = 1.0
    while acceptance(hi) < target_acceptance:
        hi *= 2.0
        if hi > 1e18:
            break
    while (hi - lo) > 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        if acceptance(mid) < target_acceptance:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _resolve_t0(pair: GraphPair, config: AnnealConfig) -> float:
    t0 = config.initial_temperature
    if t0 == T0_AUTO:
        return calibrate_initial_temperature(
            pair,
            operator=config.operator,
            objective=config.objective,
            target_acceptance=config.t0_target_acceptance,
            samples=config.t0_samples,
            seed=mix64(config.seed, _STREAM_CALIBRATION),
        )
    return float(t0)


def anneal(pair: GraphPair, config: AnnealConfig) -> AnnealResult:
    """Run one annealing chain on the pair; deterministic in (pair, config)."""
    config.validate()
    if pair.n < 2:
        raise ValueError(f"pair must have n >= 2, got {pair.n}")

    t0 = _resolve_t0(pair, config)
    run_seed = np.uint64(mix64(config.seed, _STREAM_RUN))
    op = _OP_CODES[config.operator]

    if config.objective == "structural":
        out = _kernels.anneal_structural(
            pair.adjacency_1,
            pair.adjacency_2,
            op,
            config.steps,
            config.epoch_length,
            t0,
            config.cooling_factor,
            run_seed,
        )
        scale = 1.0
    else:
        out = _kernels.anneal_oracle(
            pair.ground_truth_0based(),
            op,
            config.steps,
            config.epoch_length,
            t0,
            config.cooling_factor,
            run_seed,
        )
        scale = 1.0 / pair.n

    best_p0, best_val, _final_val, accepted, improved, t_step, t_temp, t_cur, t_best = out

    trace = None
    if config.trace:
        trace = tuple(
            TracePoint(int(st), float(tt), float(tc), float(tb))
            for st, tt, tc, tb in zip(t_step, t_temp, t_cur, t_best)
        )

    gt0 = pair.ground_truth_0based()
    fixed = int(np.count_nonzero(best_p0 == gt0))

    return AnnealResult(
        best_permutation=tuple(int(v) + 1 for v in best_p0),
        best_objective=float(best_val) * scale,
        final_fixed_points=fixed,
        accepted_count=int(accepted),
        improved_count=int(improved),
        initial_temperature=t0,
        trace=trace,
    )


def trace_to_csv(trace: tuple[TracePoint, ...]) -> str:
    """Render a trace in the 'step,temperature,current,best' schema."""
    lines = ["step,temperature,current,best"]
    for pt in trace:
        lines.append(
            f"{pt.step},{pt.temperature:.6g},{pt.current_objective:.6g},{pt.best_objective:.6g}"
        )
    return "\n".join(lines) + "\n"
