"""samatch: exact fixed-point statistics of random permutations and
simulated-annealing graph matching benchmarks."""

__version__ = "0.1.0"

from .annealing import (
    AnnealConfig,
    AnnealResult,
    AnnealTemplate,
    TracePoint,
    anneal,
    calibrate_initial_temperature,
)
from .exact import (
    cumulative_prob,
    derangement_recurrence,
    derangement_sum,
    fixed_point_prob,
    fixed_point_prob_limit,
    rencontres,
    tail_prob,
    tail_prob_limit,
)
from .experiments import (
    ExperimentReport,
    compare_exact_empirical,
    run_table1,
    run_table2,
)
from .graphs import (
    GraphPair,
    generate_pair,
    oracle_energy,
    read_pair,
    structural_energy,
    structural_energy_delta_swap,
    write_pair,
)
from .permutations import (
    Permutation,
    count_fixed_points,
    energy,
    exhaustive_fixed_point_census,
    identity_permutation,
    precision,
    random_permutation,
)

__all__ = [
    "AnnealConfig",
    "AnnealResult",
    "AnnealTemplate",
    "ExperimentReport",
    "GraphPair",
    "Permutation",
    "TracePoint",
    "anneal",
    "calibrate_initial_temperature",
    "compare_exact_empirical",
    "count_fixed_points",
    "cumulative_prob",
    "derangement_recurrence",
    "derangement_sum",
    "energy",
    "exhaustive_fixed_point_census",
    "fixed_point_prob",
    "fixed_point_prob_limit",
    "generate_pair",
    "identity_permutation",
    "oracle_energy",
    "precision",
    "random_permutation",
    "read_pair",
    "rencontres",
    "run_table1",
    "run_table2",
    "structural_energy",
    "structural_energy_delta_swap",
    "tail_prob",
    "tail_prob_limit",
    "write_pair",
]
