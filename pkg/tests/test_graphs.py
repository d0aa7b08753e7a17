"""Graph-pair generation, the two objectives, the O(n) swap delta, and
the text serialization."""

import io
import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from samatch.graphs import (
    GraphPair,
    generate_pair,
    oracle_energy,
    pair_from_text,
    pair_to_text,
    read_pair,
    structural_energy,
    structural_energy_delta_swap,
    write_pair,
)
from samatch.permutations import identity_permutation, random_permutation


def test_generated_pair_satisfies_invariants():
    for seed in (0, 1, 99):
        pair = generate_pair(30, 0.4, seed=seed)
        pair.validate()  # symmetry, zero diagonal, exact isomorphism
        assert pair.ground_truth == identity_permutation(30)
        assert structural_energy(pair, pair.ground_truth) == 0


def test_random_relabel_mode():
    pair = generate_pair(25, 0.5, relabel="random", seed=5)
    pair.validate()
    assert structural_energy(pair, pair.ground_truth) == 0


def test_relabel_modes_share_first_graph():
    a = generate_pair(40, 0.5, relabel="identity", seed=1234)
    b = generate_pair(40, 0.5, relabel="random", seed=1234)
    assert np.array_equal(a.adjacency_1, b.adjacency_1)
    assert a.ground_truth != b.ground_truth or a.adjacency_2 is not b.adjacency_2


def test_generation_is_deterministic():
    a = generate_pair(20, 0.3, seed=77)
    b = generate_pair(20, 0.3, seed=77)
    assert np.array_equal(a.adjacency_1, b.adjacency_1)
    assert np.array_equal(a.adjacency_2, b.adjacency_2)
    assert a.ground_truth == b.ground_truth


def test_edge_count_matches_binomial_statistics():
    n = 100
    pairs_possible = n * (n - 1) // 2
    sigma = math.sqrt(pairs_possible * 0.25)
    for seed in range(5):
        pair = generate_pair(n, 0.5, seed=seed)
        edges = int(pair.adjacency_1.sum()) // 2
        assert abs(edges - pairs_possible / 2) < 4 * sigma


def test_generate_rejects_bad_arguments():
    with pytest.raises(ValueError):
        generate_pair(1, 0.5)
    for p in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            generate_pair(10, p)
    with pytest.raises(ValueError):
        generate_pair(10, 0.5, relabel="shuffled")


def _path_graph_pair():
    # 1-2-3 path, identity truth
    a = np.zeros((3, 3), dtype=np.uint8)
    a[0, 1] = a[1, 0] = 1
    a[1, 2] = a[2, 1] = 1
    return GraphPair(
        n=3,
        edge_probability=0.5,
        ground_truth=(1, 2, 3),
        adjacency_1=a,
        adjacency_2=a.copy(),
    )


def test_structural_energy_path_graph_example():
    pair = _path_graph_pair()
    assert structural_energy(pair, (1, 2, 3)) == 0
    assert structural_energy(pair, (2, 1, 3)) == 2


def test_structural_energy_upper_bound():
    rng = random.Random(8)
    pair = generate_pair(15, 0.5, seed=3)
    bound = 15 * 14 // 2
    for _ in range(50):
        p = random_permutation(15, rng)
        assert 0 <= structural_energy(pair, p) <= bound


def test_structural_energy_rejects_size_mismatch():
    pair = generate_pair(6, 0.5, seed=0)
    with pytest.raises(ValueError):
        structural_energy(pair, (1, 2, 3))


def test_delta_swap_agrees_with_recompute():
    rng = random.Random(99)
    for n in (10, 30):
        pair = generate_pair(n, 0.5, seed=n)
        for _ in range(300):
            p = random_permutation(n, rng)
            i, j = rng.sample(range(1, n + 1), 2)
            swapped = list(p)
            swapped[i - 1], swapped[j - 1] = swapped[j - 1], swapped[i - 1]
            expected = structural_energy(pair, tuple(swapped)) - structural_energy(pair, p)
            assert structural_energy_delta_swap(pair, p, i, j) == expected


def test_delta_swap_antisymmetry_and_ground_truth_minimum():
    rng = random.Random(4)
    pair = generate_pair(20, 0.5, seed=11)
    truth = pair.ground_truth
    for _ in range(100):
        p = random_permutation(20, rng)
        i, j = rng.sample(range(1, 21), 2)
        forward = structural_energy_delta_swap(pair, p, i, j)
        swapped = list(p)
        swapped[i - 1], swapped[j - 1] = swapped[j - 1], swapped[i - 1]
        back = structural_energy_delta_swap(pair, tuple(swapped), i, j)
        assert forward + back == 0
        assert structural_energy_delta_swap(pair, truth, i, j) >= 0


def test_delta_swap_rejects_equal_positions():
    pair = generate_pair(5, 0.5, seed=0)
    with pytest.raises(ValueError):
        structural_energy_delta_swap(pair, pair.ground_truth, 2, 2)


def _relabel_pair_and_candidate(pair, p, sigma):
    """Relabel the first graph's vertices by sigma (1-based), remapping the
    truth and the candidate accordingly."""
    n = pair.n
    s0 = [v - 1 for v in sigma]
    a1 = np.zeros_like(pair.adjacency_1)
    a1[np.ix_(s0, s0)] = pair.adjacency_1
    gt = [0] * n
    pp = [0] * n
    for i in range(n):
        gt[s0[i]] = pair.ground_truth[i]
        pp[s0[i]] = p[i]
    relabeled = GraphPair(
        n=n,
        edge_probability=pair.edge_probability,
        ground_truth=tuple(gt),
        adjacency_1=a1,
        adjacency_2=pair.adjacency_2,
    )
    relabeled.validate()
    return relabeled, tuple(pp)


def test_structural_energy_invariant_under_joint_relabeling():
    rng = random.Random(21)
    for n in (4, 5, 6):
        pair = generate_pair(n, 0.5, seed=n + 1)
        p = random_permutation(n, rng)
        base = structural_energy(pair, p)
        for sigma in itertools.permutations(range(1, n + 1)):
            relabeled, moved = _relabel_pair_and_candidate(pair, p, sigma)
            assert structural_energy(relabeled, moved) == base


def test_oracle_energy_examples():
    pair = generate_pair(5, 0.5, seed=2)
    assert oracle_energy(pair, pair.ground_truth) == 0
    assert oracle_energy(pair, (3, 2, 1, 4, 5)) == Fraction(2, 5)
    assert oracle_energy(pair, (2, 3, 4, 5, 1)) == 1


def test_serialization_round_trip():
    for mode in ("identity", "random"):
        pair = generate_pair(12, 0.35, relabel=mode, seed=6)
        clone = pair_from_text(pair_to_text(pair))
        assert clone.n == pair.n
        assert clone.edge_probability == pair.edge_probability
        assert clone.seed == pair.seed
        assert clone.relabel_mode == pair.relabel_mode
        assert clone.ground_truth == pair.ground_truth
        assert np.array_equal(clone.adjacency_1, pair.adjacency_1)
        assert np.array_equal(clone.adjacency_2, pair.adjacency_2)


def test_serialization_uses_documented_layout():
    pair = generate_pair(4, 0.5, seed=9)
    text = pair_to_text(pair)
    lines = text.splitlines()
    assert lines[0] == "4 0.5 9 identity"
    assert len(lines) == 1 + 4 + 4 + 1
    assert lines[-1] == "1,2,3,4"
    buf = io.StringIO()
    write_pair(pair, buf)
    buf.seek(0)
    assert read_pair(buf).ground_truth == pair.ground_truth


def test_read_pair_rejects_corrupted_input():
    pair = generate_pair(4, 0.5, seed=9)
    text = pair_to_text(pair)
    with pytest.raises(ValueError):
        pair_from_text(text.replace("4 0.5", "4x 0.5", 1))
    mangled = text.splitlines()
    mangled[1] = "01"
    with pytest.raises(ValueError):
        pair_from_text("\n".join(mangled))
