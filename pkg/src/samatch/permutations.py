"""Permutations as immutable 1-based tuples, with sampling, match metrics
and the four neighborhood moves used by the annealer.

A permutation of size n is a tuple holding each of 1..n exactly once;
position i (1-based) holds the vertex matched to i.  All public positions
and values are 1-based.  Moves return new tuples and never mutate input.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

Permutation = tuple[int, ...]

# 10! = 3 628 800 is the largest census enumerable at desk scale
CENSUS_MAX_N = 10


def identity_permutation(n: int) -> Permutation:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return tuple(range(1, n + 1))


def validate_permutation(p: Permutation) -> None:
    """Raise ValueError unless p is a bijection on {1..len(p)}."""
    n = len(p)
    if n < 1:
        raise ValueError("permutation must be non-empty")
    seen = [False] * (n + 1)
    for v in p:
        if not isinstance(v, int) or v < 1 or v > n or seen[v]:
            raise ValueError(f"not a permutation of 1..{n}: {p!r}")
        seen[v] = True


def random_permutation(n: int, rng: random.Random) -> Permutation:
    """Uniform permutation of 1..n from an unbiased Fisher-Yates shuffle.

    ``random.Random.shuffle`` draws bounded integers by rejection on
    getrandbits, never through float indices, so every one of the n!
    outcomes has equal probability under an ideal bit source.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    vals = list(range(1, n + 1))
    rng.shuffle(vals)
    return tuple(vals)


def _check_same_size(p: Permutation, truth: Permutation) -> None:
    if len(p) != len(truth):
        raise ValueError(f"size mismatch: {len(p)} vs {len(truth)}")


def count_fixed_points(p: Permutation, truth: Permutation) -> int:
    """Number of positions where p agrees with truth (correct matches)."""
    _check_same_size(p, truth)
    return sum(a == b for a, b in zip(p, truth))


def energy(p: Permutation, truth: Permutation) -> Fraction:
    """Fraction of positions NOT matching truth, in [0, 1] exactly."""
    n = len(p)
    return Fraction(n - count_fixed_points(p, truth), n)


def precision(p: Permutation, truth: Permutation) -> Fraction:
    """1 - energy: the fraction of correct matches."""
    return 1 - energy(p, truth)


def _check_position(n: int, i: int, name: str = "position") -> None:
    if i < 1 or i > n:
        raise ValueError(f"{name} {i} out of range 1..{n}")


def swap_positions(p: Permutation, i: int, j: int) -> Permutation:
    """Exchange the entries at (1-based) positions i and j."""
    n = len(p)
    _check_position(n, i)
    _check_position(n, j)
    if i == j:
        raise ValueError("swap positions must be distinct")
    out = list(p)
    out[i - 1], out[j - 1] = out[j - 1], out[i - 1]
    return tuple(out)


def insert_position(p: Permutation, src: int, dst: int) -> Permutation:
    """Remove the entry at position src and reinsert it at position dst."""
    n = len(p)
    _check_position(n, src, "source")
    _check_position(n, dst, "destination")
    if src == dst:
        raise ValueError("insertion positions must be distinct")
    out = list(p)
    val = out.pop(src - 1)
    out.insert(dst - 1, val)
    return tuple(out)


def reverse_segment(p: Permutation, lo: int, hi: int) -> Permutation:
    """Reverse the inclusive segment of positions lo..hi."""
    n = len(p)
    _check_position(n, lo)
    _check_position(n, hi)
    if lo >= hi:
        raise ValueError(f"need lo < hi, got {lo}, {hi}")
    out = list(p)
    out[lo - 1 : hi] = out[lo - 1 : hi][::-1]
    return tuple(out)


def shuffle_segment(p: Permutation, lo: int, hi: int, rng: random.Random) -> Permutation:
    """Uniformly reshuffle the inclusive segment of positions lo..hi."""
    n = len(p)
    _check_position(n, lo)
    _check_position(n, hi)
    if lo >= hi:
        raise ValueError(f"need lo < hi, got {lo}, {hi}")
    out = list(p)
    seg = out[lo - 1 : hi]
    rng.shuffle(seg)
    out[lo - 1 : hi] = seg
    return tuple(out)


def _check_perturbable(p: Permutation) -> None:
    if len(p) < 2:
        raise ValueError("perturbation needs n >= 2")


def _distinct_pair(n: int, rng: random.Random) -> tuple[int, int]:
    """Two distinct uniform 1-based positions (ordered as drawn)."""
    i = rng.randrange(n) + 1
    j = rng.randrange(n - 1) + 1
    if j >= i:
        j += 1
    return i, j


def perturb_swap(p: Permutation, rng: random.Random) -> Permutation:
    """Exchange two distinct uniformly chosen positions."""
    _check_perturbable(p)
    i, j = _distinct_pair(len(p), rng)
    return swap_positions(p, i, j)


def perturb_insertion(p: Permutation, rng: random.Random) -> Permutation:
    """Remove a uniformly chosen entry and reinsert it elsewhere."""
    _check_perturbable(p)
    src, dst = _distinct_pair(len(p), rng)
    return insert_position(p, src, dst)


def perturb_inversion(p: Permutation, rng: random.Random) -> Permutation:
    """Reverse the segment spanned by two distinct uniform positions."""
    _check_perturbable(p)
    i, j = _distinct_pair(len(p), rng)
    if i > j:
        i, j = j, i
    return reverse_segment(p, i, j)


def perturb_scramble(p: Permutation, rng: random.Random) -> Permutation:
    """Reshuffle the segment spanned by two distinct uniform positions."""
    _check_perturbable(p)
    i, j = _distinct_pair(len(p), rng)
    if i > j:
        i, j = j, i
    return shuffle_segment(p, i, j, rng)


def exhaustive_fixed_point_census(n: int) -> list[int]:
    """Count permutations of 1..n by number of fixed points, by brute force.

    Returns n + 1 counts; entry m is the number of permutations with
    exactly m fixed points.  Guarded to n <= 10 (10! cases).
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n > CENSUS_MAX_N:
        raise ValueError(f"census limited to n <= {CENSUS_MAX_N}, got {n}")
    counts = [0] * (n + 1)
    base = range(1, n + 1)
    for perm in itertools.permutations(base):
        counts[sum(a == b for a, b in zip(perm, base))] += 1
    return counts


def format_permutation(p: Permutation) -> str:
    """Serialize as a comma-separated list of 1-based values."""
    return ",".join(str(v) for v in p)


def parse_permutation(text: str) -> Permutation:
    """Parse the comma-separated form, validating the bijection invariant."""
    try:
        p = tuple(int(tok) for tok in text.strip().split(","))
    except ValueError as exc:
        raise ValueError(f"malformed permutation text: {text!r}") from exc
    validate_permutation(p)
    return p
