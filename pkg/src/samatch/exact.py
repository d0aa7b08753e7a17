"""Exact derangement counts and fixed-point probabilities of random permutations.

Everything here is computed in exact integer/rational arithmetic
(``fractions.Fraction``), so results are valid for any n, including
n in the tens of thousands where n! overflows every float.  Conversion
of a probability to a 64-bit float goes through CPython's integer true
division, which rounds correctly even for huge numerators/denominators.

Conventions:
  D(n)     number of derangements (permutations with no fixed point)
  G(n, m)  number of permutations of n elements with exactly m fixed
           points (rencontres number), G(n, m) = C(n, m) * D(n - m)
  "tail"   probability of strictly more than m fixed points
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

# D(0), D(1), extended on demand under the lock; shared by all callers.
_derangements: list[int] = [1, 0]
_derangements_lock = threading.Lock()

_INV_E = math.exp(-1.0)


def _check_n(n: int) -> None:
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")


def _check_nm(n: int, m: int) -> None:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    if m > n:
        raise ValueError(f"m must not exceed n, got m={m} > n={n}")


def derangement_recurrence(n: int) -> int:
    """D(n) by the two-term recurrence D(n) = (n-1)(D(n-1) + D(n-2)).

    Base cases D(0) = 1, D(1) = 0.  Exact for any n; results are memoized
    process-wide, so repeated queries share the computed prefix.
    """
    _check_n(n)
    if n < len(_derangements):
        return _derangements[n]
    with _derangements_lock:
        while len(_derangements) <= n:
            k = len(_derangements)
            _derangements.append((k - 1) * (_derangements[k - 1] + _derangements[k - 2]))
        return _derangements[n]


def derangement_sum(n: int) -> int:
    """D(n) by the alternating sum over k of (-1)^k * n!/k!.

    Each term n!/k! is an integer, accumulated exactly from k = n down to
    k = 0.  Agrees with derangement_recurrence for every n.
    """
    _check_n(n)
    total = 0
    term = 1  # n!/k!, starting at k = n
    for k in range(n, -1, -1):
        total += term if k % 2 == 0 else -term
        term *= k
    return total


def rencontres(n: int, m: int) -> int:
    """G(n, m): permutations of n elements with exactly m fixed points.

    Defined for 0 <= m <= n (the m = n case yields 1 via D(0) = 1).
    """
    _check_n(n)
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    if m > n:
        raise ValueError(f"m must not exceed n, got m={m} > n={n}")
    return math.comb(n, m) * derangement_recurrence(n - m)


def fixed_point_prob(n: int, m: int) -> Fraction:
    """Probability that a uniform permutation of n elements has exactly m
    fixed points: D(n-m) / (m! * (n-m)!), equal to G(n, m)/n!."""
    _check_nm(n, m)
    return Fraction(
        derangement_recurrence(n - m), math.factorial(m) * math.factorial(n - m)
    )


def fixed_point_prob_limit(m: int) -> float:
    """Large-n limit of the exactly-m probability: e^(-1) / m!."""
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    if m <= 170:
        return _INV_E / math.factorial(m)
    # m! overflows float64; evaluate in log space (underflows cleanly to 0)
    return math.exp(-1.0 - math.lgamma(m + 1.0))


def cumulative_prob(n: int, m: int) -> Fraction:
    """Probability of at most m fixed points, as an exact rational."""
    _check_nm(n, m)
    return sum(
        (fixed_point_prob(n, k) for k in range(m + 1)), start=Fraction(0)
    )


def tail_prob(n: int, m: int) -> Fraction:
    """Probability of strictly more than m fixed points (exact rational)."""
    _check_nm(n, m)
    return 1 - cumulative_prob(n, m)


def tail_prob_limit(m: int) -> float:
    """Large-n limit of the strictly-more-than-m probability:
    1 - e^(-1) * sum_{k=0..m} 1/k!."""
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    partial = 0.0
    term = 1.0
    for k in range(m + 1):
        if k > 0:
            term /= k
        partial += term
    # the true value is positive; guard against the product rounding above 1
    return max(0.0, 1.0 - _INV_E * partial)
