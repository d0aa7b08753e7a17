"""Deterministic 64-bit random streams and seed derivation.

All Monte Carlo in this package is driven either by numpy's PCG64 (bulk
graph generation) or by a splitmix64 stream (annealing kernels and
permutation sampling).  The pure-Python ``SplitMix64`` here is the
reference implementation of the stream used inside the compiled kernels;
both sides are tested to produce identical output.

Seeds for independent tasks are derived with :func:`mix64`, a fixed
avalanche mix of integer components, so experiment results do not depend
on scheduling or worker count.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

# 2^-53, for converting the top 53 bits of a draw to a float in [0, 1)
_U01 = 1.0 / 9007199254740992.0


def _avalanche(z: int) -> int:
    """splitmix64 output function: finalizing avalanche of a 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK64
    return z ^ (z >> 31)


def mix64(*values: int) -> int:
    """Fold integer components into one 64-bit seed.

    Order-sensitive: mix64(a, b) != mix64(b, a) in general.  Used to derive
    per-task seeds from (master_seed, experiment id, n, run index).
    """
    acc = _GOLDEN
    for v in values:
        acc = _avalanche((acc + (v & MASK64)) & MASK64)
    return acc


class SplitMix64:
    """splitmix64 pseudo-random stream over 64-bit state.

    Mirrors the in-kernel generator exactly; any change here must be made
    in the compiled kernels as well (and vice versa).
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_uint64(self) -> int:
        self.state = (self.state + _GOLDEN) & MASK64
        return _avalanche(self.state)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by masked rejection (unbiased)."""
        if n <= 0:
            raise ValueError(f"bound must be positive, got {n}")
        nm1 = n - 1
        mask = nm1
        mask |= mask >> 1
        mask |= mask >> 2
        mask |= mask >> 4
        mask |= mask >> 8
        mask |= mask >> 16
        mask |= mask >> 32
        while True:
            r = self.next_uint64() & mask
            if r <= nm1:
                return r

    def random(self) -> float:
        """Float in [0, 1) from the top 53 bits of one draw."""
        return (self.next_uint64() >> 11) * _U01

    def permutation(self, n: int) -> list[int]:
        """Uniform permutation of range(n) via Fisher-Yates."""
        p = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            p[i], p[j] = p[j], p[i]
        return p
