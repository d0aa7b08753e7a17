"""Random isomorphic graph pairs and the two matching objectives.

A pair holds two undirected simple graphs on n vertices as dense 0/1
adjacency matrices, plus the correspondence (ground truth) under which
they are exactly isomorphic.  The first graph is an Erdos-Renyi draw;
the second is a relabeling of the first, so the global optimum of the
structural objective is always 0.

Two objectives are provided:
  structural_energy  number of vertex pairs whose edge/non-edge status
                     disagrees under a candidate mapping; computable
                     without knowing the truth.
  oracle_energy      fraction of vertices mapped away from their true
                     image; requires the ground truth.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction
from typing import TextIO

import numpy as np

from .permutations import Permutation, energy, validate_permutation

RELABEL_MODES = ("identity", "random")


@dataclass(frozen=True, eq=False)
class GraphPair:
    """Two isomorphic graphs plus the correspondence relating them.

    adjacency_2[gt(i), gt(j)] == adjacency_1[i, j] for all i, j (1-based
    gt; the matrices themselves are 0-indexed numpy uint8 arrays).
    seed and relabel_mode record how the pair was generated.
    """

    n: int
    edge_probability: float
    ground_truth: Permutation
    adjacency_1: np.ndarray
    adjacency_2: np.ndarray
    seed: int = 0
    relabel_mode: str = "identity"

    def validate(self) -> None:
        """Check symmetry, zero diagonal, and the exact isomorphism."""
        for name, a in (("adjacency_1", self.adjacency_1), ("adjacency_2", self.adjacency_2)):
            if a.shape != (self.n, self.n):
                raise ValueError(f"{name} has shape {a.shape}, expected {(self.n, self.n)}")
            if a.diagonal().any():
                raise ValueError(f"{name} has a nonzero diagonal")
            if not np.array_equal(a, a.T):
                raise ValueError(f"{name} is not symmetric")
            if not np.isin(a, (0, 1)).all():
                raise ValueError(f"{name} has entries outside {{0,1}}")
        validate_permutation(self.ground_truth)
        if len(self.ground_truth) != self.n:
            raise ValueError("ground truth size does not match n")
        g = np.asarray(self.ground_truth, dtype=np.int64) - 1
        if not np.array_equal(self.adjacency_2[np.ix_(g, g)], self.adjacency_1):
            raise ValueError("graphs are not isomorphic under the ground truth")

    def ground_truth_0based(self) -> np.ndarray:
        return np.asarray(self.ground_truth, dtype=np.int32) - 1


def generate_pair(
    n: int,
    edge_probability: float = 0.5,
    relabel: str = "identity",
    seed: int = 0,
) -> GraphPair:
    """Draw an Erdos-Renyi graph G(n, p) and an exact relabeling of it.

    relabel="identity" keeps the true correspondence as 1..n in order;
    relabel="random" uses a uniform permutation.  For a fixed seed the
    first adjacency matrix is identical in both modes (the truth is drawn
    after the edges), so the modes differ only in labeling.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if not 0.0 < edge_probability < 1.0:
        raise ValueError(f"edge probability must be in (0,1), got {edge_probability}")
    if relabel not in RELABEL_MODES:
        raise ValueError(f"relabel must be one of {RELABEL_MODES}, got {relabel!r}")

    rng = np.random.Generator(np.random.PCG64(seed))
    a1 = np.zeros((n, n), dtype=np.uint8)
    # row-by-row upper triangle keeps peak memory at O(n) for large n
    for i in range(n - 1):
        bits = (rng.random(n - 1 - i) < edge_probability).astype(np.uint8)
        a1[i, i + 1 :] = bits
        a1[i + 1 :, i] = bits

    if relabel == "identity":
        gt0 = np.arange(n, dtype=np.int64)
    else:
        gt0 = rng.permutation(n).astype(np.int64)

    a2 = np.zeros_like(a1)
    a2[np.ix_(gt0, gt0)] = a1

    pair = GraphPair(
        n=n,
        edge_probability=edge_probability,
        ground_truth=tuple(int(v) + 1 for v in gt0),
        adjacency_1=a1,
        adjacency_2=a2,
        seed=seed,
        relabel_mode=relabel,
    )
    pair.validate()
    return pair


def _candidate_0based(pair: GraphPair, p: Permutation) -> np.ndarray:
    if len(p) != pair.n:
        raise ValueError(f"size mismatch: permutation {len(p)} vs pair {pair.n}")
    return np.asarray(p, dtype=np.int64) - 1


def structural_energy(pair: GraphPair, p: Permutation) -> int:
    """Number of vertex pairs {i,j} with A1[i,j] != A2[p(i),p(j)].

    0 exactly when p maps the first graph onto the second; at most C(n,2).
    """
    p0 = _candidate_0based(pair, p)
    permuted = pair.adjacency_2[np.ix_(p0, p0)]
    # both diagonals are zero, so the full-matrix count is twice the pair count
    return int(np.count_nonzero(pair.adjacency_1 != permuted)) // 2


def structural_energy_delta_swap(pair: GraphPair, p: Permutation, i: int, j: int) -> int:
    """Change in structural_energy caused by swapping positions i and j.

    O(n): only the two affected rows are examined.  i, j are 1-based and
    must be distinct.
    """
    n = pair.n
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"positions must be in 1..{n}, got {i}, {j}")
    if i == j:
        raise ValueError("swap positions must be distinct")
    p0 = _candidate_0based(pair, p)
    a, b = pair.adjacency_1, pair.adjacency_2
    i0, j0 = i - 1, j - 1
    vi, vj = p0[i0], p0[j0]

    old_i = int(np.count_nonzero(a[i0] != b[vi][p0]))
    old_j = int(np.count_nonzero(a[j0] != b[vj][p0]))
    new_i = int(np.count_nonzero(a[i0] != b[vj][p0]))
    new_j = int(np.count_nonzero(a[j0] != b[vi][p0]))

    # correct the l = i and l = j entries of the new-row counts: the scan
    # above used p, but after the swap position i holds vj and j holds vi
    bvv = int(b[vi, vj])
    aij = int(a[i0, j0])
    cross = 1 if aij != bvv else 0
    new_i += -bvv - aij + cross
    new_j += -bvv - aij + cross
    # the (i,j) pair itself is unchanged by the swap (B is symmetric), and
    # the old row counts include their l = i / l = j entries correctly
    return (new_i - old_i) + (new_j - old_j)


def oracle_energy(pair: GraphPair, p: Permutation) -> Fraction:
    """Fraction of vertices not mapped to their true image, in [0, 1]."""
    if len(p) != pair.n:
        raise ValueError(f"size mismatch: permutation {len(p)} vs pair {pair.n}")
    return energy(p, pair.ground_truth)


def write_pair(pair: GraphPair, out: TextIO) -> None:
    """Write the text form: header 'n p seed mode', both matrices as 0/1
    rows, then the ground truth as a comma-separated list."""
    out.write(f"{pair.n} {pair.edge_probability!r} {pair.seed} {pair.relabel_mode}\n")
    for matrix in (pair.adjacency_1, pair.adjacency_2):
        for row in matrix:
            out.write("".join("1" if v else "0" for v in row))
            out.write("\n")
    out.write(",".join(str(v) for v in pair.ground_truth))
    out.write("\n")


def read_pair(src: TextIO) -> GraphPair:
    """Parse the format written by write_pair and validate all invariants."""
    header = src.readline().split()
    if len(header) != 4:
        raise ValueError(f"malformed header: {header!r}")
    n = int(header[0])
    prob = float(header[1])
    seed = int(header[2])
    mode = header[3]

    def read_matrix() -> np.ndarray:
        m = np.empty((n, n), dtype=np.uint8)
        for i in range(n):
            line = src.readline().strip()
            if len(line) != n or set(line) - {"0", "1"}:
                raise ValueError(f"malformed matrix row {i}: {line!r}")
            m[i] = np.frombuffer(line.encode(), dtype=np.uint8) - ord("0")
        return m

    a1 = read_matrix()
    a2 = read_matrix()
    gt = tuple(int(tok) for tok in src.readline().strip().split(","))
    pair = GraphPair(
        n=n,
        edge_probability=prob,
        ground_truth=gt,
        adjacency_1=a1,
        adjacency_2=a2,
        seed=seed,
        relabel_mode=mode,
    )
    pair.validate()
    return pair


def pair_to_text(pair: GraphPair) -> str:
    buf = io.StringIO()
    write_pair(pair, buf)
    return buf.getvalue()


def pair_from_text(text: str) -> GraphPair:
    return read_pair(io.StringIO(text))
