"""Structured (0-1) matrices, discretization, and networked-pair structures.

A structured matrix records only which entries can be nonzero.  The system
pattern relates to the influence digraph by transposition: entry ``(i, j)``
means state ``j`` feeds state ``i``, i.e. a digraph edge ``j -> i``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .digraph import Digraph
from .errors import InvalidInputError, SingularMatrixError

#: Relative tolerance used when a structure is extracted from numeric values
#: and no explicit tolerance is given.
DEFAULT_STRUCTURE_RTOL = 1e-9

#: Condition number above which the bilinear-transform solve emits a warning.
CONDITION_WARN_THRESHOLD = 1e12


@dataclass(frozen=True)
class StructuredMatrix:
    """Sparsity pattern with optional per-entry numeric weights."""

    rows: int
    cols: int
    entries: frozenset[tuple[int, int]]
    weights: Mapping[tuple[int, int], float] | None = field(
        default=None, compare=False
    )

    @staticmethod
    def from_entries(
        rows: int,
        cols: int,
        entries: Iterable[tuple[int, int]],
        weights: Mapping[tuple[int, int], float] | None = None,
    ) -> "StructuredMatrix":
        if rows <= 0 or cols <= 0:
            raise InvalidInputError("structured matrix dimensions must be positive")
        ents = set()
        for r, c in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise InvalidInputError(
                    f"entry ({r}, {c}) out of range for {rows}x{cols} pattern"
                )
            ents.add((int(r), int(c)))
        if weights is not None and set(weights) - ents:
            raise InvalidInputError("weights given for positions not in the pattern")
        return StructuredMatrix(rows, cols, frozenset(ents), weights)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def row_support(self, r: int) -> set[int]:
        return {c for (rr, c) in self.entries if rr == r}

    def to_json_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [list(e) for e in sorted(self.entries)],
        }


@dataclass(frozen=True)
class ContinuousSystem:
    """Continuous-time system matrix together with a sampling interval."""

    a_bar: np.ndarray
    sample_time: float

    def __post_init__(self) -> None:
        a = np.asarray(self.a_bar, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInputError("continuous system matrix must be square")
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("continuous system matrix must be finite")
        object.__setattr__(self, "a_bar", a.copy())
        t = float(self.sample_time)
        if not (t > 0.0 and np.isfinite(t)):
            raise InvalidInputError("sample_time must be positive and finite")
        object.__setattr__(self, "sample_time", t)

    @property
    def order(self) -> int:
        return self.a_bar.shape[0]


@dataclass(frozen=True)
class NetworkedStructure:
    """Kronecker pattern of the network/system pair plus the block-diagonal
    pattern of the aggregated measurement Gramians."""

    kron_pattern: StructuredMatrix
    dc_pattern: StructuredMatrix
    agent_count: int
    state_count: int

    def measured_networked_states(self) -> set[int]:
        """Diagonal support of the block-diagonal measurement pattern."""
        return {r for (r, c) in self.dc_pattern.entries if r == c}


def is_self_damped(a_pattern: StructuredMatrix) -> bool:
    """True iff every diagonal position of the square pattern is present."""
    if not a_pattern.is_square:
        raise InvalidInputError("self-damped test needs a square pattern")
    return all((i, i) in a_pattern.entries for i in range(a_pattern.rows))


def missing_self_loops(a_pattern: StructuredMatrix) -> list[int]:
    if not a_pattern.is_square:
        raise InvalidInputError("self-damped test needs a square pattern")
    return [i for i in range(a_pattern.rows) if (i, i) not in a_pattern.entries]


def euler_discretize(sys: ContinuousSystem) -> np.ndarray:
    """First-order discretization: identity plus sample_time times the matrix."""
    n = sys.order
    return np.eye(n) + sys.sample_time * sys.a_bar


def tustin_discretize(sys: ContinuousSystem) -> np.ndarray:
    """Bilinear-transform discretization.

    Solves (I - (T/2) A) X = (I + (T/2) A) with a partially pivoted dense
    factorization.  Raises when the left factor is singular at this T and
    warns when its condition number exceeds 1e12.  The inverse generally
    fills in: the result's sparsity depends on the numeric entries, not only
    on the input's pattern, so extract structures from it with a tolerance.
    """
    n = sys.order
    half = 0.5 * sys.sample_time
    left = np.eye(n) - half * sys.a_bar
    right = np.eye(n) + half * sys.a_bar
    cond = np.linalg.cond(left)
    if not np.isfinite(cond):
        raise SingularMatrixError(
            f"(I - (T/2)A) is singular at sample_time T={sys.sample_time!r}"
        )
    if cond > CONDITION_WARN_THRESHOLD:
        warnings.warn(
            f"(I - (T/2)A) is ill-conditioned at T={sys.sample_time!r} "
            f"(cond={cond:.3e})",
            RuntimeWarning,
            stacklevel=2,
        )
    try:
        result = np.linalg.solve(left, right)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(
            f"(I - (T/2)A) is singular at sample_time T={sys.sample_time!r}"
        ) from exc
    if not np.all(np.isfinite(result)):
        raise SingularMatrixError(
            f"(I - (T/2)A) is numerically singular at sample_time T={sys.sample_time!r}"
        )
    return result


def structure_of(m: np.ndarray, tol: float | None = None) -> StructuredMatrix:
    """Extract the sparsity pattern of a numeric matrix.

    A position is present when its magnitude strictly exceeds ``tol``.  With
    ``tol=None`` the threshold is relative: 1e-9 times the largest magnitude
    in the matrix.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise InvalidInputError("structure extraction needs a 2-D matrix")
    if tol is None:
        peak = float(np.max(np.abs(a))) if a.size else 0.0
        tol = DEFAULT_STRUCTURE_RTOL * peak
    if tol < 0:
        raise InvalidInputError("tolerance must be nonnegative")
    rows, cols = np.nonzero(np.abs(a) > tol)
    weights = {(int(r), int(c)): float(a[r, c]) for r, c in zip(rows, cols)}
    return StructuredMatrix.from_entries(
        a.shape[0], a.shape[1], zip(rows.tolist(), cols.tolist()), weights
    )


def pattern_to_digraph(a_pattern: StructuredMatrix) -> Digraph:
    """Influence digraph of a square pattern: entry (i, j) becomes edge j -> i."""
    if not a_pattern.is_square:
        raise InvalidInputError("system pattern must be square")
    return Digraph(a_pattern.rows, ((j, i) for (i, j) in a_pattern.entries))


def digraph_to_pattern(g: Digraph) -> StructuredMatrix:
    """Inverse of :func:`pattern_to_digraph`."""
    return StructuredMatrix.from_entries(
        g.node_count, g.node_count, ((v, u) for (u, v) in g.edges)
    )


def build_networked_structure(
    a_pattern: StructuredMatrix,
    measurement_rows: Sequence[Iterable[int]],
    u_pattern: StructuredMatrix,
) -> NetworkedStructure:
    """Assemble the pair structure for a network of agents.

    ``measurement_rows[i]`` is the set of states agent ``i`` measures.  The
    network pattern entry ``(i, j)`` means agent ``i`` receives from agent
    ``j``; every agent always counts itself among its own neighbors.
    """
    if not a_pattern.is_square:
        raise InvalidInputError("system pattern must be square")
    if not u_pattern.is_square:
        raise InvalidInputError("network pattern must be square")
    n = a_pattern.rows
    big_n = u_pattern.rows
    if len(measurement_rows) != big_n:
        raise InvalidInputError(
            f"expected {big_n} measurement rows, got {len(measurement_rows)}"
        )
    rows_support: list[set[int]] = []
    for i, row in enumerate(measurement_rows):
        support = {int(s) for s in row}
        if any(not (0 <= s < n) for s in support):
            raise InvalidInputError(f"measurement row {i} references states out of range")
        rows_support.append(support)

    kron_entries = set()
    for (i, j) in u_pattern.entries:
        base_r = i * n
        base_c = j * n
        for (p, q) in a_pattern.entries:
            kron_entries.add((base_r + p, base_c + q))
    kron = StructuredMatrix.from_entries(big_n * n, big_n * n, kron_entries)

    dc_entries = set()
    for i in range(big_n):
        neighbors = {j for (ii, j) in u_pattern.entries if ii == i}
        neighbors.add(i)
        base = i * n
        for j in neighbors:
            support = rows_support[j]
            for s in support:
                for t in support:
                    dc_entries.add((base + s, base + t))
    dc = StructuredMatrix.from_entries(big_n * n, big_n * n, dc_entries)

    return NetworkedStructure(kron, dc, agent_count=big_n, state_count=n)
