"""Minimum-cost sensor selection.

The agent/state cost matrix is first reduced to an agent/parent-component
matrix by taking the cheapest state inside each parent component, and the
reduced square problem is solved as a linear assignment by a shortest
augmenting path method that maintains dual potentials.  The potentials form
an optimality certificate (u_i + v_j <= cost_ij, tight on assigned cells)
which is re-checked after every solve.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .digraph import SccDecomposition, parent_sccs
from .errors import CertificateError, InfeasibleError, InvalidInputError
from .sysmodel import StructuredMatrix

_CERT_RTOL = 1e-9


@dataclass(frozen=True)
class MeasurementCosts:
    """Per-(agent, state) measurement cost; +inf marks an impossible pair."""

    delta: np.ndarray

    def __post_init__(self) -> None:
        d = np.asarray(self.delta, dtype=float)
        if d.ndim != 2 or d.size == 0:
            raise InvalidInputError("measurement cost matrix must be 2-D and nonempty")
        if np.any(np.isnan(d)) or np.any(d < 0):
            raise InvalidInputError("measurement costs must be nonnegative or +inf")
        object.__setattr__(self, "delta", d.copy())

    @property
    def agent_count(self) -> int:
        return self.delta.shape[0]

    @property
    def state_count(self) -> int:
        return self.delta.shape[1]


@dataclass(frozen=True)
class ReducedCosts:
    """Agent/parent-component cost matrix with the per-cell argmin state.

    Padded dummy columns (cost zero, no state) appear only when surplus
    agents were explicitly allowed.
    """

    delta_cap: np.ndarray
    argmin_state: np.ndarray  # (N, N) state index, -1 for dummy columns
    parent_components: tuple[int, ...]
    state_count: int
    dummy_columns: tuple[int, ...] = ()

    @property
    def size(self) -> int:
        return self.delta_cap.shape[0]


@dataclass(frozen=True)
class Assignment:
    """Permutation solution of the reduced problem with dual certificate."""

    z: np.ndarray  # (N, N) 0-1
    total_cost: float
    row_potentials: np.ndarray = field(compare=False)
    col_potentials: np.ndarray = field(compare=False)

    @property
    def col_of_row(self) -> list[int]:
        return [int(np.argmax(self.z[i])) for i in range(self.z.shape[0])]


def reduce_costs(
    costs: MeasurementCosts,
    dec: SccDecomposition,
    allow_extra_agents: bool = False,
) -> ReducedCosts:
    """Collapse state costs to parent-component costs (cheapest member)."""
    if costs.state_count != dec.node_count:
        raise InvalidInputError(
            f"cost matrix covers {costs.state_count} states but the system has "
            f"{dec.node_count}"
        )
    parents = parent_sccs(dec)
    n_agents = costs.agent_count
    n_parents = len(parents)
    if n_agents != n_parents:
        if not (allow_extra_agents and n_agents > n_parents):
            raise InfeasibleError(
                f"agent count {n_agents} does not match parent component count "
                f"{n_parents}; every parent component needs exactly one agent "
                "(pass allow_extra_agents to pad surplus agents)"
            )
    size = n_agents
    delta_cap = np.zeros((size, size))
    argmin = np.full((size, size), -1, dtype=int)
    for j, comp_idx in enumerate(parents):
        members = dec.components[comp_idx]
        for i in range(n_agents):
            best_state = -1
            best = math.inf
            for m in members:
                v = costs.delta[i, m]
                if v < best:
                    best = v
                    best_state = m
            delta_cap[i, j] = best
            argmin[i, j] = best_state
        if not np.any(np.isfinite(delta_cap[:, j])):
            raise InfeasibleError(
                f"no agent can measure any state of parent component {comp_idx} "
                f"(states {list(members)}): all costs are infinite"
            )
    dummy = tuple(range(n_parents, size))
    return ReducedCosts(
        delta_cap=delta_cap,
        argmin_state=argmin,
        parent_components=tuple(parents),
        state_count=costs.state_count,
        dummy_columns=dummy,
    )


def _hall_witness(
    cost: np.ndarray, tree_rows: list[int]
) -> tuple[list[int], list[int]]:
    rows = sorted({int(i) for i in tree_rows})
    cols = sorted({int(j) for i in rows for j in np.flatnonzero(np.isfinite(cost[i]))})
    return rows, cols


def _solve_shortest_augmenting_path(
    cost: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (col_of_row, row potentials u, column potentials v)."""
    n = cost.shape[0]
    inf = np.inf
    u = np.zeros(n)
    v = np.zeros(n)
    col_row = np.full(n, -1, dtype=np.intp)  # column -> assigned row
    row_col = np.full(n, -1, dtype=np.intp)

    for i in range(n):
        minv = np.full(n, inf)
        way = np.full(n, -1, dtype=np.intp)  # column -> previous column on path
        used = np.zeros(n, dtype=bool)
        cur_row = i
        j_prev = -1
        while True:
            reduced = cost[cur_row] - u[cur_row] - v
            better = ~used & (reduced < minv)
            minv = np.where(better, reduced, minv)
            way[better] = j_prev
            masked = np.where(used, inf, minv)
            j1 = int(np.argmin(masked))
            delta = masked[j1]
            if not np.isfinite(delta):
                tree_rows = [i] + [int(col_row[j]) for j in np.flatnonzero(used)]
                rows, cols = _hall_witness(cost, tree_rows)
                raise InfeasibleError(
                    "no finite-cost assignment exists: rows "
                    f"{rows} only have finite costs in columns {cols}"
                )
            used_cols = np.flatnonzero(used)
            u[i] += delta
            if used_cols.size:
                u[col_row[used_cols]] += delta
                v[used_cols] -= delta
            minv = np.where(used, minv, minv - delta)
            used[j1] = True
            j_prev = j1
            nxt = col_row[j1]
            if nxt < 0:
                break
            cur_row = int(nxt)
        j = j1
        while j >= 0:
            jp = int(way[j])
            r = i if jp < 0 else int(col_row[jp])
            col_row[j] = r
            row_col[r] = j
            j = jp
    return row_col, u, v


def _check_certificate(cost: np.ndarray, row_col: np.ndarray, u, v) -> None:
    n = cost.shape[0]
    finite = cost[np.isfinite(cost)]
    scale = max(1.0, float(np.max(np.abs(finite))) if finite.size else 1.0)
    tol = _CERT_RTOL * scale
    slack = cost - u[:, None] - v[None, :]
    if np.any(slack < -tol):
        raise CertificateError("dual feasibility violated after assignment solve")
    for i in range(n):
        j = int(row_col[i])
        if not (abs(cost[i, j] - u[i] - v[j]) <= tol):
            raise CertificateError("assigned cell is not tight in the dual")


def _lexicographic_tightened(
    cost: np.ndarray, row_col: np.ndarray, u: np.ndarray, v: np.ndarray
) -> np.ndarray:
    # Among assignments supported on tight cells, pick the row-major smallest
    # one; keep it only if it does not cost more than the solver's choice.
    n = cost.shape[0]
    finite = cost[np.isfinite(cost)]
    scale = max(1.0, float(np.max(np.abs(finite))) if finite.size else 1.0)
    tol = _CERT_RTOL * scale
    slack = np.abs(cost - u[:, None] - v[None, :])
    tight: list[list[int]] = [
        [int(j) for j in np.flatnonzero(np.isfinite(cost[i]) & (slack[i] <= tol))]
        for i in range(n)
    ]
    if sum(len(t) for t in tight) == n:
        return row_col  # the matching is the only tight assignment

    match_rc = [int(x) for x in row_col]
    match_cr = [-1] * n
    for i, j in enumerate(match_rc):
        match_cr[j] = i

    def augment(start: int, fixed_rows: int, banned: set[int]) -> bool:
        # Kuhn search for an alternating path from row `start` among rows
        # > fixed_rows, never touching `banned` or fixed rows' columns.
        seen: set[int] = set()

        def try_row(r: int) -> bool:
            for jj in tight[r]:
                if jj in banned or jj in seen:
                    continue
                owner = match_cr[jj]
                if owner != -1 and owner <= fixed_rows:
                    continue
                seen.add(jj)
                if owner == -1 or try_row(owner):
                    match_cr[jj] = r
                    match_rc[r] = jj
                    return True
            return False

        return try_row(start)

    for i in range(n):
        cur = match_rc[i]
        for j in tight[i]:
            if j >= cur:
                break
            displaced = match_cr[j]
            if displaced != -1 and displaced < i:
                continue  # column locked by an earlier, already-fixed row
            # give column j to row i; the displaced row must re-match among
            # the still-free columns (including i's former column)
            match_cr[cur] = -1
            match_rc[i] = j
            match_cr[j] = i
            if displaced == -1 or augment(displaced, i, {j}):
                break
            # revert
            match_rc[i] = cur
            match_cr[cur] = i
            match_cr[j] = displaced
    cand_cost = float(sum(cost[i, match_rc[i]] for i in range(n)))
    base_cost = float(sum(cost[i, int(row_col[i])] for i in range(n)))
    if cand_cost <= base_cost:
        return np.array(match_rc, dtype=np.intp)
    return row_col


def hungarian(delta_cap: np.ndarray) -> Assignment:
    """Solve the square linear assignment problem to optimality.

    Ties between optimal permutations are broken toward the row-major
    lexicographically smallest one.
    """
    cost = np.asarray(delta_cap, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1] or cost.size == 0:
        raise InvalidInputError("assignment cost matrix must be square and nonempty")
    if np.any(np.isnan(cost)):
        raise InvalidInputError("assignment costs must not be NaN")
    row_col, u, v = _solve_shortest_augmenting_path(cost)
    _check_certificate(cost, row_col, u, v)
    row_col = _lexicographic_tightened(cost, row_col, u, v)
    n = cost.shape[0]
    z = np.zeros((n, n), dtype=int)
    for i in range(n):
        z[i, int(row_col[i])] = 1
    total = float(sum(cost[i, int(row_col[i])] for i in range(n)))
    return Assignment(z=z, total_cost=total, row_potentials=u, col_potentials=v)


def brute_force_assignment(delta_cap: np.ndarray) -> tuple[float, tuple[int, ...]]:
    """Exhaustive assignment oracle; first optimum in lexicographic order."""
    cost = np.asarray(delta_cap, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1] or cost.size == 0:
        raise InvalidInputError("assignment cost matrix must be square and nonempty")
    n = cost.shape[0]
    if n > 9:
        raise InvalidInputError("brute-force assignment is limited to 9 agents")
    best_cost = math.inf
    best_perm: tuple[int, ...] | None = None
    for perm in itertools.permutations(range(n)):
        c = sum(cost[i, perm[i]] for i in range(n))
        if c < best_cost:
            best_cost = c
            best_perm = perm
    if best_perm is None or not math.isfinite(best_cost):
        raise InfeasibleError("no finite-cost assignment exists")
    return float(best_cost), best_perm


def assignment_to_measurement(
    assignment: Assignment, reduced: ReducedCosts
) -> StructuredMatrix:
    """Turn the reduced-problem permutation into the measurement pattern.

    Each agent's row gets a single entry at the cheapest state of its
    assigned parent component; agents assigned to a padded dummy column get
    an empty row.
    """
    size = reduced.size
    if assignment.z.shape != (size, size):
        raise InvalidInputError("assignment and reduction sizes differ")
    entries = []
    for i, j in enumerate(assignment.col_of_row):
        if j in reduced.dummy_columns:
            continue
        state = int(reduced.argmin_state[i, j])
        if state < 0:
            raise InvalidInputError("assignment selected a column without a state")
        entries.append((i, state))
    return StructuredMatrix.from_entries(size, reduced.state_count, entries)
