"""Structural observability tests and the Monte-Carlo generic-rank oracle.

Two graph conditions characterize generic observability of a pattern with a
set of directly measured states: every state must have a directed path to a
measured state (output connectivity), and the pattern stacked over the unit
measurement rows must have full structural rank.  Patterns with a complete
diagonal satisfy the rank condition automatically, which reduces the test to
coverage of the parent components.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .digraph import (
    Digraph,
    is_strongly_connected,
    parent_sccs,
    reverse_reachable,
    scc_decompose,
)
from .errors import InvalidInputError, UnsupportedStructureError
from .sysmodel import (
    StructuredMatrix,
    build_networked_structure,
    missing_self_loops,
    pattern_to_digraph,
)

#: Largest networked pattern (in total rows) evaluated by direct construction
#: of the Kronecker structure; bigger instances use the coverage shortcut.
MAX_DIRECT_NETWORKED_ROWS = 5000


@dataclass(frozen=True)
class ObservabilityReport:
    output_connected: bool
    unreached_nodes: frozenset[int]
    structurally_full_rank: bool
    structural_rank: int
    observable: bool

    def to_json_dict(self) -> dict:
        return {
            "output_connected": self.output_connected,
            "unreached_nodes": sorted(self.unreached_nodes),
            "structurally_full_rank": self.structurally_full_rank,
            "structural_rank": self.structural_rank,
            "observable": self.observable,
        }


@dataclass(frozen=True)
class NetworkedReport:
    """Verdict of the networked observability check.

    ``method`` records which path produced the verdict: ``"direct"`` builds
    the full Kronecker pattern and evaluates it like any other pattern, while
    ``"coverage"`` combines parent-component coverage with agent reachability
    over the network (exact for self-damped systems whose network pattern has
    a complete diagonal).
    """

    observable: bool
    method: str
    report: ObservabilityReport | None = None
    uncovered_parents: tuple[int, ...] = ()
    network_strongly_connected: bool | None = None

    def to_json_dict(self) -> dict:
        out: dict = {"observable": self.observable, "method": self.method}
        if self.report is not None:
            out["report"] = self.report.to_json_dict()
        else:
            out["uncovered_parents"] = list(self.uncovered_parents)
            out["network_strongly_connected"] = self.network_strongly_connected
        return out


def output_connected(
    a_pattern: StructuredMatrix, measured_states: Iterable[int]
) -> tuple[bool, set[int]]:
    """Check that every state has a directed path to a measured state."""
    g = pattern_to_digraph(a_pattern)
    measured = set(measured_states)
    reached = reverse_reachable(g, measured) if measured else set()
    unreached = set(range(g.node_count)) - reached
    return not unreached, unreached


def _max_bipartite_matching(
    n_left: int, n_right: int, adj: Sequence[Sequence[int]]
) -> int:
    # Hopcroft-Karp.  adj[l] lists the right nodes reachable from left node l.
    inf = float("inf")
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0.0] * n_left
    matching = 0

    def bfs() -> bool:
        queue: deque[int] = deque()
        for l in range(n_left):
            if match_l[l] == -1:
                dist[l] = 0.0
                queue.append(l)
            else:
                dist[l] = inf
        found = inf
        while queue:
            l = queue.popleft()
            if dist[l] >= found:
                continue
            for r in adj[l]:
                nl = match_r[r]
                if nl == -1:
                    if found == inf:
                        found = dist[l] + 1
                elif dist[nl] == inf:
                    dist[nl] = dist[l] + 1
                    queue.append(nl)
        return found != inf

    def dfs(l: int) -> bool:
        for r in adj[l]:
            nl = match_r[r]
            if nl == -1 or (dist[nl] == dist[l] + 1 and dfs(nl)):
                match_l[l] = r
                match_r[r] = l
                return True
        dist[l] = inf
        return False

    while bfs():
        for l in range(n_left):
            if match_l[l] == -1 and dfs(l):
                matching += 1
    return matching


def structural_rank(a_pattern: StructuredMatrix) -> int:
    """Maximum matching between rows and columns of a square pattern."""
    if not a_pattern.is_square:
        raise InvalidInputError("structural rank is defined for square patterns")
    n = a_pattern.rows
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in sorted(a_pattern.entries):
        adj[i].append(j)
    return _max_bipartite_matching(n, n, adj)


def _augmented_structural_rank(
    a_pattern: StructuredMatrix, measured: Sequence[int]
) -> int:
    # Structural rank of the pattern stacked over one unit row per measured
    # state; this is the rank side of the generic observability test.
    n = a_pattern.cols
    adj: list[list[int]] = [[] for _ in range(a_pattern.rows + len(measured))]
    for i, j in sorted(a_pattern.entries):
        adj[i].append(j)
    for k, s in enumerate(measured):
        adj[a_pattern.rows + k].append(s)
    return _max_bipartite_matching(len(adj), n, adj)


def is_structurally_observable(
    a_pattern: StructuredMatrix, measured_states: Iterable[int]
) -> ObservabilityReport:
    """Evaluate both generic observability conditions and combine them."""
    if not a_pattern.is_square:
        raise InvalidInputError("system pattern must be square")
    measured = sorted(set(measured_states))
    connected, unreached = output_connected(a_pattern, measured)
    rank = _augmented_structural_rank(a_pattern, measured)
    full = rank == a_pattern.rows
    return ObservabilityReport(
        output_connected=connected,
        unreached_nodes=frozenset(unreached),
        structurally_full_rank=full,
        structural_rank=rank,
        observable=connected and full,
    )


def parent_scc_coverage(
    a_pattern: StructuredMatrix, measured_states: Iterable[int]
) -> tuple[bool, list[int]]:
    """Check that every parent component contains a measured state.

    Only defined for patterns with a complete diagonal, where coverage is
    equivalent to generic observability.
    """
    missing = missing_self_loops(a_pattern)
    if missing:
        raise UnsupportedStructureError(
            "parent-component coverage requires a self-loop on every state; "
            f"missing diagonal entries: {missing}"
        )
    dec = scc_decompose(pattern_to_digraph(a_pattern))
    measured_comps = {dec.component_of[s] for s in set(measured_states)}
    uncovered = [k for k in parent_sccs(dec) if k not in measured_comps]
    return not uncovered, uncovered


def _measurement_supports(
    measurement_rows: Sequence[Iterable[int]], n: int
) -> list[set[int]]:
    supports = []
    for i, row in enumerate(measurement_rows):
        support = {int(s) for s in row}
        if any(not (0 <= s < n) for s in support):
            raise InvalidInputError(f"measurement row {i} references states out of range")
        supports.append(support)
    return supports


def networked_report(
    a_pattern: StructuredMatrix,
    measurement_rows: Sequence[Iterable[int]],
    u_pattern: StructuredMatrix,
    max_direct_rows: int = MAX_DIRECT_NETWORKED_ROWS,
) -> NetworkedReport:
    """Check observability of the networked pair.

    Small instances are checked by building the Kronecker pattern and the
    block measurement pattern and running the plain structural test on them.
    Above ``max_direct_rows`` total rows, the verdict is obtained without
    materializing the product: every agent must, through agents it can reach
    over the network, have access to a measurement in every parent component.
    That criterion is exact when the system pattern is self-damped and the
    network pattern contains its whole diagonal, which the size guard checks.
    """
    if not a_pattern.is_square or not u_pattern.is_square:
        raise InvalidInputError("system and network patterns must be square")
    missing = missing_self_loops(a_pattern)
    if missing:
        raise UnsupportedStructureError(
            "networked observability check requires a self-damped system; "
            f"missing diagonal entries: {missing}"
        )
    n = a_pattern.rows
    big_n = u_pattern.rows
    if len(measurement_rows) != big_n:
        raise InvalidInputError(
            f"expected {big_n} measurement rows, got {len(measurement_rows)}"
        )
    supports = _measurement_supports(measurement_rows, n)

    diag_complete = all((i, i) in u_pattern.entries for i in range(big_n))
    if big_n * n <= max_direct_rows or not diag_complete:
        net = build_networked_structure(a_pattern, supports, u_pattern)
        measured = net.measured_networked_states()
        report = is_structurally_observable(net.kron_pattern, measured)
        return NetworkedReport(
            observable=report.observable, method="direct", report=report
        )

    # Coverage shortcut.  The product of a self-damped system with a
    # full-diagonal network lets information move through agents and states
    # independently, so the copy of state q held by agent j is
    # output-connected exactly when some agent reachable by j's information
    # aggregates (its own or a direct neighbor's) measurement of a parent
    # component downstream of q.  Checking all parent components for every
    # agent covers all states.
    dec = scc_decompose(pattern_to_digraph(a_pattern))
    parents = parent_sccs(dec)
    parent_set = set(parents)
    comp_of = dec.component_of

    own_parents: list[set[int]] = [
        {comp_of[s] for s in support if comp_of[s] in parent_set}
        for support in supports
    ]
    uncovered_global = parent_set - set().union(set(), *own_parents)
    network_sc = is_strongly_connected(Digraph(big_n, u_pattern.entries))
    if uncovered_global:
        return NetworkedReport(
            observable=False,
            method="coverage",
            uncovered_parents=tuple(sorted(uncovered_global)),
            network_strongly_connected=network_sc,
        )

    # parents visible inside each agent's aggregated measurement block
    heard_parents: list[set[int]] = []
    for i in range(big_n):
        visible = set(own_parents[i])
        for (ii, k) in u_pattern.entries:
            if ii == i:
                visible |= own_parents[k]
        heard_parents.append(visible)

    # in the receive graph (edge (i, k): agent i receives from agent k), the
    # nodes with a path TO j are exactly the agents j's information reaches
    receive = Digraph(big_n, u_pattern.entries)
    observable = True
    for j in range(big_n):
        listeners = reverse_reachable(receive, {j})
        visible: set[int] = set()
        for i in listeners:
            visible |= heard_parents[i]
            if visible == parent_set:
                break
        if visible != parent_set:
            observable = False
            break
    return NetworkedReport(
        observable=observable,
        method="coverage",
        uncovered_parents=(),
        network_strongly_connected=network_sc,
    )


def is_networked_observable(
    a_pattern: StructuredMatrix,
    measurement_rows: Sequence[Iterable[int]],
    u_pattern: StructuredMatrix,
) -> bool:
    return networked_report(a_pattern, measurement_rows, u_pattern).observable


def generic_rank_oracle(
    pattern: StructuredMatrix,
    measured_states: Iterable[int],
    trials: int,
    seed: int,
) -> tuple[int, int]:
    """Monte-Carlo observability-rank check over random realizations.

    Each trial draws an independent weight for every pattern entry (magnitude
    uniform on [0.5, 1.5], random sign), takes one unit measurement row per
    measured state, builds the stacked observability matrix with each power
    block row-normalized to avoid overflow, and counts the trials whose
    numeric rank is full.  Deterministic for a fixed seed.
    """
    if not pattern.is_square:
        raise InvalidInputError("generic-rank oracle needs a square pattern")
    if trials < 1:
        raise InvalidInputError("trials must be at least 1")
    n = pattern.rows
    measured = sorted(set(measured_states))
    if any(not (0 <= s < n) for s in measured):
        raise InvalidInputError("measured state out of range")

    positions = sorted(pattern.entries)
    rows_idx = np.array([p[0] for p in positions], dtype=np.intp)
    cols_idx = np.array([p[1] for p in positions], dtype=np.intp)
    eps = np.finfo(float).eps

    if not measured:
        return 0, trials

    c = np.zeros((len(measured), n))
    for k, s in enumerate(measured):
        c[k, s] = 1.0

    children = np.random.SeedSequence(seed).spawn(trials)
    full_rank_trials = 0
    for child in children:
        rng = np.random.default_rng(child)
        a = np.zeros((n, n))
        magnitudes = rng.uniform(0.5, 1.5, size=len(positions))
        signs = rng.integers(0, 2, size=len(positions)) * 2 - 1
        a[rows_idx, cols_idx] = magnitudes * signs

        blocks = [c]
        block = c
        for _ in range(n - 1):
            block = block @ a
            norms = np.linalg.norm(block, axis=1, keepdims=True)
            norms[norms == 0.0] = 1.0
            block = block / norms
            blocks.append(block)
        obs = np.vstack(blocks)
        sv = np.linalg.svd(obs, compute_uv=False)
        tol = n * eps * (sv[0] if sv.size else 0.0)
        rank = int(np.count_nonzero(sv > tol))
        if rank == n:
            full_rank_trials += 1
    return full_rank_trials, trials
