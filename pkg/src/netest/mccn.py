"""Minimum-cost communication network for bidirectional links.

With symmetric link costs the cheapest strongly connected network is a
minimum-weight spanning tree (every link is used in both directions).  A
spanning-forest variant covers relaxed setups where the feasible-link graph
is allowed to stay disconnected.  Directed (asymmetric) cost matrices are
rejected outright: the directed variant is NP-hard and out of scope.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError, InvalidInputError, UnsupportedStructureError
from .sysmodel import StructuredMatrix

SYMMETRY_RTOL = 1e-9


def check_symmetric(
    eta: np.ndarray, tol: float = SYMMETRY_RTOL
) -> tuple[bool, tuple[int, int] | None]:
    """Symmetry verdict; returns the first violating (i, j) if any."""
    m = np.asarray(eta, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError("communication cost matrix must be square")
    n = m.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            a, b = m[i, j], m[j, i]
            if math.isinf(a) and math.isinf(b):
                continue
            if math.isinf(a) or math.isinf(b):
                return False, (i, j)
            if abs(a - b) > tol * max(1.0, abs(a)):
                return False, (i, j)
    return True, None


@dataclass(frozen=True)
class CommunicationCosts:
    """Symmetric per-link cost matrix; +inf marks an infeasible link.

    The diagonal is ignored (self-communication is free by convention).
    Asymmetric input is rejected because cost-minimal design over directed
    links is NP-hard and this toolkit ships no approximation for it.
    """

    eta: np.ndarray
    symmetry_tol: float = field(default=SYMMETRY_RTOL, compare=False)

    def __post_init__(self) -> None:
        m = np.asarray(self.eta, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.size == 0:
            raise InvalidInputError("communication cost matrix must be square")
        off = ~np.eye(m.shape[0], dtype=bool)
        if np.any(np.isnan(m[off])) or np.any(m[off] < 0):
            raise InvalidInputError("communication costs must be nonnegative or +inf")
        ok, violation = check_symmetric(m, self.symmetry_tol)
        if not ok:
            i, j = violation
            raise UnsupportedStructureError(
                f"communication costs are directed (eta[{i}][{j}]={m[i, j]!r} != "
                f"eta[{j}][{i}]={m[j, i]!r}); the directed network design problem "
                "is NP-hard and only bidirectional links are supported"
            )
        object.__setattr__(self, "eta", m.copy())

    @property
    def agent_count(self) -> int:
        return self.eta.shape[0]

    def finite_edges(self) -> list[tuple[float, int, int]]:
        """Sorted (weight, a, b) with a < b over finite off-diagonal costs."""
        n = self.agent_count
        edges = [
            (float(self.eta[i, j]), i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if math.isfinite(self.eta[i, j])
        ]
        edges.sort()
        return edges


@dataclass(frozen=True)
class NetworkDesign:
    """Chosen bidirectional links; a tree when ``connected`` is true."""

    edges: frozenset[tuple[int, int]]
    total_cost: float
    connected: bool
    agent_count: int

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_json_dict(self, costs: CommunicationCosts | None = None) -> dict:
        out: dict = {
            "edges": [list(e) for e in self.sorted_edges()],
            "total_cost": self.total_cost,
            "connected": self.connected,
            "agent_count": self.agent_count,
        }
        if costs is not None:
            out["edge_costs"] = [
                float(costs.eta[a, b]) for a, b in self.sorted_edges()
            ]
        return out


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def _finite_components(costs: CommunicationCosts) -> list[list[int]]:
    uf = _UnionFind(costs.agent_count)
    for _, a, b in costs.finite_edges():
        uf.union(a, b)
    groups: dict[int, list[int]] = {}
    for v in range(costs.agent_count):
        groups.setdefault(uf.find(v), []).append(v)
    return sorted(groups.values(), key=lambda g: g[0])


def _edge_set_cost(eta: np.ndarray, edges) -> float:
    # canonical summation order (sorted endpoints) so that any two routines
    # selecting the same edge set report bit-identical totals
    return float(sum(eta[a, b] for a, b in sorted(edges)))


def _kruskal(costs: CommunicationCosts) -> tuple[set[tuple[int, int]], float]:
    uf = _UnionFind(costs.agent_count)
    chosen: set[tuple[int, int]] = set()
    for w, a, b in costs.finite_edges():
        if uf.union(a, b):
            chosen.add((a, b))
    return chosen, _edge_set_cost(costs.eta, chosen)


def minimum_spanning_tree(costs: CommunicationCosts) -> NetworkDesign:
    """Kruskal over the finite-cost links; ties broken by edge index order."""
    components = _finite_components(costs)
    if len(components) > 1:
        raise InfeasibleError(
            "the finite-cost link graph is disconnected; components: "
            f"{components}; use the spanning-forest mode for partial networks"
        )
    chosen, total = _kruskal(costs)
    return NetworkDesign(
        edges=frozenset(chosen),
        total_cost=total,
        connected=True,
        agent_count=costs.agent_count,
    )


def minimum_spanning_forest(costs: CommunicationCosts) -> NetworkDesign:
    """Per-component minimum spanning trees; never fails on disconnection."""
    components = _finite_components(costs)
    chosen, total = _kruskal(costs)
    return NetworkDesign(
        edges=frozenset(chosen),
        total_cost=total,
        connected=len(components) == 1,
        agent_count=costs.agent_count,
    )


def _prufer_tree(seq: tuple[int, ...], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[leaf] -= 1
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    a, b = [v for v in range(n) if degree[v] == 1]
    edges.append((a, b))
    return edges


def brute_force_mst(costs: CommunicationCosts) -> tuple[float, NetworkDesign]:
    """Exhaustive spanning-tree oracle via Prufer-sequence enumeration."""
    n = costs.agent_count
    if n > 7:
        raise InvalidInputError("brute-force spanning tree is limited to 7 agents")
    if len(_finite_components(costs)) > 1:
        raise InfeasibleError("finite-cost link graph is disconnected")
    if n == 1:
        design = NetworkDesign(frozenset(), 0.0, True, 1)
        return 0.0, design
    best: tuple[float, list[tuple[int, int]]] | None = None
    for seq in itertools.product(range(n), repeat=max(n - 2, 0)):
        edges = _prufer_tree(seq, n)
        if any(not math.isfinite(costs.eta[a, b]) for a, b in edges):
            continue
        key = sorted(edges)
        cost = _edge_set_cost(costs.eta, key)
        if best is None or cost < best[0] or (cost == best[0] and key < best[1]):
            best = (cost, key)
    if best is None:
        raise InfeasibleError("no spanning tree avoids the infinite-cost links")
    design = NetworkDesign(
        edges=frozenset(best[1]), total_cost=best[0], connected=True, agent_count=n
    )
    return best[0], design


def tree_to_network(design: NetworkDesign, agent_count: int) -> StructuredMatrix:
    """Symmetric network pattern of the design, diagonal always included."""
    if agent_count < design.agent_count:
        raise InvalidInputError("agent_count smaller than the design's agent count")
    entries = {(i, i) for i in range(agent_count)}
    for a, b in design.edges:
        entries.add((a, b))
        entries.add((b, a))
    return StructuredMatrix.from_entries(agent_count, agent_count, entries)
