"""Directed graphs, strongly connected components, and the condensation DAG.

Node indices are dense integers in ``[0, node_count)``.  Edges follow the
influence orientation used throughout the toolkit: an edge ``u -> v`` means
state ``u`` feeds state ``v``.  A component with no outgoing condensation
edge is a *parent* component; information originating there never leaves it,
so at least one of its states must be measured directly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvalidInputError, SpecParseError


class Digraph:
    """Immutable directed graph over integer nodes; self-loops allowed."""

    __slots__ = ("node_count", "_edges", "_succ", "_pred")

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int]]):
        if node_count <= 0:
            raise InvalidInputError("digraph needs at least one node")
        edge_set = set()
        for e in edges:
            u, v = e
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise InvalidInputError(
                    f"edge ({u}, {v}) out of range for {node_count} nodes"
                )
            edge_set.add((int(u), int(v)))
        self.node_count = int(node_count)
        self._edges = frozenset(edge_set)
        succ: list[list[int]] = [[] for _ in range(node_count)]
        for u, v in sorted(edge_set):
            succ[u].append(v)
        self._succ = succ
        self._pred: list[list[int]] | None = None

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return self._edges

    def successors(self, v: int) -> Sequence[int]:
        return self._succ[v]

    def predecessors(self, v: int) -> Sequence[int]:
        if self._pred is None:
            pred: list[list[int]] = [[] for _ in range(self.node_count)]
            for u, w in sorted(self._edges):
                pred[w].append(u)
            self._pred = pred
        return self._pred[v]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.node_count == other.node_count and self._edges == other._edges

    def __repr__(self) -> str:
        return f"Digraph(node_count={self.node_count}, edges={len(self._edges)})"


@dataclass(frozen=True)
class SccDecomposition:
    """Partition of a digraph into strongly connected components.

    Components are ordered by their smallest contained node index so that
    repeated runs on the same graph yield identical numbering.  A component
    is flagged as a parent when it has out-degree zero in the condensation.
    """

    components: tuple[tuple[int, ...], ...]
    component_of: tuple[int, ...]
    condensation_edges: frozenset[tuple[int, int]]
    parent_flags: tuple[bool, ...]
    node_count: int = field(default=0)

    def condensation_digraph(self) -> Digraph:
        return Digraph(len(self.components), self.condensation_edges)


def _tarjan(succ: list[list[int]], n: int) -> list[list[int]]:
    # Iterative Tarjan; the explicit work stack holds (node, next-child slot)
    # so graphs far deeper than the interpreter recursion limit are fine.
    unvisited = -1
    index = [unvisited] * n
    low = [0] * n
    on_stack = bytearray(n)
    scc_stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != unvisited:
            continue
        work = [(root, 0)]
        while work:
            v, ptr = work[-1]
            if ptr == 0:
                index[v] = counter
                low[v] = counter
                counter += 1
                scc_stack.append(v)
                on_stack[v] = 1
            descended = False
            nbrs = succ[v]
            lv = low[v]
            for i in range(ptr, len(nbrs)):
                w = nbrs[i]
                iw = index[w]
                if iw == unvisited:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    descended = True
                    break
                if on_stack[w] and iw < lv:
                    lv = iw
            low[v] = lv
            if descended:
                continue
            work.pop()
            if work:
                p = work[-1][0]
                if lv < low[p]:
                    low[p] = lv
            if lv == index[v]:
                comp = []
                while True:
                    w = scc_stack.pop()
                    on_stack[w] = 0
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def scc_decompose(g: Digraph) -> SccDecomposition:
    """Decompose ``g`` into SCCs with condensation edges and parent flags."""
    n = g.node_count
    comps = _tarjan(g._succ, n)
    for comp in comps:
        comp.sort()
    comps.sort(key=lambda c: c[0])

    component_of = [0] * n
    for k, comp in enumerate(comps):
        for v in comp:
            component_of[v] = k

    cond_edges = set()
    for u, v in g.edges:
        cu, cv = component_of[u], component_of[v]
        if cu != cv:
            cond_edges.add((cu, cv))

    out_degree = [0] * len(comps)
    for cu, _cv in cond_edges:
        out_degree[cu] += 1
    parent_flags = tuple(d == 0 for d in out_degree)

    return SccDecomposition(
        components=tuple(tuple(c) for c in comps),
        component_of=tuple(component_of),
        condensation_edges=frozenset(cond_edges),
        parent_flags=parent_flags,
        node_count=n,
    )


def parent_sccs(dec: SccDecomposition) -> list[int]:
    """Indices of parent components, in component order."""
    return [k for k, flag in enumerate(dec.parent_flags) if flag]


def is_strongly_connected(g: Digraph) -> bool:
    return len(scc_decompose(g).components) == 1


def reverse_reachable(g: Digraph, targets: Iterable[int]) -> set[int]:
    """All nodes with a directed path into ``targets`` (targets included)."""
    seen = set()
    queue: deque[int] = deque()
    for t in targets:
        if not (0 <= t < g.node_count):
            raise InvalidInputError(f"target node {t} out of range")
        if t not in seen:
            seen.add(t)
            queue.append(t)
    while queue:
        v = queue.popleft()
        for u in g.predecessors(v):
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return seen


def parse_edge_list(text: str) -> tuple[Digraph, int]:
    """Parse the plain-text edge-list format.

    The first non-comment line must be a header ``nodes <n>``; every other
    line holds one ``source target`` pair of 0-based indices.  Lines starting
    with ``#`` are comments.  Returns the graph and the number of duplicate
    edge lines that were dropped.
    """
    node_count: int | None = None
    edges: set[tuple[int, int]] = set()
    duplicates = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if node_count is None:
            if len(parts) != 2 or parts[0] != "nodes":
                raise SpecParseError(
                    f"line {lineno}: expected header 'nodes <n>', got {line!r}"
                )
            try:
                node_count = int(parts[1])
            except ValueError:
                raise SpecParseError(
                    f"line {lineno}: node count {parts[1]!r} is not an integer"
                ) from None
            if node_count <= 0:
                raise SpecParseError(f"line {lineno}: node count must be positive")
            continue
        if len(parts) != 2:
            raise SpecParseError(
                f"line {lineno}: expected 'source target', got {line!r}"
            )
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise SpecParseError(f"line {lineno}: non-integer edge {line!r}") from None
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise SpecParseError(
                f"line {lineno}: edge ({u}, {v}) out of range for {node_count} nodes"
            )
        if (u, v) in edges:
            duplicates += 1
        else:
            edges.add((u, v))
    if node_count is None:
        raise SpecParseError("missing 'nodes <n>' header line")
    return Digraph(node_count, edges), duplicates


def format_edge_list(g: Digraph) -> str:
    lines = [f"nodes {g.node_count}"]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"
