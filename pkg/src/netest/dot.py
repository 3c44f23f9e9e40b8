"""DOT renderings of the system digraph and the designed agent network."""

from __future__ import annotations

from .digraph import Digraph, SccDecomposition, parent_sccs


def system_dot(
    g: Digraph,
    dec: SccDecomposition,
    measured_states: set[int] | None = None,
) -> str:
    """System digraph with parent components as dashed clusters.

    Measured states get a doublecircle shape; self-loops are drawn.
    """
    measured = measured_states or set()
    lines = ["digraph system {", "  rankdir=LR;", "  node [shape=circle];"]
    parents = set(parent_sccs(dec))
    for k, comp in enumerate(dec.components):
        if k in parents:
            lines.append(f"  subgraph cluster_parent_{k} {{")
            lines.append('    style=dashed; color=blue; label="parent";')
            for v in comp:
                shape = ' [shape=doublecircle]' if v in measured else ""
                lines.append(f"    {v}{shape};")
            lines.append("  }")
        else:
            for v in comp:
                shape = ' [shape=doublecircle]' if v in measured else ""
                lines.append(f"  {v}{shape};")
    for u, v in sorted(g.edges):
        lines.append(f"  {u} -> {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def network_dot(tree_edges: list[tuple[int, int]], agent_count: int) -> str:
    """Undirected rendering of the designed communication tree."""
    lines = ["graph network {", "  node [shape=box];"]
    for i in range(agent_count):
        lines.append(f"  a{i} [label=\"agent {i}\"];")
    for a, b in sorted(tree_edges):
        lines.append(f"  a{a} -- a{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
