from __future__ import annotations

import itertools

import numpy as np
import pytest

from netest.digraph import (
    Digraph,
    format_edge_list,
    is_strongly_connected,
    parent_sccs,
    parse_edge_list,
    reverse_reachable,
    scc_decompose,
)
from netest.errors import InvalidInputError, SpecParseError

from conftest import fixture_digraph


def test_single_self_loop_is_its_own_parent():
    dec = scc_decompose(Digraph(1, {(0, 0)}))
    assert dec.components == ((0,),)
    assert dec.parent_flags == (True,)
    assert parent_sccs(dec) == [0]


def test_cycle_with_incoming_child():
    # 3-cycle {0,1,2} plus node 3 feeding into it: the cycle is the parent
    g = Digraph(4, {(0, 1), (1, 2), (2, 0), (3, 0)})
    dec = scc_decompose(g)
    assert dec.components == ((0, 1, 2), (3,))
    assert dec.parent_flags == (True, False)
    assert dec.condensation_edges == frozenset({(1, 0)})


def test_fixture_has_six_components_five_parents():
    dec = scc_decompose(fixture_digraph())
    assert len(dec.components) == 6
    assert len(parent_sccs(dec)) == 5
    assert dec.parent_flags == (False, True, True, True, True, True)


def test_parent_sccs_of_strongly_connected_graph():
    g = Digraph(4, {(0, 1), (1, 2), (2, 3), (3, 0)})
    assert parent_sccs(scc_decompose(g)) == [0]


def test_is_strongly_connected():
    assert is_strongly_connected(Digraph(4, {(0, 1), (1, 2), (2, 3), (3, 0)}))
    assert not is_strongly_connected(Digraph(2, {(0, 1)}))


def test_worked_example_tree_bidirected_is_strongly_connected():
    tree = {(0, 4), (1, 4), (2, 4), (1, 3)}
    edges = tree | {(b, a) for a, b in tree}
    assert is_strongly_connected(Digraph(5, edges))


def test_reverse_reachable_chain():
    g = Digraph(3, {(0, 1), (1, 2)})
    assert reverse_reachable(g, {2}) == {0, 1, 2}
    assert reverse_reachable(g, {0}) == {0}


def test_reverse_reachable_disjoint_self_loops():
    g = Digraph(2, {(0, 0), (1, 1)})
    assert reverse_reachable(g, {0}) == {0}


def test_reverse_reachable_empty_targets():
    g = Digraph(3, {(0, 1)})
    assert reverse_reachable(g, set()) == set()


def test_empty_graph_rejected():
    with pytest.raises(InvalidInputError):
        Digraph(0, set())


def test_out_of_range_edge_rejected():
    with pytest.raises(InvalidInputError):
        Digraph(2, {(0, 2)})


def test_condensation_is_a_dag_of_singletons():
    rng = np.random.default_rng(7)
    for _ in range(30):
        n = int(rng.integers(2, 11))
        edges = {
            (int(rng.integers(n)), int(rng.integers(n)))
            for _ in range(int(rng.integers(1, 3 * n)))
        }
        dec = scc_decompose(Digraph(n, edges))
        cond = dec.condensation_digraph()
        again = scc_decompose(cond)
        assert all(len(c) == 1 for c in again.components)


def test_partition_and_parent_existence():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(1, 12))
        edges = {
            (int(rng.integers(n)), int(rng.integers(n)))
            for _ in range(int(rng.integers(0, 3 * n)))
        }
        dec = scc_decompose(Digraph(n, edges))
        assert sum(len(c) for c in dec.components) == n
        seen = sorted(v for c in dec.components for v in c)
        assert seen == list(range(n))
        for k, comp in enumerate(dec.components):
            assert all(dec.component_of[v] == k for v in comp)
        assert parent_sccs(dec), "every finite digraph has a parent component"


def _transitive_closure(n: int, edges: set[tuple[int, int]]) -> list[list[bool]]:
    reach = [[i == j for j in range(n)] for i in range(n)]
    for u, v in edges:
        reach[u][v] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return reach


def test_components_match_mutual_reachability_bruteforce():
    # Floyd-Warshall closure as the independent oracle
    rng = np.random.default_rng(13)
    for _ in range(60):
        n = int(rng.integers(1, 11))
        edges = {
            (int(rng.integers(n)), int(rng.integers(n)))
            for _ in range(int(rng.integers(0, 2 * n + 2)))
        }
        dec = scc_decompose(Digraph(n, edges))
        reach = _transitive_closure(n, edges)
        for i, j in itertools.combinations(range(n), 2):
            together = dec.component_of[i] == dec.component_of[j]
            mutual = reach[i][j] and reach[j][i]
            assert together == mutual


def test_reachability_consistency_with_condensation_order():
    rng = np.random.default_rng(17)
    for _ in range(20):
        n = int(rng.integers(2, 10))
        edges = {
            (int(rng.integers(n)), int(rng.integers(n)))
            for _ in range(int(rng.integers(0, 3 * n)))
        }
        g = Digraph(n, edges)
        dec = scc_decompose(g)
        cond_reach = _transitive_closure(len(dec.components), set(dec.condensation_edges))
        for p in parent_sccs(dec):
            members = set(dec.components[p])
            for v in reverse_reachable(g, members):
                cv = dec.component_of[v]
                assert cv == p or cond_reach[cv][p]


def test_deterministic_component_order():
    g = Digraph(5, {(4, 3), (3, 4), (1, 0), (0, 1), (2, 2)})
    dec = scc_decompose(g)
    assert dec.components == ((0, 1), (2,), (3, 4))


def test_parse_edge_list_roundtrip():
    text = "# system\nnodes 4\n0 1\n1 2\n2 0\n3 0\n3 0\n"
    g, dups = parse_edge_list(text)
    assert g.node_count == 4
    assert g.edges == frozenset({(0, 1), (1, 2), (2, 0), (3, 0)})
    assert dups == 1
    g2, dups2 = parse_edge_list(format_edge_list(g))
    assert g2 == g and dups2 == 0


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("0 1\n", "line 1"),
        ("nodes x\n", "not an integer"),
        ("nodes 2\n0\n", "line 2"),
        ("nodes 2\n0 5\n", "out of range"),
        ("# only comments\n", "missing"),
    ],
)
def test_parse_edge_list_errors(text, fragment):
    with pytest.raises(SpecParseError, match=fragment):
        parse_edge_list(text)
