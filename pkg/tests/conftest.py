from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from netest.digraph import Digraph
from netest.sysmodel import StructuredMatrix

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"
WORKED_EXAMPLE = FIXTURE_DIR / "paper-example.json"

# Published 5x5 agent/parent-component cost matrix of the worked example.
REF_DELTA_CAP = np.array(
    [
        [8.1472, 0.9754, 1.5761, 1.4189, 6.5574],
        [9.0579, 2.7850, 9.7059, 4.2176, 0.3571],
        [1.2699, 5.4688, 9.5717, 9.1574, 8.4913],
        [9.1338, 9.5751, 4.8538, 7.9221, 9.3399],
        [6.3236, 9.6489, 8.0028, 9.5949, 6.7874],
    ]
)

# Published symmetric communication cost matrix (diagonal unused).
REF_ETA = np.array(
    [
        [0.0, 7.2459, 6.0784, 5.4711, 3.3048],
        [7.2459, 0.0, 4.8588, 2.1386, 2.7136],
        [6.0784, 4.8588, 0.0, 8.5787, 3.4038],
        [5.4711, 2.1386, 8.5787, 0.0, 4.4812],
        [3.3048, 2.7136, 3.4038, 4.4812, 0.0],
    ]
)

# Frozen oracle results, computed by exhaustive enumeration (120 permutations
# for the assignment, 125 labeled trees for the network) before the solvers
# were written.
REF_ASSIGNMENT_COST = 17.0511
REF_ASSIGNMENT_PERM = (1, 4, 0, 2, 3)
REF_MST_COST = 11.5608
REF_MST_EDGES = frozenset({(0, 4), (1, 3), (1, 4), (2, 4)})


def fixture_digraph() -> Digraph:
    """18-node system of the shipped example: one child 3-cycle feeding five
    parent 3-cycles, self-loops everywhere."""
    doc = json.loads(WORKED_EXAMPLE.read_text())
    edges = {tuple(e) for e in doc["system"]["edges"]}
    edges |= {(v, v) for v in range(doc["system"]["nodes"])}
    return Digraph(doc["system"]["nodes"], edges)


def fixture_delta() -> np.ndarray:
    doc = json.loads(WORKED_EXAMPLE.read_text())
    return np.array(doc["delta"], dtype=float)


def random_self_damped_pattern(
    rng: np.random.Generator, n: int, extra_edges: int | None = None
) -> StructuredMatrix:
    entries = {(i, i) for i in range(n)}
    if extra_edges is None:
        extra_edges = int(rng.integers(0, 2 * n + 1))
    for _ in range(extra_edges):
        entries.add((int(rng.integers(n)), int(rng.integers(n))))
    return StructuredMatrix.from_entries(n, n, entries)


def random_symmetric_costs(rng: np.random.Generator, n: int) -> np.ndarray:
    m = rng.uniform(0.0, 10.0, size=(n, n))
    m = (m + m.T) / 2.0
    np.fill_diagonal(m, 0.0)
    return m


def random_stable_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    m = rng.standard_normal((n, n))
    shift = max(float(np.real(np.linalg.eigvals(m)).max()), 0.0) + 0.5
    return m - shift * np.eye(n)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240813)
