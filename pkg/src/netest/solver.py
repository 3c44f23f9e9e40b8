"""End-to-end design pipeline: decompose, assign sensors, build the network,
and verify the result before emitting it.

The two cost terms are independent once the system is decomposed, so the
pipeline minimizes them separately (sensor assignment over parent components,
spanning tree over agents) and the sum is the global optimum.  Every emitted
solution embeds its own observability verification; a failed verification
aborts the solve because the construction guarantees it should never happen.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .digraph import SccDecomposition, parent_sccs, scc_decompose
from .errors import InvalidInputError, UnsupportedStructureError, VerificationError
from .mccn import CommunicationCosts, NetworkDesign, minimum_spanning_tree, tree_to_network
from .mcss import (
    MeasurementCosts,
    assignment_to_measurement,
    hungarian,
    reduce_costs,
)
from .observability import NetworkedReport, generic_rank_oracle, networked_report
from .sysmodel import (
    StructuredMatrix,
    build_networked_structure,
    missing_self_loops,
    pattern_to_digraph,
)

SCHEMA_VERSION = "netest/v1"


@dataclass(frozen=True)
class DesignSolution:
    measurement_pattern: StructuredMatrix
    network_pattern: StructuredMatrix
    tree_edges: tuple[tuple[int, int], ...]
    tree_edge_costs: tuple[float, ...]
    measurement_cost: float
    communication_cost: float
    total_cost: float
    verification: NetworkedReport
    analysis: dict
    assignment: dict
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "measurement_pattern": self.measurement_pattern.to_json_dict(),
            "measurement_triplets": [
                [r, c, 1.0] for r, c in sorted(self.measurement_pattern.entries)
            ],
            "network_pattern": self.network_pattern.to_json_dict(),
            "tree_edges": [list(e) for e in self.tree_edges],
            "tree_edge_costs": list(self.tree_edge_costs),
            "measurement_cost": self.measurement_cost,
            "communication_cost": self.communication_cost,
            "total_cost": self.total_cost,
            "verification": self.verification.to_json_dict(),
            "analysis": self.analysis,
            "assignment": self.assignment,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return canonical_json(self.to_json_dict())


def canonical_json(doc: dict) -> str:
    """Deterministic serialization: sorted keys, shortest exact float form."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _analysis_summary(dec: SccDecomposition, duplicate_edges: int = 0) -> dict:
    parents = parent_sccs(dec)
    return {
        "node_count": dec.node_count,
        "scc_count": len(dec.components),
        "parent_count": len(parents),
        "min_agents": len(parents),
        "parents": [
            {"component": k, "members": list(dec.components[k])} for k in parents
        ],
        "duplicate_edges": duplicate_edges,
    }


def measurement_rows_of(pattern: StructuredMatrix) -> list[set[int]]:
    rows: list[set[int]] = [set() for _ in range(pattern.rows)]
    for r, c in pattern.entries:
        rows[r].add(c)
    return rows


def solve_mcne(
    a_pattern: StructuredMatrix,
    costs: MeasurementCosts,
    comm: CommunicationCosts,
    allow_extra_agents: bool = False,
) -> DesignSolution:
    """Compute the cheapest verified design for a self-damped system."""
    if not a_pattern.is_square:
        raise InvalidInputError("system pattern must be square")
    missing = missing_self_loops(a_pattern)
    if missing:
        raise UnsupportedStructureError(
            "the design pipeline requires a self-loop on every state node; "
            f"missing diagonal entries: {missing}"
        )
    n = a_pattern.rows
    if costs.state_count != n:
        raise InvalidInputError(
            f"measurement costs cover {costs.state_count} states, system has {n}"
        )
    big_n = costs.agent_count
    if comm.agent_count != big_n:
        raise InvalidInputError(
            f"communication costs cover {comm.agent_count} agents, "
            f"measurement costs cover {big_n}"
        )

    dec = scc_decompose(pattern_to_digraph(a_pattern))
    reduced = reduce_costs(costs, dec, allow_extra_agents=allow_extra_agents)
    assignment = hungarian(reduced.delta_cap)
    c_pattern = assignment_to_measurement(assignment, reduced)

    if big_n == 1:
        design = NetworkDesign(
            edges=frozenset(), total_cost=0.0, connected=True, agent_count=1
        )
    else:
        design = minimum_spanning_tree(comm)
    u_pattern = tree_to_network(design, big_n)

    verification = networked_report(
        a_pattern, measurement_rows_of(c_pattern), u_pattern
    )
    if not verification.observable:
        raise VerificationError(
            "internal error: the designed measurement/network pair failed its "
            "observability verification"
        )

    notes: list[str] = []
    if reduced.dummy_columns:
        surplus = [
            i
            for i, j in enumerate(assignment.col_of_row)
            if j in reduced.dummy_columns
        ]
        notes.append(
            f"surplus agents {surplus} take no measurement (padded assignment)"
        )

    measurement_cost = assignment.total_cost
    communication_cost = design.total_cost
    sorted_edges = design.sorted_edges()
    return DesignSolution(
        measurement_pattern=c_pattern,
        network_pattern=u_pattern,
        tree_edges=tuple(sorted_edges),
        tree_edge_costs=tuple(float(comm.eta[a, b]) for a, b in sorted_edges),
        measurement_cost=measurement_cost,
        communication_cost=communication_cost,
        total_cost=measurement_cost + communication_cost,
        verification=verification,
        analysis=_analysis_summary(dec),
        assignment={
            "agent_to_parent_component": [
                int(reduced.parent_components[j]) if j < len(reduced.parent_components) else None
                for j in assignment.col_of_row
            ],
            "agent_to_reduced_column": [int(j) for j in assignment.col_of_row],
            "measured_state": [
                int(reduced.argmin_state[i, j]) if j not in reduced.dummy_columns else None
                for i, j in enumerate(assignment.col_of_row)
            ],
            "reduced_costs": [
                [float(x) if math.isfinite(x) else "inf" for x in row]
                for row in reduced.delta_cap
            ],
        },
        notes=tuple(notes),
    )


def verify_solution(
    a_pattern: StructuredMatrix,
    measurement_pattern: StructuredMatrix,
    network_pattern: StructuredMatrix,
    oracle_trials: int = 0,
    seed: int = 0,
) -> tuple[NetworkedReport, tuple[int, int] | None]:
    """Re-verify a stored or external design against a system pattern.

    With ``oracle_trials`` > 0 the structural verdict is complemented by the
    Monte-Carlo rank oracle on the networked pattern.
    """
    if not a_pattern.is_square:
        raise InvalidInputError("system pattern must be square")
    n = a_pattern.rows
    if measurement_pattern.cols != n:
        raise InvalidInputError(
            f"measurement pattern covers {measurement_pattern.cols} states, "
            f"system has {n}"
        )
    if network_pattern.rows != measurement_pattern.rows:
        raise InvalidInputError(
            f"network pattern covers {network_pattern.rows} agents, "
            f"measurement pattern has {measurement_pattern.rows} rows"
        )
    rows = measurement_rows_of(measurement_pattern)
    report = networked_report(a_pattern, rows, network_pattern)
    tally = None
    if oracle_trials > 0:
        net = build_networked_structure(a_pattern, rows, network_pattern)
        tally = generic_rank_oracle(
            net.kron_pattern,
            net.measured_networked_states(),
            trials=oracle_trials,
            seed=seed,
        )
    return report, tally


def solution_from_json_dict(doc: dict) -> tuple[StructuredMatrix, StructuredMatrix]:
    """Extract (measurement pattern, network pattern) from a solution document."""
    try:
        if doc.get("schema") != SCHEMA_VERSION:
            raise InvalidInputError(
                f"unsupported solution schema {doc.get('schema')!r}, "
                f"expected {SCHEMA_VERSION!r}"
            )
        mp = doc["measurement_pattern"]
        np_ = doc["network_pattern"]
        measurement = StructuredMatrix.from_entries(
            mp["rows"], mp["cols"], [tuple(e) for e in mp["entries"]]
        )
        network = StructuredMatrix.from_entries(
            np_["rows"], np_["cols"], [tuple(e) for e in np_["entries"]]
        )
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed solution document: {exc}") from exc
    return measurement, network


__all__ = [
    "SCHEMA_VERSION",
    "DesignSolution",
    "canonical_json",
    "measurement_rows_of",
    "solve_mcne",
    "solution_from_json_dict",
    "verify_solution",
]
