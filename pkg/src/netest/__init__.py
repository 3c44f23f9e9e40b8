"""netest: minimum-cost networked estimation design for self-damped systems.

The core package decomposes a system digraph into strongly connected
components, assigns the cheapest sensor to each parent component via a
linear assignment solve, designs the agent network as a minimum spanning
tree, and verifies networked observability of the result both structurally
and with a Monte-Carlo generic-rank oracle.
"""

from .digraph import (
    Digraph,
    SccDecomposition,
    is_strongly_connected,
    parent_sccs,
    parse_edge_list,
    reverse_reachable,
    scc_decompose,
)
from .errors import (
    CertificateError,
    InfeasibleError,
    InvalidInputError,
    NetestError,
    SingularMatrixError,
    SpecParseError,
    UnsupportedStructureError,
    VerificationError,
)
from .mccn import (
    CommunicationCosts,
    NetworkDesign,
    brute_force_mst,
    check_symmetric,
    minimum_spanning_forest,
    minimum_spanning_tree,
    tree_to_network,
)
from .mcss import (
    Assignment,
    MeasurementCosts,
    ReducedCosts,
    assignment_to_measurement,
    brute_force_assignment,
    hungarian,
    reduce_costs,
)
from .observability import (
    NetworkedReport,
    ObservabilityReport,
    generic_rank_oracle,
    is_networked_observable,
    is_structurally_observable,
    output_connected,
    parent_scc_coverage,
    structural_rank,
)
from .solver import (
    SCHEMA_VERSION,
    DesignSolution,
    solve_mcne,
    verify_solution,
)
from .sysmodel import (
    ContinuousSystem,
    NetworkedStructure,
    StructuredMatrix,
    build_networked_structure,
    digraph_to_pattern,
    euler_discretize,
    is_self_damped,
    pattern_to_digraph,
    structure_of,
    tustin_discretize,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "CertificateError",
    "CommunicationCosts",
    "ContinuousSystem",
    "DesignSolution",
    "Digraph",
    "InfeasibleError",
    "InvalidInputError",
    "MeasurementCosts",
    "NetestError",
    "NetworkDesign",
    "NetworkedReport",
    "NetworkedStructure",
    "ObservabilityReport",
    "ReducedCosts",
    "SCHEMA_VERSION",
    "SccDecomposition",
    "SingularMatrixError",
    "SpecParseError",
    "StructuredMatrix",
    "UnsupportedStructureError",
    "VerificationError",
    "assignment_to_measurement",
    "brute_force_assignment",
    "brute_force_mst",
    "build_networked_structure",
    "check_symmetric",
    "digraph_to_pattern",
    "euler_discretize",
    "generic_rank_oracle",
    "hungarian",
    "is_networked_observable",
    "is_self_damped",
    "is_strongly_connected",
    "is_structurally_observable",
    "minimum_spanning_forest",
    "minimum_spanning_tree",
    "output_connected",
    "parent_scc_coverage",
    "parent_sccs",
    "parse_edge_list",
    "pattern_to_digraph",
    "reduce_costs",
    "reverse_reachable",
    "scc_decompose",
    "solve_mcne",
    "structural_rank",
    "structure_of",
    "tree_to_network",
    "tustin_discretize",
    "verify_solution",
]
