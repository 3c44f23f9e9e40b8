"""Exception hierarchy shared by the core solvers, the service, and the CLI.

Every error carries a stable machine code so the HTTP layer and the CLI can
map failures to status codes / exit codes without string matching.
"""

from __future__ import annotations


class NetestError(Exception):
    """Base class for all toolkit errors."""

    code = "internal"


class InvalidInputError(NetestError):
    """Malformed or inconsistent input values (bad dimensions, bad indices)."""

    code = "parse"


class SpecParseError(InvalidInputError):
    """A problem file or JSON document failed to parse or validate."""

    code = "parse"


class UnsupportedStructureError(NetestError):
    """The input falls outside the supported problem class.

    Raised for system patterns without a complete diagonal (the solvers
    require a self-loop on every state node) and for directed communication
    cost matrices (the directed network design problem is NP-hard and no
    approximation is shipped).
    """

    code = "unsupported-structure"


class InfeasibleError(NetestError):
    """The instance is valid but has no solution (or a singular factor)."""

    code = "infeasible"


class SingularMatrixError(InfeasibleError):
    """A required matrix factorization hit a singular matrix."""

    code = "singular"


class VerificationError(NetestError):
    """An emitted design failed its own observability verification.

    This indicates an internal bug: the pipeline's constructions are
    guaranteed to verify, so a failure here must abort without output.
    """

    code = "verification"


class CertificateError(NetestError):
    """An optimality certificate check failed after a solve (internal bug)."""

    code = "certificate"
