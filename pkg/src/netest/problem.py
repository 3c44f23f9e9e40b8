"""Problem document parsing shared by the HTTP service and the CLI.

The canonical wire form is a single JSON object::

    {
      "system": {
        "nodes": 18, "edges": [[0, 1], ...],   # influence digraph, or
        "pattern": {"rows": n, "cols": n, "entries": [[r, c], ...]},
        "self_loops_implicit": true
      },
      "delta": [[...], ...] |
               {"agents": N, "default": 1.0, "entries": [[i, j, cost], ...]},
      "eta":   [[...], ...],
      "options": {"tol": null, "allow_extra_agents": false,
                  "oracle_trials": 0, "seed": 0}
    }

Cost cells accept the string "inf" for impossible pairs.  The CLI also
resolves a ``system.edge_list_file`` reference before shipping the document;
the service only accepts inline structures.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .digraph import Digraph, parse_edge_list
from .errors import SpecParseError
from .mccn import CommunicationCosts
from .mcss import MeasurementCosts
from .sysmodel import StructuredMatrix, digraph_to_pattern


@dataclass(frozen=True)
class ProblemOptions:
    tol: float | None = None
    allow_extra_agents: bool = False
    oracle_trials: int = 0
    seed: int = 0


@dataclass(frozen=True)
class Problem:
    a_pattern: StructuredMatrix
    digraph: Digraph
    duplicate_edges: int
    delta: MeasurementCosts | None
    eta: CommunicationCosts | None
    options: ProblemOptions = field(default_factory=ProblemOptions)

    @property
    def state_count(self) -> int:
        return self.a_pattern.rows


def _parse_cost_cell(value, where: str) -> float:
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        raise SpecParseError(f"{where}: cost string {value!r} is not 'inf'")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecParseError(f"{where}: cost {value!r} is not a number")
    v = float(value)
    if math.isnan(v) or v < 0:
        raise SpecParseError(f"{where}: cost must be nonnegative or 'inf', got {v!r}")
    return v


def parse_cost_matrix(doc, where: str) -> np.ndarray:
    if not isinstance(doc, list) or not doc or not all(isinstance(r, list) for r in doc):
        raise SpecParseError(f"{where}: expected a nonempty 2-D array")
    width = len(doc[0])
    rows = []
    for i, row in enumerate(doc):
        if len(row) != width:
            raise SpecParseError(f"{where}: row {i} has {len(row)} cells, expected {width}")
        rows.append([_parse_cost_cell(v, f"{where}[{i}]") for v in row])
    return np.array(rows, dtype=float)


def _parse_delta(doc, state_count: int) -> MeasurementCosts:
    if isinstance(doc, list):
        matrix = parse_cost_matrix(doc, "delta")
    elif isinstance(doc, dict):
        try:
            agents = int(doc["agents"])
        except (KeyError, TypeError, ValueError):
            raise SpecParseError("delta: sparse form needs an integer 'agents'") from None
        if agents <= 0:
            raise SpecParseError("delta: 'agents' must be positive")
        default = _parse_cost_cell(doc.get("default", "inf"), "delta.default")
        matrix = np.full((agents, state_count), default)
        for k, ent in enumerate(doc.get("entries", [])):
            if not (isinstance(ent, list) and len(ent) == 3):
                raise SpecParseError(f"delta.entries[{k}]: expected [agent, state, cost]")
            i, j = ent[0], ent[1]
            if not (isinstance(i, int) and isinstance(j, int)):
                raise SpecParseError(f"delta.entries[{k}]: indices must be integers")
            if not (0 <= i < agents and 0 <= j < state_count):
                raise SpecParseError(f"delta.entries[{k}]: index ({i}, {j}) out of range")
            matrix[i, j] = _parse_cost_cell(ent[2], f"delta.entries[{k}]")
    else:
        raise SpecParseError("delta: expected a 2-D array or a sparse object")
    if matrix.shape[1] != state_count:
        raise SpecParseError(
            f"delta covers {matrix.shape[1]} states but the system has {state_count}"
        )
    return MeasurementCosts(matrix)


def _parse_system(doc, base_dir: Path | None) -> tuple[Digraph, int, bool]:
    if not isinstance(doc, dict):
        raise SpecParseError("system: expected an object")
    implicit = doc.get("self_loops_implicit", True)
    if not isinstance(implicit, bool):
        raise SpecParseError("system.self_loops_implicit must be a boolean")

    forms = [k for k in ("edges", "pattern", "edge_list_file") if k in doc]
    if len(forms) != 1:
        raise SpecParseError(
            "system: provide exactly one of 'edges', 'pattern', 'edge_list_file'"
        )
    duplicates = 0
    if "edge_list_file" in doc:
        if base_dir is None:
            raise SpecParseError(
                "system.edge_list_file is only resolvable from a file-based spec"
            )
        path = (base_dir / doc["edge_list_file"]).resolve()
        try:
            text = path.read_text()
        except OSError as exc:
            raise SpecParseError(f"system.edge_list_file: cannot read {path}: {exc}") from exc
        g, duplicates = parse_edge_list(text)
    elif "edges" in doc:
        nodes = doc.get("nodes")
        if not isinstance(nodes, int) or nodes <= 0:
            raise SpecParseError("system.nodes must be a positive integer")
        edges = doc["edges"]
        if not isinstance(edges, list):
            raise SpecParseError("system.edges must be a list of [source, target] pairs")
        seen = set()
        for k, e in enumerate(edges):
            if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
                raise SpecParseError(f"system.edges[{k}]: expected [source, target]")
            t = (e[0], e[1])
            if not (0 <= t[0] < nodes and 0 <= t[1] < nodes):
                raise SpecParseError(f"system.edges[{k}]: edge {t} out of range")
            if t in seen:
                duplicates += 1
            seen.add(t)
        g = Digraph(nodes, seen)
    else:
        p = doc["pattern"]
        try:
            pattern = StructuredMatrix.from_entries(
                int(p["rows"]), int(p["cols"]), [tuple(e) for e in p["entries"]]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecParseError(f"system.pattern: {exc}") from exc
        if not pattern.is_square:
            raise SpecParseError("system.pattern must be square")
        # pattern rows are target states: entry (i, j) is the edge j -> i
        g = Digraph(pattern.rows, ((j, i) for (i, j) in pattern.entries))
    carried = doc.get("duplicate_edges_dropped", 0)
    if not isinstance(carried, int) or carried < 0:
        raise SpecParseError("system.duplicate_edges_dropped must be a nonnegative integer")
    duplicates += carried
    if implicit:
        g = Digraph(g.node_count, set(g.edges) | {(v, v) for v in range(g.node_count)})
    return g, duplicates, implicit


def _parse_options(doc) -> ProblemOptions:
    if doc is None:
        return ProblemOptions()
    if not isinstance(doc, dict):
        raise SpecParseError("options: expected an object")
    tol = doc.get("tol")
    if tol is not None:
        if not isinstance(tol, (int, float)) or isinstance(tol, bool) or tol < 0:
            raise SpecParseError("options.tol must be a nonnegative number")
        tol = float(tol)
    allow = doc.get("allow_extra_agents", False)
    if not isinstance(allow, bool):
        raise SpecParseError("options.allow_extra_agents must be a boolean")
    trials = doc.get("oracle_trials", 0)
    if not isinstance(trials, int) or trials < 0:
        raise SpecParseError("options.oracle_trials must be a nonnegative integer")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise SpecParseError("options.seed must be an integer")
    return ProblemOptions(tol=tol, allow_extra_agents=allow, oracle_trials=trials, seed=seed)


def problem_from_dict(doc: dict, base_dir: Path | None = None) -> Problem:
    if not isinstance(doc, dict):
        raise SpecParseError("problem document must be a JSON object")
    if "system" not in doc:
        raise SpecParseError("problem document is missing 'system'")
    g, duplicates, _ = _parse_system(doc["system"], base_dir)
    a_pattern = digraph_to_pattern(g)

    options = _parse_options(doc.get("options"))

    delta = None
    if doc.get("delta") is not None:
        delta = _parse_delta(doc["delta"], g.node_count)

    eta = None
    if doc.get("eta") is not None:
        matrix = parse_cost_matrix(doc["eta"], "eta")
        kwargs = {} if options.tol is None else {"symmetry_tol": options.tol}
        # raises UnsupportedStructureError if directed beyond tolerance
        eta = CommunicationCosts(matrix, **kwargs)

    if delta is not None and eta is not None and eta.agent_count != delta.agent_count:
        raise SpecParseError(
            f"eta covers {eta.agent_count} agents but delta covers {delta.agent_count}"
        )
    return Problem(
        a_pattern=a_pattern,
        digraph=g,
        duplicate_edges=duplicates,
        delta=delta,
        eta=eta,
        options=options,
    )


def load_problem(path: str | Path) -> Problem:
    """Load a problem JSON file, resolving file references relative to it."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise SpecParseError(f"cannot read {p}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(
            f"{p}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return problem_from_dict(doc, base_dir=p.parent)


def inline_problem_dict(path: str | Path) -> dict:
    """Load a problem file and inline any file references (for HTTP transport)."""
    p = Path(path)
    try:
        doc = json.loads(p.read_text())
    except OSError as exc:
        raise SpecParseError(f"cannot read {p}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecParseError(
            f"{p}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if isinstance(doc, dict) and isinstance(doc.get("system"), dict):
        system = dict(doc["system"])
        if "edge_list_file" in system:
            ref = (p.parent / system.pop("edge_list_file")).resolve()
            try:
                g, dups = parse_edge_list(ref.read_text())
            except OSError as exc:
                raise SpecParseError(f"cannot read {ref}: {exc}") from exc
            system["nodes"] = g.node_count
            system["edges"] = [list(e) for e in sorted(g.edges)]
            if dups:
                system["duplicate_edges_dropped"] = dups
            doc = dict(doc)
            doc["system"] = system
    return doc
