"""FastAPI service exposing the design toolkit as JSON endpoints.

Domain failures map to structured error bodies: HTTP 400 for parse problems,
409 for infeasible instances (including singular discretization factors),
and 422 for inputs outside the supported problem class.  A verification
verdict of "not observable" is a normal 200 response, not an error.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..digraph import parent_sccs, scc_decompose
from ..errors import InvalidInputError, NetestError
from ..observability import generic_rank_oracle, is_structurally_observable
from ..problem import problem_from_dict
from ..solver import (
    SCHEMA_VERSION,
    solution_from_json_dict,
    solve_mcne,
    verify_solution,
)
from ..sysmodel import (
    ContinuousSystem,
    euler_discretize,
    missing_self_loops,
    structure_of,
    tustin_discretize,
)
from .models import (
    AnalyzeRequest,
    AnalyzeResponse,
    DesignRequest,
    DesignResponse,
    DiscretizeRequest,
    DiscretizeResponse,
    HealthResponse,
    OracleRequest,
    OracleResponse,
    VerifyRequest,
    VerifyResponse,
)

app = FastAPI(
    title="netest",
    description="Minimum-cost networked estimation design service",
    version=__version__,
)

_STATUS_BY_CODE = {
    "parse": 400,
    "infeasible": 409,
    "singular": 409,
    "unsupported-structure": 422,
}


def _http_error(exc: NetestError) -> HTTPException:
    status = _STATUS_BY_CODE.get(exc.code, 500)
    return HTTPException(
        status_code=status, detail={"code": exc.code, "message": str(exc)}
    )


def _problem_from(payload_system, delta=None, eta=None, options=None):
    doc: dict = {"system": payload_system.model_dump(exclude_none=True)}
    if delta is not None:
        doc["delta"] = delta if isinstance(delta, list) else delta.model_dump()
    if eta is not None:
        doc["eta"] = eta
    if options is not None:
        doc["options"] = options.model_dump()
    return problem_from_dict(doc)


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", schema_version=SCHEMA_VERSION, version=__version__)


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(req: AnalyzeRequest) -> AnalyzeResponse:
    try:
        problem = _problem_from(req.system)
        dec = scc_decompose(problem.digraph)
        parents = parent_sccs(dec)
        missing = missing_self_loops(problem.a_pattern)
    except NetestError as exc:
        raise _http_error(exc) from exc
    return AnalyzeResponse(
        node_count=problem.digraph.node_count,
        edge_count=len(problem.digraph.edges),
        duplicate_edges=problem.duplicate_edges,
        scc_count=len(dec.components),
        parent_count=len(parents),
        min_agents=len(parents),
        self_damped=not missing,
        missing_self_loops=missing,
        parents=[
            {"component": k, "members": list(dec.components[k])} for k in parents
        ],
        components=[list(c) for c in dec.components],
    )


@app.post("/design", response_model=DesignResponse)
def design(req: DesignRequest) -> DesignResponse:
    try:
        problem = _problem_from(req.system, req.delta, req.eta, req.options)
        if problem.delta is None or problem.eta is None:
            raise InvalidInputError("design needs both delta and eta cost matrices")
        solution = solve_mcne(
            problem.a_pattern,
            problem.delta,
            problem.eta,
            allow_extra_agents=problem.options.allow_extra_agents,
        )
    except NetestError as exc:
        raise _http_error(exc) from exc
    return DesignResponse(solution=solution.to_json_dict())


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest) -> VerifyResponse:
    try:
        problem = _problem_from(req.system)
        measurement, network = solution_from_json_dict(req.solution)
        report, tally = verify_solution(
            problem.a_pattern,
            measurement,
            network,
            oracle_trials=req.oracle_trials,
            seed=req.seed,
        )
    except NetestError as exc:
        raise _http_error(exc) from exc
    oracle = None
    if tally is not None:
        oracle = {"full_rank_trials": tally[0], "trials": tally[1]}
    return VerifyResponse(
        observable=report.observable,
        verification=report.to_json_dict(),
        oracle=oracle,
    )


@app.post("/discretize", response_model=DiscretizeResponse)
def discretize(req: DiscretizeRequest) -> DiscretizeResponse:
    try:
        system = ContinuousSystem(np.array(req.matrix, dtype=float), req.sample_time)
        if req.method == "euler":
            result = euler_discretize(system)
        else:
            result = tustin_discretize(system)
        structure = structure_of(result, req.tol)
        missing = missing_self_loops(structure)
    except NetestError as exc:
        raise _http_error(exc) from exc
    return DiscretizeResponse(
        matrix=[[float(x) for x in row] for row in result],
        structure=structure.to_json_dict(),
        self_damped=not missing,
        missing_self_loops=missing,
    )


@app.post("/oracle", response_model=OracleResponse)
def oracle(req: OracleRequest) -> OracleResponse:
    try:
        problem = _problem_from(req.system)
        if req.trials < 1:
            raise InvalidInputError("trials must be at least 1")
        structural = is_structurally_observable(
            problem.a_pattern, req.measured_states
        )
        full, trials = generic_rank_oracle(
            problem.a_pattern, req.measured_states, trials=req.trials, seed=req.seed
        )
    except NetestError as exc:
        raise _http_error(exc) from exc
    return OracleResponse(
        full_rank_trials=full, trials=trials, structural=structural.to_json_dict()
    )
