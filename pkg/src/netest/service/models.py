"""Pydantic request/response models for the HTTP service.

Request bodies mirror the problem JSON documented in ``netest.problem``;
cost cells accept the string "inf".  Responses carry plain dictionaries for
the solver documents so their field layout stays identical to the file
formats the CLI writes.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field

CostCell = Union[float, int, str]
CostMatrix = list[list[CostCell]]


class PatternModel(BaseModel):
    rows: int
    cols: int
    entries: list[list[int]]


class SystemModel(BaseModel):
    nodes: Optional[int] = None
    edges: Optional[list[list[int]]] = None
    pattern: Optional[PatternModel] = None
    self_loops_implicit: bool = True
    duplicate_edges_dropped: int = 0


class SparseDeltaModel(BaseModel):
    agents: int
    default: CostCell = "inf"
    entries: list[list[CostCell]] = Field(default_factory=list)


class OptionsModel(BaseModel):
    tol: Optional[float] = None
    allow_extra_agents: bool = False
    oracle_trials: int = 0
    seed: int = 0


class AnalyzeRequest(BaseModel):
    system: SystemModel


class AnalyzeResponse(BaseModel):
    node_count: int
    edge_count: int
    duplicate_edges: int
    scc_count: int
    parent_count: int
    min_agents: int
    self_damped: bool
    missing_self_loops: list[int]
    parents: list[dict]
    components: list[list[int]]


class DesignRequest(BaseModel):
    system: SystemModel
    delta: Union[CostMatrix, SparseDeltaModel]
    eta: CostMatrix
    options: OptionsModel = Field(default_factory=OptionsModel)


class DesignResponse(BaseModel):
    solution: dict


class VerifyRequest(BaseModel):
    system: SystemModel
    solution: dict
    oracle_trials: int = 0
    seed: int = 0


class VerifyResponse(BaseModel):
    observable: bool
    verification: dict
    oracle: Optional[dict] = None


class DiscretizeRequest(BaseModel):
    matrix: list[list[float]]
    sample_time: float
    method: Literal["euler", "tustin"]
    tol: Optional[float] = None


class DiscretizeResponse(BaseModel):
    matrix: list[list[float]]
    structure: dict
    self_damped: bool
    missing_self_loops: list[int]


class OracleRequest(BaseModel):
    system: SystemModel
    measured_states: list[int]
    trials: int = 100
    seed: int = 0


class OracleResponse(BaseModel):
    full_rank_trials: int
    trials: int
    structural: dict


class HealthResponse(BaseModel):
    status: str
    schema_version: str
    version: str


class ErrorDetail(BaseModel):
    code: str
    message: str
