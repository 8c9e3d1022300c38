"""HTTP facade over the solver.

Every operation is a plain handler taking a pydantic request and
returning a pydantic response; the FastAPI routes and the command-line
front end both call these handlers, so batch runs and the service cannot
drift apart.  Handlers raise UsageError (or the parser errors from the
core modules) for bad input; the routes map those to 400 and resource
exhaustion to 422.
"""

from __future__ import annotations

import json
from typing import Any

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import compiler
from .combinators import ComboInstance, ComboOp, NotAProduct, parse_combo
from .deciders import Rng, decide
from .model import (
    Instance,
    MalformedJson,
    Role,
    RoleConflict,
    Variant,
    assign_roles,
    export_dot,
    instance_to_obj,
    parse_instance,
)
from .oracle import (
    DEFAULT_BUDGETS,
    Budgets,
    DimensionBudgetExceeded,
    NoConvergence,
    spectral_report,
)
from .qubitize import dequbitize, qubitize_instance


class UsageError(ValueError):
    """Bad flags or request fields, as opposed to malformed payloads."""


# --- requests / responses -------------------------------------------------------

class DecideRequest(BaseModel):
    instance: dict
    witness: str | None = None
    seed: int = 0
    reps: int = Field(default=32, ge=1)


class DecideResponse(BaseModel):
    accept: bool
    repetitions: int
    trace: list[dict[str, Any]]


class CompileRequest(BaseModel):
    circuit: dict
    target: str


class CompileResponse(BaseModel):
    instance: dict


class OracleRequest(BaseModel):
    instance: dict
    budget: int | None = Field(default=None, ge=1)


class OracleResponse(BaseModel):
    total_dimension: int
    nullspace_dim: int
    min_eigenvalue: float
    method: str


class CombineRequest(BaseModel):
    op: str
    left: dict
    right: dict


class CombineResponse(BaseModel):
    op: str
    left: dict
    right: dict


class QubitizeRequest(BaseModel):
    instance: dict
    padding: str = "p1"


class QubitizeResponse(BaseModel):
    instance: dict


class ExportDotRequest(BaseModel):
    instance: dict


class ExportDotResponse(BaseModel):
    dot: str


# --- handlers ---------------------------------------------------------------------

def _parse_target(obj: dict) -> Instance | ComboInstance:
    text = json.dumps(obj)
    if isinstance(obj, dict) and "op" in obj:
        return parse_combo(text)
    return parse_instance(text)


def _witness_map(instance: Instance, bits: str | None) -> dict[int, int] | None:
    """Resolve a witness bitstring against the analyzed instance's qudits.

    Bits pair with the witness-role qudits of the post-reduction instance
    in ascending id order.  A role conflict leaves the witness unused; the
    decision is structural either way.
    """
    if bits is None:
        return None
    if any(b not in "01" for b in bits):
        raise UsageError("witness must be a string of 0s and 1s")
    analyzed = dequbitize(instance) if instance.variant is Variant.QUBIT else instance
    try:
        roles = assign_roles(analyzed)
    except RoleConflict:
        return None
    ids = sorted(q for q, r in roles.items() if r is Role.WITNESS)
    if len(bits) != len(ids):
        raise UsageError(
            f"witness has {len(bits)} bits but the instance has "
            f"{len(ids)} witness qudits"
        )
    return {q: int(b) for q, b in zip(ids, bits)}


def handle_decide(req: DecideRequest) -> DecideResponse:
    target = _parse_target(req.instance)
    if isinstance(target, ComboInstance):
        if req.witness is not None:
            raise UsageError("combined instances take no witness")
        from .combinators import decide_combo

        dec = decide_combo(target, reps=req.reps, rng=Rng(req.seed))
    else:
        wit = _witness_map(target, req.witness)
        dec = decide(target, wit=wit, reps=req.reps, rng=Rng(req.seed))
    return DecideResponse(
        accept=dec.accept,
        repetitions=dec.repetitions,
        trace=[dict(e) for e in dec.trace],
    )


def handle_compile(req: CompileRequest) -> CompileResponse:
    circuit = compiler.parse_circuit(json.dumps(req.circuit))
    try:
        target = Variant(req.target)
    except ValueError:
        raise UsageError(f"unknown target variant '{req.target}'") from None
    instance = compiler.compile(circuit, target)
    return CompileResponse(instance=instance_to_obj(instance))


def handle_oracle(req: OracleRequest) -> OracleResponse:
    target = _parse_target(req.instance)
    budgets = DEFAULT_BUDGETS
    if req.budget is not None:
        budgets = Budgets(dense=DEFAULT_BUDGETS.dense, matvec=req.budget)
    report = spectral_report(target, budgets)
    return OracleResponse(**report.to_obj())


def handle_combine(req: CombineRequest) -> CombineResponse:
    try:
        op = ComboOp(req.op)
    except ValueError:
        raise UsageError(f"unknown combinator op '{req.op}'") from None
    for key, raw in (("left", req.left), ("right", req.right)):
        if "op" in raw:
            raise MalformedJson("combined instances do not nest")
    left = parse_instance(json.dumps(req.left))
    right = parse_instance(json.dumps(req.right))
    combo = ComboInstance(op=op, left=left, right=right)
    return CombineResponse(**combo.to_obj())


def handle_qubitize(req: QubitizeRequest) -> QubitizeResponse:
    instance = parse_instance(json.dumps(req.instance))
    out = qubitize_instance(instance, padding=req.padding)
    return QubitizeResponse(instance=instance_to_obj(out))


def handle_export_dot(req: ExportDotRequest) -> ExportDotResponse:
    instance = parse_instance(json.dumps(req.instance))
    return ExportDotResponse(dot=export_dot(instance))


# --- routes -----------------------------------------------------------------------

app = FastAPI(title="clocksat", version="1.0.0")

_INPUT_ERRORS = (MalformedJson, UsageError, NotAProduct, ValueError)
_RESOURCE_ERRORS = (DimensionBudgetExceeded, NoConvergence)


def _run(handler, req):
    try:
        return handler(req)
    except _RESOURCE_ERRORS as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except _INPUT_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/decide", response_model=DecideResponse)
def decide_route(req: DecideRequest) -> DecideResponse:
    return _run(handle_decide, req)


@app.post("/compile", response_model=CompileResponse)
def compile_route(req: CompileRequest) -> CompileResponse:
    return _run(handle_compile, req)


@app.post("/oracle", response_model=OracleResponse)
def oracle_route(req: OracleRequest) -> OracleResponse:
    return _run(handle_oracle, req)


@app.post("/combine", response_model=CombineResponse)
def combine_route(req: CombineRequest) -> CombineResponse:
    return _run(handle_combine, req)


@app.post("/qubitize", response_model=QubitizeResponse)
def qubitize_route(req: QubitizeRequest) -> QubitizeResponse:
    return _run(handle_qubitize, req)


@app.post("/export-dot", response_model=ExportDotResponse)
def export_dot_route(req: ExportDotRequest) -> ExportDotResponse:
    return _run(handle_export_dot, req)
