"""HTTP API over the store, scoring engine, planner and report renderer.

Stateless: all state lives in the store; evaluation responses are the exact
bytes of report.render_json so every client sees the engine's numbers
verbatim. Endpoint and error contracts are documented in docs/api.md.
"""

from __future__ import annotations

import datetime as dt
import json
import os
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from smm import report
from smm.errors import SmmError
from smm.model import (
    Assessment,
    AssessmentStatus,
    Diagnostic,
    GoalTier,
    KpaDef,
    MaturityLevel,
    MaturityModel,
    ParameterBinding,
    ParameterCategory,
    ParameterDef,
    ScoreEntry,
    ScoreLevel,
    Severity,
    SpecificGoalDef,
)
from smm.planner import EXHAUSTIVE_THRESHOLD, Method, plan as compute_plan, what_if
from smm.scoring import evaluate
from smm.store import Store

DEFAULT_MAX_BODY_BYTES = 1 << 20

_STATUS_BY_CODE = {
    "NOT_FOUND": 404,
    "CONFLICT": 409,
    "VALIDATION_FAILED": 422,
    "UNKNOWN_PARAM": 422,
    "UNKNOWN_KPA": 422,
    "TIER_MISSING": 422,
    "SCORE_RANGE": 422,
    "OUT_OF_RANGE": 422,
    "TARGET_UNREACHABLE": 422,
    "PARSE_FAILED": 422,
    "MODEL_MISMATCH": 422,
    "BAD_METHOD": 400,
    "BAD_JSON": 400,
    "BAD_FIELD": 422,
    "ID_MISMATCH": 422,
    "MISSING_IF_MATCH": 400,
    "BAD_IF_MATCH": 400,
    "UNKNOWN_LEVEL": 422,
    "BODY_TOO_LARGE": 413,
}


# -- JSON wire forms of the domain types --------------------------------------

def model_to_doc(model: MaturityModel) -> dict:
    return {
        "id": model.id,
        "name": model.name,
        "version": model.version,
        "parameters": [
            {
                "id": p.id,
                "description": p.description,
                "category": p.category.value,
                "step_cost": p.step_cost,
            }
            for p in model.parameters
        ],
        "kpas": [
            {
                "id": k.id,
                "name": k.name,
                "plm_stage": k.plm_stage,
                "goals": [
                    {
                        "id": g.id,
                        "name": g.name,
                        "tier": g.tier.value,
                        "bindings": [
                            {"parameter_id": b.parameter_id, "weight": b.weight}
                            for b in g.bindings
                        ],
                    }
                    for g in k.goals
                ],
            }
            for k in model.kpas
        ],
    }


def assessment_to_doc(assessment: Assessment) -> dict:
    return {
        "id": assessment.id,
        "model_id": assessment.model_id,
        "model_version": assessment.model_version,
        "date": assessment.date.isoformat(),
        "team": assessment.team,
        "status": assessment.status.value,
        "scores": {
            pid: (
                {"level": int(entry.level), "note": entry.note}
                if entry.note is not None
                else {"level": int(entry.level)}
            )
            for pid, entry in assessment.scores.items()
        },
    }


class _DocReader:
    """Walks an incoming JSON document, collecting shape errors as diagnostics."""

    def __init__(self):
        self.diagnostics: list[Diagnostic] = []

    def fail(self, path: str, message: str) -> None:
        self.diagnostics.append(Diagnostic(Severity.ERROR, "BAD_FIELD", f"{path}: {message}"))

    def str_field(self, doc: dict, key: str, path: str) -> str:
        value = doc.get(key)
        if not isinstance(value, str):
            self.fail(f"{path}.{key}", "expected a string")
            return ""
        return value

    def int_field(self, doc: dict, key: str, path: str) -> int:
        value = doc.get(key)
        if not isinstance(value, int) or isinstance(value, bool):
            self.fail(f"{path}.{key}", "expected an integer")
            return 0
        return value

    def number_field(self, doc: dict, key: str, path: str, default=None) -> float:
        value = doc.get(key, default)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            self.fail(f"{path}.{key}", "expected a number")
            return 0.0
        return float(value)

    def list_field(self, doc: dict, key: str, path: str) -> list:
        value = doc.get(key)
        if not isinstance(value, list):
            self.fail(f"{path}.{key}", "expected a list")
            return []
        return value

    def raise_if_failed(self, what: str) -> None:
        if self.diagnostics:
            raise SmmError("VALIDATION_FAILED", f"malformed {what} document", self.diagnostics)


def model_from_doc(doc: Any) -> MaturityModel:
    if not isinstance(doc, dict):
        raise SmmError("VALIDATION_FAILED", "model document must be a JSON object")
    r = _DocReader()
    model_id = r.str_field(doc, "id", "model")
    name = r.str_field(doc, "name", "model")
    version = r.int_field(doc, "version", "model")

    parameters = []
    for i, p in enumerate(r.list_field(doc, "parameters", "model")):
        path = f"model.parameters[{i}]"
        if not isinstance(p, dict):
            r.fail(path, "expected an object")
            continue
        category_text = r.str_field(p, "category", path)
        try:
            category = ParameterCategory(category_text)
        except ValueError:
            r.fail(f"{path}.category", f"unknown category {category_text!r}")
            category = ParameterCategory.PROCESS_QUALITY
        parameters.append(ParameterDef(
            id=r.str_field(p, "id", path),
            description=r.str_field(p, "description", path),
            category=category,
            step_cost=r.number_field(p, "step_cost", path, default=1),
        ))

    kpas = []
    for i, k in enumerate(r.list_field(doc, "kpas", "model")):
        path = f"model.kpas[{i}]"
        if not isinstance(k, dict):
            r.fail(path, "expected an object")
            continue
        goals = []
        for j, g in enumerate(r.list_field(k, "goals", path)):
            goal_path = f"{path}.goals[{j}]"
            if not isinstance(g, dict):
                r.fail(goal_path, "expected an object")
                continue
            tier_text = r.str_field(g, "tier", goal_path)
            try:
                tier = GoalTier(tier_text)
            except ValueError:
                r.fail(f"{goal_path}.tier", f"unknown tier {tier_text!r}")
                tier = GoalTier.BASIC
            bindings = []
            for m, b in enumerate(r.list_field(g, "bindings", goal_path)):
                binding_path = f"{goal_path}.bindings[{m}]"
                if not isinstance(b, dict):
                    r.fail(binding_path, "expected an object")
                    continue
                bindings.append(ParameterBinding(
                    parameter_id=r.str_field(b, "parameter_id", binding_path),
                    weight=r.number_field(b, "weight", binding_path),
                ))
            goals.append(SpecificGoalDef(
                id=r.str_field(g, "id", goal_path),
                name=r.str_field(g, "name", goal_path),
                tier=tier,
                bindings=tuple(bindings),
            ))
        kpas.append(KpaDef(
            id=r.str_field(k, "id", path),
            name=r.str_field(k, "name", path),
            plm_stage=r.str_field(k, "plm_stage", path),
            goals=tuple(goals),
        ))

    r.raise_if_failed("model")
    return MaturityModel(model_id, name, version, tuple(parameters), tuple(kpas))


def assessment_from_doc(doc: Any) -> Assessment:
    if not isinstance(doc, dict):
        raise SmmError("VALIDATION_FAILED", "assessment document must be a JSON object")
    r = _DocReader()
    assessment_id = r.str_field(doc, "id", "assessment")
    model_id = r.str_field(doc, "model_id", "assessment")
    version = r.int_field(doc, "model_version", "assessment")
    team = r.str_field(doc, "team", "assessment")

    date_text = r.str_field(doc, "date", "assessment")
    date = dt.date(1970, 1, 1)
    try:
        date = dt.date.fromisoformat(date_text)
    except ValueError:
        r.fail("assessment.date", f"expected YYYY-MM-DD, got {date_text!r}")

    status_text = doc.get("status", AssessmentStatus.DRAFT.value)
    status = AssessmentStatus.DRAFT
    if not isinstance(status_text, str):
        r.fail("assessment.status", "expected a string")
    else:
        try:
            status = AssessmentStatus(status_text)
        except ValueError:
            r.fail("assessment.status", f"unknown status {status_text!r}")

    scores: dict[str, ScoreEntry] = {}
    raw_scores = doc.get("scores", {})
    if not isinstance(raw_scores, dict):
        r.fail("assessment.scores", "expected an object")
        raw_scores = {}
    for pid, raw in raw_scores.items():
        entry = _score_entry_from_doc(raw, f"assessment.scores.{pid}", r)
        if entry is not None:
            scores[pid] = entry

    r.raise_if_failed("assessment")
    return Assessment(assessment_id, model_id, version, date, team, status, scores)


def _score_entry_from_doc(raw: Any, path: str, r: _DocReader) -> ScoreEntry | None:
    if not isinstance(raw, dict):
        r.fail(path, "expected an object with a level field")
        return None
    level = raw.get("level")
    if not isinstance(level, int) or isinstance(level, bool) or level not in (0, 1, 2):
        r.fail(f"{path}.level", f"score level must be 0, 1 or 2, got {level!r}")
        return None
    note = raw.get("note")
    if note is not None and not isinstance(note, str):
        r.fail(f"{path}.note", "expected a string")
        return None
    return ScoreEntry(ScoreLevel(level), note)


def _diagnostics_docs(diagnostics) -> list[dict]:
    docs = []
    for diag in diagnostics:
        doc = {
            "severity": diag.severity.value,
            "rule_code": diag.rule_code,
            "message": diag.message,
        }
        if diag.location is not None:
            doc["location"] = {
                "file": diag.location.file,
                "line": diag.location.line,
                "column": diag.location.column,
            }
        docs.append(doc)
    return docs


def _error_response(status: int, code: str, message: str, diagnostics=()) -> JSONResponse:
    body: dict = {"status": status, "code": code, "message": message}
    if diagnostics:
        body["diagnostics"] = _diagnostics_docs(diagnostics)
    return JSONResponse(status_code=status, content=body)


async def _read_json(request: Request) -> Any:
    raw = await request.body()
    try:
        return json.loads(raw)
    except ValueError:
        raise SmmError("BAD_JSON", "request body is not valid JSON") from None


def _expected_revision(request: Request) -> int:
    header = request.headers.get("if-match")
    if header is None:
        raise SmmError("MISSING_IF_MATCH",
                       'PUT requires an If-Match header carrying the expected revision ("0" to create)')
    text = header.strip().removeprefix("W/").strip('"')
    if not text.isdigit():
        raise SmmError("BAD_IF_MATCH", f"If-Match must be a revision number, got {header!r}")
    return int(text)


def _optional_revision(request: Request) -> int | None:
    if request.headers.get("if-match") is None:
        return None
    return _expected_revision(request)


def _method_param(request: Request) -> str:
    method = request.query_params.get("method", report.METHOD_BOTH)
    if method not in (report.METHOD_COMPENSATORY, report.METHOD_TWO_TIER, report.METHOD_BOTH):
        raise SmmError("BAD_METHOD", f"unknown method {method!r}")
    return method


def create_app(
    store: Store,
    *,
    exhaustive_threshold: int = EXHAUSTIVE_THRESHOLD,
    max_body_bytes: int = DEFAULT_MAX_BODY_BYTES,
) -> FastAPI:
    app = FastAPI(title="smm service", docs_url=None, redoc_url=None, openapi_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.middleware("http")
    async def limit_body(request: Request, call_next):
        length = request.headers.get("content-length")
        if length is not None and length.isdigit() and int(length) > max_body_bytes:
            return _error_response(413, "BODY_TOO_LARGE",
                                   f"request body exceeds {max_body_bytes} bytes")
        return await call_next(request)

    @app.exception_handler(SmmError)
    async def smm_error_handler(_request: Request, exc: SmmError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return _error_response(status, exc.code, exc.message, exc.diagnostics)

    # -- models --

    @app.get("/api/models")
    async def list_models():
        return [
            {"id": s.id, "name": s.name, "version": s.version, "revision": s.revision}
            for s in store.list_models()
        ]

    @app.get("/api/models/{model_id}")
    async def get_model(model_id: str):
        model, revision = store.get_model(model_id)
        return JSONResponse(
            content={"revision": revision, "model": model_to_doc(model)},
            headers={"ETag": f'"{revision}"'},
        )

    @app.put("/api/models/{model_id}")
    async def put_model(model_id: str, request: Request):
        expected = _expected_revision(request)
        model = model_from_doc(await _read_json(request))
        if model.id != model_id:
            raise SmmError("ID_MISMATCH",
                           f'body declares id "{model.id}" but the path says "{model_id}"')
        revision = store.put_model(model, expected)
        status = 201 if expected == 0 else 200
        return JSONResponse(status_code=status, content={"id": model_id, "revision": revision},
                            headers={"ETag": f'"{revision}"'})

    @app.delete("/api/models/{model_id}")
    async def delete_model(model_id: str, request: Request):
        store.delete_model(model_id, _optional_revision(request))
        return Response(status_code=204)

    # -- assessments --

    @app.get("/api/assessments")
    async def list_assessments():
        return [
            {
                "id": s.id,
                "model_id": s.model_id,
                "model_version": s.model_version,
                "team": s.team,
                "date": s.date.isoformat(),
                "status": s.status,
                "revision": s.revision,
            }
            for s in store.list_assessments()
        ]

    @app.get("/api/assessments/{assessment_id}")
    async def get_assessment(assessment_id: str):
        assessment, revision = store.get_assessment(assessment_id)
        return JSONResponse(
            content={"revision": revision, "assessment": assessment_to_doc(assessment)},
            headers={"ETag": f'"{revision}"'},
        )

    @app.put("/api/assessments/{assessment_id}")
    async def put_assessment(assessment_id: str, request: Request):
        expected = _expected_revision(request)
        assessment = assessment_from_doc(await _read_json(request))
        if assessment.id != assessment_id:
            raise SmmError("ID_MISMATCH",
                           f'body declares id "{assessment.id}" but the path says "{assessment_id}"')
        revision = store.put_assessment(assessment, expected)
        status = 201 if expected == 0 else 200
        return JSONResponse(status_code=status,
                            content={"id": assessment_id, "revision": revision},
                            headers={"ETag": f'"{revision}"'})

    @app.delete("/api/assessments/{assessment_id}")
    async def delete_assessment(assessment_id: str, request: Request):
        store.delete_assessment(assessment_id, _optional_revision(request))
        return Response(status_code=204)

    @app.patch("/api/assessments/{assessment_id}/scores")
    async def patch_scores(assessment_id: str, request: Request):
        expected = _optional_revision(request)
        body = await _read_json(request)
        if not isinstance(body, dict):
            raise SmmError("BAD_JSON", "expected an object mapping parameter ids to scores")
        assessment, revision = store.get_assessment(assessment_id)
        scores = dict(assessment.scores)
        reader = _DocReader()
        for pid, raw in body.items():
            if raw is None:
                scores.pop(pid, None)
                continue
            entry = _score_entry_from_doc(raw, f"scores.{pid}", reader)
            if entry is not None:
                scores[pid] = entry
        reader.raise_if_failed("score patch")
        patched = Assessment(
            id=assessment.id,
            model_id=assessment.model_id,
            model_version=assessment.model_version,
            date=assessment.date,
            team=assessment.team,
            status=assessment.status,
            scores=scores,
        )
        new_revision = store.put_assessment(patched, expected if expected is not None else revision)
        return {"id": assessment_id, "revision": new_revision}

    # -- evaluation, what-if, planning --

    def _load_pair(assessment_id: str):
        assessment, _ = store.get_assessment(assessment_id)
        model, _ = store.get_model(assessment.model_id)
        return model, assessment

    @app.get("/api/assessments/{assessment_id}/evaluation")
    async def get_evaluation(assessment_id: str, request: Request):
        method = _method_param(request)
        model, assessment = _load_pair(assessment_id)
        body = report.render_json(evaluate(model, assessment), method=method)
        return Response(content=body, media_type="application/json")

    @app.post("/api/assessments/{assessment_id}/what-if")
    async def post_what_if(assessment_id: str, request: Request):
        method = _method_param(request)
        body = await _read_json(request)
        if not isinstance(body, dict) or not isinstance(body.get("overrides", {}), dict):
            raise SmmError("BAD_JSON", 'expected {"overrides": {"<param-id>": <level>}}')
        overrides = body.get("overrides", {})
        model, assessment = _load_pair(assessment_id)
        result = what_if(model, assessment, overrides)
        return Response(content=report.render_json(result, method=method),
                        media_type="application/json")

    @app.post("/api/assessments/{assessment_id}/plan")
    async def post_plan(assessment_id: str, request: Request):
        body = await _read_json(request)
        if not isinstance(body, dict):
            raise SmmError("BAD_JSON", "expected a JSON object")
        kpa_id = body.get("kpa_id")
        method = body.get("method", report.METHOD_COMPENSATORY)
        target = body.get("target")
        deadline_ms = body.get("deadline_ms")
        if not isinstance(kpa_id, str) or not isinstance(target, str):
            raise SmmError("BAD_JSON", "kpa_id and target are required strings")
        if deadline_ms is not None and (not isinstance(deadline_ms, int) or deadline_ms < 0):
            raise SmmError("BAD_JSON", "deadline_ms must be a non-negative integer")
        try:
            method_parsed = Method(method)
        except ValueError:
            raise SmmError("BAD_METHOD", f"unknown method {method!r}") from None
        try:
            target_parsed = MaturityLevel.parse(target)
        except ValueError:
            raise SmmError("UNKNOWN_LEVEL", f"unknown maturity level {target!r}") from None
        model, assessment = _load_pair(assessment_id)
        result = compute_plan(
            model, assessment, kpa_id, method_parsed, target_parsed,
            exhaustive_threshold=exhaustive_threshold, deadline_ms=deadline_ms,
        )
        return report.plan_to_doc(result)

    return app


def create_app_from_env() -> FastAPI:
    """App factory for `uvicorn smm.service:create_app_from_env --factory`."""
    root = os.environ.get("SMM_STORE_ROOT")
    if not root:
        raise RuntimeError("SMM_STORE_ROOT is not set")
    threshold = int(os.environ.get("SMM_EXHAUSTIVE_THRESHOLD", EXHAUSTIVE_THRESHOLD))
    max_body = int(os.environ.get("SMM_MAX_BODY_BYTES", DEFAULT_MAX_BODY_BYTES))
    return create_app(Store(root), exhaustive_threshold=threshold, max_body_bytes=max_body)
