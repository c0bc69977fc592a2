"""HTTP API over the library, serving the interactive workbench.

JSON-over-HTTP only.  Requirement sets are immutable snapshots swapped under
a lock (readers never observe a half-applied write); simulation sessions are
single-writer and expire after an idle timeout.  Error mapping: 400 malformed
body, 404 unknown ids, 409 hierarchy conflicts or concurrent session use,
410 expired/closed sessions, 422 requirement parse or evaluation errors.
"""

from __future__ import annotations

import secrets
import threading
import time
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from . import formula as fm
from .errors import (
    CycleDetected, EvalError, LexError, ParseError, ReqForgeError,
    SchemaError, UnknownId, UnknownParent, UnsupportedTemplate,
)
from .monitor import MonitorState, PastMonitor, TraceEvent, Verdict, new_state, step
from .parser import parse_requirement, pretty_print
from .requirement import Never, Requirement
from .semantics import (
    ModeModel, TickConfig, diagram_data, rewrite_never, template_key,
    to_future_ltl, to_past_ltl,
)
from .store import (
    RequirementSet, descendants, effective_mode_model, export_set, metrics,
    metrics_json, remove, upsert,
)

SESSION_IDLE_SECONDS = 30 * 60


class ParseBody(BaseModel):
    text: str
    mode_var: str | None = None
    tick_ms: int | None = None
    revision: int | None = None


class SetBody(BaseModel):
    project: str


class RequirementBody(BaseModel):
    id: str
    text: str
    parent_id: str | None = None
    rationale: str | None = None


class SaveBody(BaseModel):
    path: str


class SimulateBody(BaseModel):
    formula: str | None = None
    requirement_id: str | None = None
    project: str | None = None
    events: list[dict] = []


class EventBody(BaseModel):
    event: dict


class _Session:
    def __init__(self, monitor: PastMonitor):
        self.monitor = monitor
        self.state: MonitorState = new_state(monitor)
        self.verdicts: list[str] = []
        self.last_tick = -1
        self.touched = time.monotonic()
        self.closed = False
        self.lock = threading.Lock()


def _event_from_json(obj: dict, last_tick: int) -> TraceEvent:
    if obj.get("end") is True:
        return TraceEvent(last_tick + 1, {}, terminal=True)
    tick = obj.get("tick", last_tick + 1)
    if not isinstance(tick, int) or isinstance(tick, bool) or tick <= last_tick:
        raise SchemaError("ticks must be strictly increasing integers")
    assign = obj.get("assign", {})
    if not isinstance(assign, dict):
        raise SchemaError("\"assign\" must be an object")
    return TraceEvent(tick, assign)


def create_app(corpus: RequirementSet | None = None, tick_ms: int = 100,
               cors_origins: list[str] | None = None,
               session_idle_seconds: float = SESSION_IDLE_SECONDS,
               ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="reqforge", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    sets: dict[str, RequirementSet] = {}
    sets_lock = threading.Lock()
    sessions: dict[str, _Session] = {}
    sessions_lock = threading.Lock()
    default_cfg = TickConfig(tick_ms)

    if corpus is not None:
        sets[corpus.project] = corpus

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"error": "malformed request body",
                                     "detail": exc.errors()})

    def _error(status: int, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": str(exc)})

    def _get_set(project: str) -> RequirementSet:
        snapshot = sets.get(project)
        if snapshot is None:
            raise UnknownId(project)
        return snapshot

    # -- live parsing -------------------------------------------------------

    def _requirement_bundle(req: Requirement, spans, mm: ModeModel,
                            cfg: TickConfig) -> dict:
        key = template_key(req)
        out: dict[str, Any] = {
            "requirement": {
                "id": req.id,
                "component": req.component,
                "text": pretty_print(req).text,
                "parent_id": req.parent_id,
            },
            "spans": spans.as_dict() if spans is not None else None,
            "template_key": {
                "scope": key.scope_option,
                "condition": key.condition_option,
                "timing": key.timing_option,
            },
            "diagram": diagram_data(req, cfg).as_json(),
        }
        future = to_future_ltl(req, mm, cfg)
        out["future_ltl"] = fm.to_text(future)
        out["future_tree"] = fm.to_json(future)
        try:
            past = to_past_ltl(req, mm)
            out["past_ltl"] = fm.to_text(past)
            out["past_tree"] = fm.to_json(past)
        except UnsupportedTemplate as exc:
            out["past_ltl"] = None
            out["past_omitted_reason"] = str(exc)
        if isinstance(req.timing, Never):
            rewritten = rewrite_never(req)
            out["never_rewrite"] = {
                "text": pretty_print(rewritten).text,
                "future_ltl": fm.to_text(to_future_ltl(rewritten, mm, cfg)),
            }
        return out

    @app.post("/api/requirements/parse")
    def parse_endpoint(body: ParseBody):
        cfg = TickConfig(body.tick_ms) if body.tick_ms else default_cfg
        try:
            req, spans = parse_requirement(body.text, req_id="draft")
        except (LexError, ParseError) as exc:
            return JSONResponse(status_code=422, content={
                "errors": [{"message": exc.message, "offset": exc.offset,
                            "line": exc.line, "col": exc.col}],
                "revision": body.revision,
            })
        probe = RequirementSet("draft", {req.id: req})
        mm = effective_mode_model(probe, body.mode_var)
        out = _requirement_bundle(req, spans, mm, cfg)
        out["revision"] = body.revision
        return out

    # -- requirement sets ---------------------------------------------------

    @app.get("/api/sets")
    def list_sets():
        return {"projects": sorted(sets)}

    @app.post("/api/sets", status_code=201)
    def create_set(body: SetBody):
        with sets_lock:
            if body.project in sets:
                return _error(409, ReqForgeError(f"project {body.project!r} exists"))
            sets[body.project] = RequirementSet(body.project)
        return {"project": body.project, "total": 0}

    @app.get("/api/sets/{project}")
    def get_set(project: str):
        try:
            snapshot = _get_set(project)
        except UnknownId as exc:
            return _error(404, exc)
        return {
            "project": project,
            "total": len(snapshot.requirements),
            "requirements": [_req_json(r) for r in snapshot.ordered()],
        }

    @app.delete("/api/sets/{project}")
    def delete_set(project: str):
        with sets_lock:
            if project not in sets:
                return _error(404, UnknownId(project))
            del sets[project]
        return {"deleted": project}

    def _req_json(req: Requirement) -> dict:
        from .store import requirement_text
        key = template_key(req)
        return {
            "id": req.id,
            "parent_id": req.parent_id,
            "text": requirement_text(req),
            "rationale": req.rationale,
            "template_key": {
                "scope": key.scope_option,
                "condition": key.condition_option,
                "timing": key.timing_option,
            },
        }

    @app.get("/api/sets/{project}/requirements")
    def list_requirements(project: str, subtree: str | None = None):
        try:
            snapshot = _get_set(project)
            if subtree is not None:
                reqs = descendants(snapshot, subtree)
            else:
                reqs = snapshot.ordered()
        except UnknownId as exc:
            return _error(404, exc)
        return {"requirements": [_req_json(r) for r in reqs]}

    @app.post("/api/sets/{project}/requirements", status_code=201)
    def add_requirement(project: str, body: RequirementBody):
        return _upsert(project, body)

    @app.put("/api/sets/{project}/requirements/{req_id}")
    def put_requirement(project: str, req_id: str, body: RequirementBody):
        if body.id != req_id:
            return _error(409, ReqForgeError("body id does not match URL"))
        return _upsert(project, body)

    def _upsert(project: str, body: RequirementBody):
        try:
            req, _ = parse_requirement(body.text, req_id=body.id,
                                       project=project, parent_id=body.parent_id,
                                       rationale=body.rationale)
        except (LexError, ParseError) as exc:
            return JSONResponse(status_code=422, content={
                "errors": [{"message": exc.message, "offset": exc.offset,
                            "line": exc.line, "col": exc.col}]})
        except CycleDetected as exc:
            return _error(409, exc)
        with sets_lock:
            try:
                snapshot = _get_set(project)
                sets[project] = upsert(snapshot, req)
            except UnknownId as exc:
                return _error(404, exc)
            except (UnknownParent, CycleDetected) as exc:
                return _error(409, exc)
        return _req_json(req)

    @app.get("/api/sets/{project}/requirements/{req_id}")
    def get_requirement(project: str, req_id: str):
        try:
            return _req_json(_get_set(project).get(req_id))
        except UnknownId as exc:
            return _error(404, exc)

    @app.delete("/api/sets/{project}/requirements/{req_id}")
    def delete_requirement(project: str, req_id: str):
        with sets_lock:
            try:
                snapshot = _get_set(project)
                sets[project] = remove(snapshot, req_id)
            except UnknownId as exc:
                return _error(404, exc)
        return {"deleted": req_id}

    @app.get("/api/sets/{project}/metrics")
    def set_metrics(project: str):
        try:
            snapshot = _get_set(project)
        except UnknownId as exc:
            return _error(404, exc)
        return Response(content=metrics_json(metrics(snapshot)),
                        media_type="application/json")

    @app.post("/api/sets/{project}/save")
    def save_set(project: str, body: SaveBody):
        try:
            snapshot = _get_set(project)
        except UnknownId as exc:
            return _error(404, exc)
        try:
            with open(body.path, "wb") as fh:
                fh.write(export_set(snapshot, "json"))
        except OSError as exc:
            return _error(422, exc)
        return {"saved": body.path}

    # -- interactive simulation --------------------------------------------

    def _session_formula(body: SimulateBody) -> fm.Formula:
        if body.formula:
            return fm.parse_formula(body.formula)
        if body.requirement_id and body.project:
            snapshot = _get_set(body.project)
            req = snapshot.get(body.requirement_id)
            mm = effective_mode_model(snapshot, None)
            return to_past_ltl(req, mm)
        raise SchemaError("provide either \"formula\" or "
                          "\"requirement_id\" with \"project\"")

    @app.post("/api/simulate", status_code=201)
    def simulate(body: SimulateBody):
        try:
            f = _session_formula(body)
        except UnknownId as exc:
            return _error(404, exc)
        except (SchemaError, LexError, ParseError, UnsupportedTemplate) as exc:
            return _error(422, exc)
        constants = frozenset()
        if body.project and body.project in sets:
            constants = effective_mode_model(sets[body.project], None).constants
        session = _Session(PastMonitor(f, constants))
        try:
            for obj in body.events:
                _advance(session, obj)
        except (SchemaError, EvalError, ValueError) as exc:
            return _error(422, exc)
        token = secrets.token_urlsafe(32)
        with sessions_lock:
            sessions[token] = session
        return {
            "session": token,
            "formula": fm.to_text(f),
            "vars": sorted(fm.variables(f, constants)),
            "verdict": session.state.verdict.value,
            "verdicts": session.verdicts,
            "final": session.state.verdict.is_final,
            "closed": session.closed,
        }

    def _advance(session: _Session, obj: dict) -> None:
        event = _event_from_json(obj, session.last_tick)
        session.state, verdict = step(session.monitor, session.state, event)
        session.verdicts.append(verdict.value)
        session.last_tick = event.tick
        if event.terminal:
            session.closed = True

    @app.patch("/api/simulate/{token}")
    def simulate_step(token: str, body: EventBody):
        with sessions_lock:
            session = sessions.get(token)
        if session is None:
            return _error(410, ReqForgeError("unknown or expired session"))
        if not session.lock.acquire(blocking=False):
            return _error(409, ReqForgeError("session is busy"))
        try:
            if session.closed:
                return _error(410, ReqForgeError("session already ended"))
            if time.monotonic() - session.touched > session_idle_seconds:
                with sessions_lock:
                    sessions.pop(token, None)
                return _error(410, ReqForgeError("session expired"))
            try:
                _advance(session, body.event)
            except (SchemaError, EvalError, ValueError) as exc:
                return _error(422, exc)
            session.touched = time.monotonic()
            return {
                "verdict": session.state.verdict.value,
                "verdicts": session.verdicts,
                "final": session.state.verdict.is_final,
                "closed": session.closed,
            }
        finally:
            session.lock.release()

    # -- schemas ------------------------------------------------------------

    @app.get("/api/schema")
    def schemas():
        return _SCHEMAS

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": "0.1.0"}

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


_VERDICTS = [v.value for v in Verdict]

_SCHEMAS: dict[str, Any] = {
    "version": 1,
    "parse_request": {
        "type": "object",
        "required": ["text"],
        "properties": {
            "text": {"type": "string"},
            "mode_var": {"type": ["string", "null"]},
            "tick_ms": {"type": ["integer", "null"], "minimum": 1},
            "revision": {"type": ["integer", "null"]},
        },
    },
    "trace_event": {
        "oneOf": [
            {
                "type": "object",
                "required": ["tick"],
                "properties": {
                    "tick": {"type": "integer", "minimum": 0},
                    "assign": {
                        "type": "object",
                        "additionalProperties": {
                            "type": ["boolean", "number", "string"]},
                    },
                },
                "additionalProperties": False,
            },
            {
                "type": "object",
                "required": ["end"],
                "properties": {"end": {"const": True}},
                "additionalProperties": False,
            },
        ],
    },
    "verdict": {"type": "string", "enum": _VERDICTS},
    "verdict_stream_line": {
        "type": "object",
        "required": ["tick", "id", "verdict"],
        "properties": {
            "tick": {"type": "integer"},
            "id": {"type": "string"},
            "verdict": {"type": "string", "enum": _VERDICTS},
        },
    },
    "metrics_report": {
        "type": "object",
        "required": ["project", "total", "scope", "condition", "timing",
                     "child_count"],
        "properties": {
            "project": {"type": "string"},
            "total": {"type": "integer"},
            "scope": {"type": "object", "additionalProperties": {"type": "integer"}},
            "condition": {"type": "object",
                          "additionalProperties": {"type": "integer"}},
            "timing": {"type": "object",
                       "additionalProperties": {"type": "integer"}},
            "child_count": {"type": "integer"},
        },
    },
    "requirement_set_file": {
        "type": "object",
        "required": ["schema", "project", "requirements"],
        "properties": {
            "schema": {"const": 1},
            "project": {"type": "string"},
            "mode_model": {
                "type": "object",
                "properties": {
                    "variable": {"type": "string"},
                    "modes": {"type": "array", "items": {"type": "string"}},
                },
            },
            "domains": {
                "type": "object",
                "additionalProperties": {
                    "type": "array", "items": {"type": "string"}},
            },
            "requirements": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["id", "text"],
                    "properties": {
                        "id": {"type": "string"},
                        "parent_id": {"type": ["string", "null"]},
                        "text": {"type": "string"},
                        "rationale": {"type": ["string", "null"]},
                    },
                },
            },
        },
    },
    "oracle_spec_file": {
        "type": "object",
        "required": ["version", "tick_period_ms", "monitors"],
        "properties": {
            "version": {"const": 1},
            "tick_period_ms": {"type": "integer", "minimum": 1},
            "mode_variable": {"type": "string"},
            "modes": {"type": "array", "items": {"type": "string"}},
            "monitors": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["id", "formula", "vars", "channel"],
                    "properties": {
                        "id": {"type": "string"},
                        "formula": {"type": "string"},
                        "vars": {
                            "type": "array",
                            "items": {
                                "type": "object",
                                "required": ["name", "type"],
                                "properties": {
                                    "name": {"type": "string"},
                                    "type": {"enum": ["bool", "number", "mode"]},
                                },
                            },
                        },
                        "channel": {"type": "string"},
                    },
                },
            },
        },
    },
}
