"""Requirement sets: identity, parent-child traceability, metrics, import/export.

Sets are immutable snapshots; every mutation returns a new set.  The
parent-child relation is a forest (single parent, no cycles) and is purely
informational: no semantic refinement is checked.  The persisted file formats
keep the sentence as the single source of truth; structured fields are
re-derived by parsing on import.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import (
    CycleDetected, ParseError, SchemaError, UnknownId, UnknownParent,
)
from .parser import parse_requirement, pretty_print
from .requirement import (
    AfterScope, BeforeScope, InScope, NotInScope, OnlyAfterScope,
    OnlyBeforeScope, OnlyInScope, Requirement,
)
from .semantics import ModeModel, QuantDomain, template_key

SCHEMA_VERSION = 1


@dataclass(frozen=True, slots=True)
class RequirementSet:
    project: str
    requirements: Mapping[str, Requirement] = field(default_factory=dict)
    mode_model: ModeModel = ModeModel()
    domains: QuantDomain = QuantDomain()

    def __post_init__(self):
        for rid, req in self.requirements.items():
            if rid != req.id:
                raise ValueError(f"key {rid!r} does not match requirement id {req.id!r}")
        _check_forest(self.requirements)

    def get(self, req_id: str) -> Requirement:
        if req_id not in self.requirements:
            raise UnknownId(req_id)
        return self.requirements[req_id]

    def ordered(self) -> list[Requirement]:
        return [self.requirements[k] for k in sorted(self.requirements)]


def _check_forest(reqs: Mapping[str, Requirement]) -> None:
    for req in reqs.values():
        seen = {req.id}
        cursor = req.parent_id
        while cursor is not None:
            if cursor not in reqs:
                raise UnknownParent(req.id, cursor)
            if cursor in seen:
                raise CycleDetected(cursor)
            seen.add(cursor)
            cursor = reqs[cursor].parent_id


def _adopt(req: Requirement, project: str) -> Requirement:
    if req.project == project:
        return req
    return Requirement(
        id=req.id, component=req.component, response=req.response,
        scope=req.scope, condition=req.condition, timing=req.timing,
        parent_id=req.parent_id, project=project, rationale=req.rationale,
        source=req.source,
    )


def upsert(s: RequirementSet, req: Requirement) -> RequirementSet:
    """Insert or replace by id, adopting the set's project and preserving the
    forest invariant."""
    if req.parent_id == req.id:
        raise CycleDetected(req.id)
    updated = dict(s.requirements)
    updated[req.id] = _adopt(req, s.project)
    if req.parent_id is not None and req.parent_id not in updated:
        raise UnknownParent(req.id, req.parent_id)
    _check_forest(updated)
    return RequirementSet(s.project, updated, s.mode_model, s.domains)


def upsert_many(s: RequirementSet, reqs: Iterable[Requirement]) -> RequirementSet:
    """Batch upsert: parents may be created in the same batch."""
    updated = dict(s.requirements)
    for req in reqs:
        updated[req.id] = _adopt(req, s.project)
    for req in updated.values():
        if req.parent_id is not None and req.parent_id not in updated:
            raise UnknownParent(req.id, req.parent_id)
    _check_forest(updated)
    return RequirementSet(s.project, updated, s.mode_model, s.domains)


def remove(s: RequirementSet, req_id: str) -> RequirementSet:
    """Remove a requirement; its children are re-rooted (parent cleared)."""
    if req_id not in s.requirements:
        raise UnknownId(req_id)
    updated = {}
    for rid, req in s.requirements.items():
        if rid == req_id:
            continue
        if req.parent_id == req_id:
            req = _with_parent(req, None)
        updated[rid] = req
    return RequirementSet(s.project, updated, s.mode_model, s.domains)


def _with_parent(req: Requirement, parent_id: str | None) -> Requirement:
    return Requirement(
        id=req.id, component=req.component, response=req.response,
        scope=req.scope, condition=req.condition, timing=req.timing,
        parent_id=parent_id, project=req.project, rationale=req.rationale,
        source=req.source,
    )


def effective_mode_model(s: RequirementSet, mode_var: str | None = None) -> ModeModel:
    """Set-declared modes plus every mode a scope names."""
    modes = set(s.mode_model.modes)
    for req in s.requirements.values():
        scope = req.scope
        if isinstance(scope, (InScope, NotInScope, OnlyInScope, BeforeScope,
                              AfterScope, OnlyBeforeScope, OnlyAfterScope)):
            modes.add(scope.mode)
    return ModeModel(mode_var or s.mode_model.variable, frozenset(modes))


def descendants(s: RequirementSet, req_id: str) -> list[Requirement]:
    """Preorder subtree below ``req_id`` (children sorted by id), root excluded."""
    s.get(req_id)
    children: dict[str | None, list[str]] = {}
    for rid in sorted(s.requirements):
        children.setdefault(s.requirements[rid].parent_id, []).append(rid)
    out: list[Requirement] = []

    def visit(rid: str) -> None:
        for child in children.get(rid, []):
            out.append(s.requirements[child])
            visit(child)

    visit(req_id)
    return out


# ── Metrics ────────────────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class MetricsReport:
    project: str
    total: int
    scope_counts: Mapping[str, int]
    condition_counts: Mapping[str, int]
    timing_counts: Mapping[str, int]
    child_count: int


def metrics(s: RequirementSet) -> MetricsReport:
    scope: dict[str, int] = {}
    condition: dict[str, int] = {}
    timing: dict[str, int] = {}
    children = 0
    for req in s.requirements.values():
        key = template_key(req)
        scope[key.scope_option] = scope.get(key.scope_option, 0) + 1
        condition[key.condition_option] = condition.get(key.condition_option, 0) + 1
        timing[key.timing_option] = timing.get(key.timing_option, 0) + 1
        if req.parent_id is not None:
            children += 1
    return MetricsReport(
        project=s.project, total=len(s.requirements),
        scope_counts=dict(sorted(scope.items())),
        condition_counts=dict(sorted(condition.items())),
        timing_counts=dict(sorted(timing.items())),
        child_count=children,
    )


def metrics_json(report: MetricsReport) -> str:
    """Canonical JSON rendering, byte-identical across CLI and service."""
    payload = {
        "project": report.project,
        "total": report.total,
        "scope": dict(report.scope_counts),
        "condition": dict(report.condition_counts),
        "timing": dict(report.timing_counts),
        "child_count": report.child_count,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


# ── Persistence ────────────────────────────────────────────────────────────

def requirement_text(req: Requirement) -> str:
    return req.source.text if req.source is not None else pretty_print(req).text


def export_set(s: RequirementSet, format: str = "json") -> bytes:
    if format == "json":
        payload = {
            "schema": SCHEMA_VERSION,
            "project": s.project,
            "mode_model": {
                "variable": s.mode_model.variable,
                "modes": sorted(s.mode_model.modes),
            },
            "domains": {k: list(v) for k, v in sorted(s.domains.domains.items())},
            "requirements": [
                {
                    "id": req.id,
                    "parent_id": req.parent_id,
                    "text": requirement_text(req),
                    "rationale": req.rationale,
                }
                for req in s.ordered()
            ],
        }
        return (json.dumps(payload, indent=2, sort_keys=False) + "\n").encode()
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id", "parent_id", "project", "fretish_text", "rationale"])
        for req in s.ordered():
            writer.writerow([req.id, req.parent_id or "", s.project,
                             requirement_text(req), req.rationale or ""])
        return buf.getvalue().encode()
    raise SchemaError(f"unknown export format {format!r}")


def import_set(data: bytes, format: str = "json") -> RequirementSet:
    """Parse and validate a persisted set; every sentence goes through the parser."""
    if format == "json":
        return _import_json(data)
    if format == "csv":
        return _import_csv(data)
    raise SchemaError(f"unknown import format {format!r}")


def _parse_entry(text: str, req_id: str, parent_id: str | None, project: str,
                 rationale: str | None) -> Requirement:
    try:
        req, _ = parse_requirement(text, req_id=req_id, project=project,
                                   parent_id=parent_id, rationale=rationale)
    except ParseError as exc:
        raise ParseError(f"requirement {req_id!r}: {exc.message}",
                         exc.offset, text) from exc
    return req


def _import_json(data: bytes) -> RequirementSet:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise SchemaError("top level must be an object")
    if payload.get("schema") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {payload.get('schema')!r}")
    project = payload.get("project")
    if not isinstance(project, str):
        raise SchemaError("\"project\" must be a string")
    mm_raw = payload.get("mode_model", {})
    if not isinstance(mm_raw, dict):
        raise SchemaError("\"mode_model\" must be an object")
    mm = ModeModel(mm_raw.get("variable", "__mode"),
                   frozenset(mm_raw.get("modes", [])))
    domains_raw = payload.get("domains", {})
    if not isinstance(domains_raw, dict):
        raise SchemaError("\"domains\" must be an object")
    domains = QuantDomain({k: tuple(v) for k, v in domains_raw.items()})
    entries = payload.get("requirements")
    if not isinstance(entries, list):
        raise SchemaError("\"requirements\" must be an array")
    reqs: dict[str, Requirement] = {}
    for entry in entries:
        if not isinstance(entry, dict) or "id" not in entry or "text" not in entry:
            raise SchemaError("each requirement needs \"id\" and \"text\"")
        rid = entry["id"]
        if rid in reqs:
            raise SchemaError(f"duplicate id {rid!r}")
        reqs[rid] = _parse_entry(entry["text"], rid, entry.get("parent_id"),
                                 project, entry.get("rationale"))
    return RequirementSet(project, reqs, mm, domains)


def _import_csv(data: bytes) -> RequirementSet:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise SchemaError(f"not UTF-8: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    required = {"id", "fretish_text"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        missing = sorted(required - set(reader.fieldnames or []))
        raise SchemaError(f"missing columns: {missing}", line=1)
    reqs: dict[str, Requirement] = {}
    project = ""
    for lineno, row in enumerate(reader, start=2):
        rid = (row.get("id") or "").strip()
        if not rid:
            raise SchemaError("empty id", line=lineno)
        if rid in reqs:
            raise SchemaError(f"duplicate id {rid!r}", line=lineno)
        project = (row.get("project") or project or "").strip() or project
        parent = (row.get("parent_id") or "").strip() or None
        rationale = (row.get("rationale") or "").strip() or None
        reqs[rid] = _parse_entry(row["fretish_text"], rid, parent, project, rationale)
    return RequirementSet(project, reqs)


def load_set(path: str) -> RequirementSet:
    """Load a set file, picking the format from the extension."""
    fmt = "csv" if path.endswith(".csv") else "json"
    with open(path, "rb") as fh:
        return import_set(fh.read(), fmt)
