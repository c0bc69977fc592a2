"""Domain types for one structured requirement.

A requirement sentence has up to five fields in fixed order — scope,
condition, component, the mandatory ``shall``, timing, response — of which
component and response are mandatory.  Omitted fields default to null scope,
null condition, and eventual timing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CycleDetected
from .expr import BoolExpr, IDENT_RE

TIME_UNITS = ("tick", "second", "minute", "hour")

_UNIT_MS = {"second": 1_000, "minute": 60_000, "hour": 3_600_000}


@dataclass(frozen=True, slots=True)
class SourceText:
    text: str
    origin: str | None = None


@dataclass(frozen=True, slots=True)
class Duration:
    magnitude: int
    unit: str  # one of TIME_UNITS

    def __post_init__(self):
        if self.magnitude <= 0:
            raise ValueError("duration magnitude must be strictly positive")
        if self.unit not in TIME_UNITS:
            raise ValueError(f"unknown time unit {self.unit!r}")

    def milliseconds(self) -> int:
        """Millisecond equivalent; undefined for the abstract tick unit."""
        if self.unit == "tick":
            raise ValueError("tick durations have no wall-clock equivalent")
        return self.magnitude * _UNIT_MS[self.unit]


# ── Scope ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class NullScope:
    pass


@dataclass(frozen=True, slots=True)
class InScope:
    mode: str


@dataclass(frozen=True, slots=True)
class NotInScope:
    mode: str


@dataclass(frozen=True, slots=True)
class OnlyInScope:
    mode: str


@dataclass(frozen=True, slots=True)
class BeforeScope:
    mode: str


@dataclass(frozen=True, slots=True)
class AfterScope:
    mode: str


@dataclass(frozen=True, slots=True)
class OnlyBeforeScope:
    mode: str


@dataclass(frozen=True, slots=True)
class OnlyAfterScope:
    mode: str


@dataclass(frozen=True, slots=True)
class WhileScope:
    expr: BoolExpr


ScopeSpec = (
    NullScope | InScope | NotInScope | OnlyInScope | BeforeScope
    | AfterScope | OnlyBeforeScope | OnlyAfterScope | WhileScope
)


# ── Condition ──────────────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class NullCondition:
    pass


@dataclass(frozen=True, slots=True)
class TriggerCondition:
    """Arms the response once, at the first tick the expression holds in scope."""

    expr: BoolExpr
    keyword: str = "when"  # when | if | upon — surface spelling only


@dataclass(frozen=True, slots=True)
class ContinualCondition:
    """Re-arms the response at every in-scope tick the expression holds."""

    expr: BoolExpr


ConditionSpec = NullCondition | TriggerCondition | ContinualCondition


# ── Timing ─────────────────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class Eventually:
    pass


@dataclass(frozen=True, slots=True)
class Always:
    pass


@dataclass(frozen=True, slots=True)
class Never:
    pass


@dataclass(frozen=True, slots=True)
class Immediately:
    pass


@dataclass(frozen=True, slots=True)
class NextTimepoint:
    pass


@dataclass(frozen=True, slots=True)
class Until:
    expr: BoolExpr


@dataclass(frozen=True, slots=True)
class Before:
    expr: BoolExpr


@dataclass(frozen=True, slots=True)
class After:
    duration: Duration


@dataclass(frozen=True, slots=True)
class For:
    duration: Duration


@dataclass(frozen=True, slots=True)
class Within:
    duration: Duration


TimingSpec = (
    Eventually | Always | Never | Immediately | NextTimepoint
    | Until | Before | After | For | Within
)


# ── Requirement and editor spans ───────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class Requirement:
    id: str
    component: str
    response: BoolExpr
    scope: ScopeSpec = field(default_factory=NullScope)
    condition: ConditionSpec = field(default_factory=NullCondition)
    timing: TimingSpec = field(default_factory=Eventually)
    parent_id: str | None = None
    project: str = ""
    rationale: str | None = None
    source: SourceText | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.id:
            raise ValueError("requirement id must be non-empty")
        if self.parent_id == self.id:
            raise CycleDetected(self.id)
        if not IDENT_RE.match(self.component):
            raise ValueError(f"component must be a single identifier, got {self.component!r}")


Span = tuple[int, int]

_FIELD_ORDER = ("scope", "condition", "component", "shall", "timing", "response")


@dataclass(frozen=True, slots=True)
class FieldSpans:
    """Character ranges of each recognized field, for editor highlighting."""

    scope: Span | None = None
    condition: Span | None = None
    component: Span | None = None
    shall: Span | None = None
    timing: Span | None = None
    response: Span | None = None

    def __post_init__(self):
        prev_end = 0
        for name in _FIELD_ORDER:
            span = getattr(self, name)
            if span is None:
                continue
            start, end = span
            if start < prev_end or end < start:
                raise ValueError(f"field spans out of order at {name!r}")
            prev_end = end

    def as_dict(self) -> dict[str, Span | None]:
        return {name: getattr(self, name) for name in _FIELD_ORDER}
