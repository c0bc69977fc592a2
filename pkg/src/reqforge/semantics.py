"""Template classification and compilation to finite-trace temporal logic.

A requirement's template key is the triple (scope-option, condition-option,
timing-option).  Compilation is compositional: the scope carves the trace
into active regions, the condition picks window anchors inside each region,
and the timing constrains the response over each window.  The full window
table lives in ``docs/semantics.md``; the compiled formulas are the binding
contract, and an independent interval-based oracle in the test suite checks
every cell over exhaustive small traces.

Conventions worth knowing when reading the output:

* ``in m`` scopes compile against the mode model's tracking variable, so the
  region predicate is the comparison ``__mode = m``; region entry and exit
  are its rising and falling edges.
* A trigger condition arms once per region, at the first tick its expression
  holds there; if it never fires the region demands nothing.
* Negation is pushed through the response when compiling (``!(x = 0)``
  becomes ``x != 0``), which keeps monitor guards readable.  No other
  simplification happens during compilation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from . import expr as ex
from . import formula as fm
from .errors import (
    NotApplicable, Overflow, UnexpandedQuantifier, UnknownDomain,
    UnsupportedTemplate,
)
from .requirement import (
    After, AfterScope, Always, Before, BeforeScope, ConditionSpec,
    ContinualCondition, Duration, Eventually, For, Immediately, InScope,
    Never, NextTimepoint, NotInScope, NullCondition, NullScope,
    OnlyAfterScope, OnlyBeforeScope, OnlyInScope, Requirement, TimingSpec,
    TriggerCondition, Until, WhileScope, Within,
)

SCOPE_OPTIONS = ("null", "in", "notin", "onlyIn", "before", "after",
                 "onlyBefore", "onlyAfter", "while")
CONDITION_OPTIONS = ("null", "trigger", "continual")
TIMING_OPTIONS = ("eventually", "always", "never", "immediately", "next",
                  "until", "before", "after", "for", "within")

MAX_TICKS = 2 ** 63 - 1


@dataclass(frozen=True, slots=True)
class TemplateKey:
    scope_option: str
    condition_option: str
    timing_option: str

    def __post_init__(self):
        if self.scope_option not in SCOPE_OPTIONS:
            raise ValueError(f"unknown scope option {self.scope_option!r}")
        if self.condition_option not in CONDITION_OPTIONS:
            raise ValueError(f"unknown condition option {self.condition_option!r}")
        if self.timing_option not in TIMING_OPTIONS:
            raise ValueError(f"unknown timing option {self.timing_option!r}")

    def as_tuple(self) -> tuple[str, str, str]:
        return (self.scope_option, self.condition_option, self.timing_option)

    def __str__(self) -> str:
        return f"({self.scope_option},{self.condition_option},{self.timing_option})"


@dataclass(frozen=True, slots=True)
class ModeModel:
    """The distinguished variable tracking the current system mode."""

    variable: str = "__mode"
    modes: frozenset[str] = frozenset()

    def comparison(self, mode: str) -> ex.Comparison:
        return ex.Comparison(ex.Var(self.variable), "=", ex.Var(mode))

    @property
    def constants(self) -> frozenset[str]:
        return self.modes


@dataclass(frozen=True, slots=True)
class TickConfig:
    tick_period_ms: int = 100

    def __post_init__(self):
        if self.tick_period_ms <= 0:
            raise ValueError("tick period must be strictly positive")


@dataclass(frozen=True, slots=True)
class QuantDomain:
    """Finite instantiation sets for quantified variables."""

    domains: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for var, values in self.domains.items():
            if not values:
                raise ValueError(f"instantiation list for {var!r} is empty")
            if len(set(values)) != len(values):
                raise ValueError(f"instantiation list for {var!r} has duplicates")

    def values_for(self, var: str) -> tuple[str, ...]:
        if var not in self.domains:
            raise UnknownDomain(var)
        return tuple(self.domains[var])


# ── Classification ─────────────────────────────────────────────────────────

_SCOPE_OPTION = {
    NullScope: "null", InScope: "in", NotInScope: "notin",
    OnlyInScope: "onlyIn", BeforeScope: "before", AfterScope: "after",
    OnlyBeforeScope: "onlyBefore", OnlyAfterScope: "onlyAfter",
    WhileScope: "while",
}
_CONDITION_OPTION = {
    NullCondition: "null", TriggerCondition: "trigger",
    ContinualCondition: "continual",
}
_TIMING_OPTION = {
    Eventually: "eventually", Always: "always", Never: "never",
    Immediately: "immediately", NextTimepoint: "next", Until: "until",
    Before: "before", After: "after", For: "for", Within: "within",
}


def template_key(req: Requirement) -> TemplateKey:
    return TemplateKey(
        _SCOPE_OPTION[type(req.scope)],
        _CONDITION_OPTION[type(req.condition)],
        _TIMING_OPTION[type(req.timing)],
    )


# ── Small rewrites ─────────────────────────────────────────────────────────

def rewrite_never(req: Requirement) -> Requirement:
    """``never r`` as ``always !r``; no double-negation cleanup is applied."""
    if not isinstance(req.timing, Never):
        raise NotApplicable(f"requirement {req.id!r} does not have never timing")
    return Requirement(
        id=req.id, component=req.component, response=ex.Not(req.response),
        scope=req.scope, condition=req.condition, timing=Always(),
        parent_id=req.parent_id, project=req.project,
        rationale=req.rationale, source=req.source,
    )


def duration_to_ticks(d: Duration, cfg: TickConfig = TickConfig()) -> int:
    """Ticks covering the duration (ceiling); tick counts pass through."""
    if d.unit == "tick":
        ticks = d.magnitude
    else:
        ticks = math.ceil(d.milliseconds() / cfg.tick_period_ms)
    if ticks > MAX_TICKS:
        raise Overflow(f"{d.magnitude} {d.unit} exceeds the tick range")
    return ticks


# ── Timeline diagram data ──────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class TimelineSegment:
    label: str
    kind: str  # scope-active | condition-trigger | response-window
    start: str  # symbolic marker
    end: str


@dataclass(frozen=True, slots=True)
class TimelineDiagram:
    """Symbolic timeline for rendering a requirement's shape.

    Markers: trace-start, trace-end, mode-entry, mode-exit, trigger,
    condition-exit, bound-<n>.  Exactly one response-window segment.
    """

    segments: tuple[TimelineSegment, ...]

    def __post_init__(self):
        windows = [s for s in self.segments if s.kind == "response-window"]
        if len(windows) != 1:
            raise ValueError("diagram must contain exactly one response-window")

    def as_json(self) -> list[dict]:
        return [
            {"label": s.label, "kind": s.kind, "start": s.start, "end": s.end}
            for s in self.segments
        ]


_SCOPE_REGION = {
    "null": ("trace-start", "trace-end"),
    "in": ("mode-entry", "mode-exit"),
    "while": ("mode-entry", "mode-exit"),
    "before": ("trace-start", "mode-entry"),
    "after": ("mode-exit", "trace-end"),
    "onlyBefore": ("mode-entry", "trace-end"),
    "onlyAfter": ("trace-start", "mode-exit"),
    "notin": None,  # two complement stretches
    "onlyIn": None,
}


def diagram_data(req: Requirement, cfg: TickConfig = TickConfig()) -> TimelineDiagram:
    """Symbolic segments describing scope region, trigger point and response window."""
    key = template_key(req)
    segments: list[TimelineSegment] = []

    region = _SCOPE_REGION[key.scope_option]
    if region is None:
        segments.append(TimelineSegment("outside mode", "scope-active",
                                        "trace-start", "mode-entry"))
        segments.append(TimelineSegment("outside mode", "scope-active",
                                        "mode-exit", "trace-end"))
        region = ("trace-start", "trace-end")
    elif key.scope_option != "null":
        segments.append(TimelineSegment(key.scope_option, "scope-active",
                                        region[0], region[1]))

    if key.condition_option != "null":
        segments.append(TimelineSegment(key.condition_option, "condition-trigger",
                                        "trigger", "trigger"))
        window_start = "trigger"
    else:
        window_start = region[0]

    match req.timing:
        case Always() | Never() | Eventually():
            window = (window_start, region[1])
        case Immediately():
            window = (window_start, window_start)
        case NextTimepoint():
            window = ("bound-1", "bound-1")
        case Until() | Before():
            window = (window_start, "condition-exit")
        case After(duration=d):
            n = duration_to_ticks(d, cfg)
            window = (f"bound-{n}", f"bound-{n}")
        case For(duration=d):
            n = duration_to_ticks(d, cfg)
            window = (window_start, f"bound-{n}")
        case Within(duration=d):
            n = duration_to_ticks(d, cfg)
            window = (window_start, f"bound-{n}")
        case _:
            window = (window_start, region[1])
    segments.append(TimelineSegment(key.timing_option, "response-window",
                                    window[0], window[1]))
    return TimelineDiagram(tuple(segments))


# ── Quantifier expansion ───────────────────────────────────────────────────

def expand_quantifiers(req: Requirement, dom: QuantDomain) -> list[Requirement]:
    """Instantiate quantifier macros over their finite domains.

    A top-level ``forall`` prefix on the response splits the requirement into
    one child per instantiation (ids suffixed ``_inst_<k>``, parented to the
    original).  Everywhere else, ``forall`` becomes a conjunction and
    ``exists`` a disjunction in place.
    """
    scope = req.scope
    if isinstance(scope, WhileScope):
        scope = WhileScope(_expand_expr(scope.expr, dom))
    condition = req.condition
    if isinstance(condition, TriggerCondition):
        condition = TriggerCondition(_expand_expr(condition.expr, dom), condition.keyword)
    elif isinstance(condition, ContinualCondition):
        condition = ContinualCondition(_expand_expr(condition.expr, dom))

    prefix: list[str] = []
    body = req.response
    while isinstance(body, ex.Forall):
        prefix.append(body.var)
        body = body.body

    if not prefix:
        response = _expand_expr(req.response, dom)
        return [_replace(req, req.id, req.parent_id, scope, condition, response)]

    instantiations: list[list[tuple[str, str]]] = [[]]
    for var in prefix:
        values = dom.values_for(var)
        instantiations = [inst + [(var, v)] for inst in instantiations for v in values]

    out: list[Requirement] = []
    for k, inst in enumerate(instantiations, start=1):
        concrete = body
        for var, value in inst:
            concrete = ex.substitute(concrete, var, value)
        concrete = _expand_expr(concrete, dom)
        child_id = req.id if len(instantiations) == 1 else f"{req.id}_inst_{k}"
        parent = req.parent_id if len(instantiations) == 1 else req.id
        out.append(_replace(req, child_id, parent, scope, condition, concrete))
    return out


def _replace(req: Requirement, req_id: str, parent_id: str | None, scope,
             condition, response) -> Requirement:
    return Requirement(
        id=req_id, component=req.component, response=response, scope=scope,
        condition=condition, timing=req.timing, parent_id=parent_id,
        project=req.project, rationale=req.rationale, source=req.source,
    )


def _expand_expr(e: ex.Expr, dom: QuantDomain) -> ex.Expr:
    match e:
        case ex.Forall(var, body) | ex.Exists(var, body):
            expanded = _expand_expr(body, dom)
            parts = [ex.substitute(expanded, var, v) for v in dom.values_for(var)]
            combined = parts[0]
            combine = ex.And if isinstance(e, ex.Forall) else ex.Or
            for p in parts[1:]:
                combined = combine(combined, p)
            return combined
        case ex.Not(x):
            return ex.Not(_expand_expr(x, dom))
        case ex.And(l, r):
            return ex.And(_expand_expr(l, dom), _expand_expr(r, dom))
        case ex.Or(l, r):
            return ex.Or(_expand_expr(l, dom), _expand_expr(r, dom))
        case ex.Implies(l, r):
            return ex.Implies(_expand_expr(l, dom), _expand_expr(r, dom))
        case ex.Iff(l, r):
            return ex.Iff(_expand_expr(l, dom), _expand_expr(r, dom))
        case ex.IfThenElse(c, t, o):
            return ex.IfThenElse(_expand_expr(c, dom), _expand_expr(t, dom),
                                 _expand_expr(o, dom))
        case _:
            return e


# ── Expression → formula (negation pushing) ────────────────────────────────

def _conv(e: ex.BoolExpr, negated: bool = False) -> fm.Formula:
    """Boolean expression as a formula with negation pushed to the leaves."""
    match e:
        case ex.Not(x):
            return _conv(x, not negated)
        case ex.And(l, r):
            if negated:
                return fm.FOr(_conv(l, True), _conv(r, True))
            return fm.FAnd(_conv(l), _conv(r))
        case ex.Or(l, r):
            if negated:
                return fm.FAnd(_conv(l, True), _conv(r, True))
            return fm.FOr(_conv(l), _conv(r))
        case ex.Implies(l, r):
            if negated:
                return fm.FAnd(_conv(l), _conv(r, True))
            return fm.FImplies(_conv(l), _conv(r))
        case ex.Iff(l, r):
            if negated:
                return fm.FIff(_conv(l), _conv(r, True))
            return fm.FIff(_conv(l), _conv(r))
        case ex.IfThenElse(c, t, o):
            return fm.FOr(fm.FAnd(_conv(c), _conv(t, negated)),
                          fm.FAnd(_conv(c, True), _conv(o, negated)))
        case ex.Comparison():
            return fm.FAtom(ex.negate_comparison(e) if negated else e)
        case ex.Atom() | ex.FnApp():
            return fm.FNot(fm.FAtom(e)) if negated else fm.FAtom(e)
        case ex.Forall() | ex.Exists():
            raise UnexpandedQuantifier(
                "requirement contains quantifier macros; expand them first")
    raise UnexpandedQuantifier(f"cannot compile expression {ex.to_text(e)!r}")


def _check_expandable(req: Requirement) -> None:
    exprs = [req.response]
    if isinstance(req.condition, (TriggerCondition, ContinualCondition)):
        exprs.append(req.condition.expr)
    if isinstance(req.scope, WhileScope):
        exprs.append(req.scope.expr)
    for e in exprs:
        if ex.has_quantifier(e):
            raise UnexpandedQuantifier(
                f"requirement {req.id!r} contains quantifier macros; expand them first")


# ── Future-time compilation ────────────────────────────────────────────────

_NEGATING_SCOPES = (OnlyInScope, OnlyBeforeScope, OnlyAfterScope)


def to_future_ltl(req: Requirement, mm: ModeModel = ModeModel(),
                  cfg: TickConfig = TickConfig()) -> fm.Formula:
    """Pure-future finite-trace formula for the requirement.

    Composition is scope(condition(timing(response))).  ``onlyIn``,
    ``onlyBefore`` and ``onlyAfter`` constrain the *negated* response over the
    complementary region.  ``onlyBefore``/``onlyAfter`` with ``for``/``within``
    timing are outside the v1 table.
    """
    _check_expandable(req)
    key = template_key(req)
    if key.scope_option in ("onlyBefore", "onlyAfter") and \
            key.timing_option in ("for", "within"):
        raise UnsupportedTemplate(key, "duration window over a complement region")

    negate = isinstance(req.scope, _NEGATING_SCOPES)
    timing, q = _effective_timing(req, negate)

    scope = req.scope
    match scope:
        case NullScope():
            return _cond_simple(req.condition, _window_simple(timing, q, cfg), cfg)
        case InScope(mode):
            return _block_family(_conv(mm.comparison(mode)),
                                 _conv(mm.comparison(mode), True),
                                 req.condition, timing, q, cfg, anchored=True)
        case WhileScope(guard):
            return _block_family(_conv(guard), _conv(guard, True),
                                 req.condition, timing, q, cfg, anchored=True)
        case NotInScope(mode) | OnlyInScope(mode):
            return _block_family(_conv(mm.comparison(mode), True),
                                 _conv(mm.comparison(mode)),
                                 req.condition, timing, q, cfg, anchored=True)
        case BeforeScope(mode):
            return _block_family(_conv(mm.comparison(mode), True),
                                 _conv(mm.comparison(mode)),
                                 req.condition, timing, q, cfg, anchored=False)
        case OnlyBeforeScope(mode):
            mu = _conv(mm.comparison(mode))
            not_mu = _conv(mm.comparison(mode), True)
            payload = _cond_simple(req.condition, _window_simple(timing, q, cfg), cfg)
            return fm.FImplies(fm.FFinally(mu),
                               fm.FUntil(not_mu, fm.FAnd(mu, payload)))
        case AfterScope(mode):
            mu = _conv(mm.comparison(mode))
            not_mu = _conv(mm.comparison(mode), True)
            fall = fm.FAnd(mu, fm.FNext(not_mu))
            payload = _cond_simple(req.condition, _window_simple(timing, q, cfg), cfg)
            inner = fm.FUntil(mu, fm.FAnd(not_mu, payload))
            return fm.FImplies(fm.FFinally(fall),
                               fm.FUntil(not_mu, fm.FAnd(mu, inner)))
        case OnlyAfterScope(mode):
            mu = _conv(mm.comparison(mode))
            not_mu = _conv(mm.comparison(mode), True)
            fallx = fm.FAnd(mu, fm.FNext(not_mu))
            return _fallx_family(fallx, req.condition, timing, q, cfg)
    raise UnsupportedTemplate(key)


def _effective_timing(req: Requirement, negate: bool) -> tuple[TimingSpec, fm.Formula]:
    """Fold the never-rewrite and only-scope response negation into (timing, q)."""
    timing = req.timing
    if isinstance(timing, Never):
        timing = Always()
        negate = not negate
    return timing, _conv(req.response, negate)


# -- whole-trace / suffix-region windows --------------------------------------

def _window_simple(timing: TimingSpec, q: fm.Formula, cfg: TickConfig) -> fm.Formula:
    match timing:
        case Always():
            return fm.FGlobally(q)
        case Eventually():
            return fm.FFinally(q)
        case Immediately():
            return fm.FFinallyBounded(0, 0, q)
        case NextTimepoint():
            return fm.FNext(q)
        case Until(expr=u):
            return fm.FUntil(q, fm.FOr(_conv(u), fm.FEnd()))
        case Before(expr=b):
            nb = _conv(b, True)
            return fm.FUntil(fm.FAnd(nb, fm.fnot(q)),
                             fm.FOr(fm.FAnd(nb, q), fm.FAnd(nb, fm.FEnd())))
        case After(duration=d):
            n = duration_to_ticks(d, cfg)
            return fm.FFinallyBounded(n, n, q)
        case For(duration=d):
            n = duration_to_ticks(d, cfg)
            return fm.FGloballyBounded(0, n - 1, q)
        case Within(duration=d):
            n = duration_to_ticks(d, cfg)
            return fm.FFinallyBounded(0, n, q)
    raise UnsupportedTemplate(timing)


def _cond_simple(cond: ConditionSpec, window: fm.Formula,
                 cfg: TickConfig) -> fm.Formula:
    match cond:
        case NullCondition():
            return window
        case TriggerCondition(expr=c):
            cf = _conv(c)
            ncf = _conv(c, True)
            return fm.FOr(fm.FUntil(ncf, fm.FAnd(cf, window)), fm.FGlobally(ncf))
        case ContinualCondition(expr=c):
            return fm.FGlobally(fm.FImplies(_conv(c), window))
    raise UnsupportedTemplate(cond)


# -- repeated-block and prefix-block regions ----------------------------------

def _block_family(pi: fm.Formula, npi: fm.Formula, cond: ConditionSpec,
                  timing: TimingSpec, q: fm.Formula, cfg: TickConfig,
                  anchored: bool) -> fm.Formula:
    """Regions are maximal blocks of ``pi``; ``anchored=False`` keeps only the
    block starting at the first position (the ``before``-scope prefix)."""
    window = _window_block(timing, q, pi, npi, cfg)
    nonempty = fm.FFinally(fm.FTrue())
    universal = isinstance(timing, (Always, Never, Until, Before))

    match cond:
        case NullCondition():
            if anchored:
                return _anchor_blocks(pi, npi, window)
            return fm.FImplies(nonempty, window) if universal else window
        case TriggerCondition(expr=c):
            cf, ncf = _conv(c), _conv(c, True)
            if anchored:
                search = fm.FUntil(
                    fm.FAnd(pi, ncf),
                    fm.disj(npi, fm.conj(pi, cf, window), fm.conj(fm.FEnd(), pi, ncf)),
                )
                return _anchor_blocks(pi, npi, search)
            search = fm.FOr(
                fm.FUntil(fm.FAnd(pi, ncf), fm.FOr(fm.conj(pi, cf, window), npi)),
                fm.FGlobally(fm.FOr(npi, ncf)),
            )
            return search
        case ContinualCondition(expr=c):
            cf = _conv(c)
            if anchored:
                return fm.FGlobally(fm.FImplies(fm.FAnd(pi, cf), window))
            per_tick = fm.FImplies(cf, window)
            walk = fm.FUntil(
                fm.FAnd(pi, per_tick),
                fm.disj(npi, fm.conj(fm.FEnd(), pi, per_tick)),
            )
            return fm.FImplies(nonempty, walk)
    raise UnsupportedTemplate(cond)


def _anchor_blocks(pi: fm.Formula, npi: fm.Formula, payload: fm.Formula) -> fm.Formula:
    """Evaluate ``payload`` at the start of every maximal ``pi``-block.

    The first-position anchor carries an F(true) guard so that region
    predicates whose vacuous value is true (negated expressions in a
    ``while`` scope) stay inert on the empty trace.
    """
    at_start = fm.FImplies(fm.FAnd(pi, fm.FFinally(fm.FTrue())), payload)
    at_edges = fm.FGlobally(
        fm.FImplies(fm.FAnd(npi, fm.FNext(pi)), fm.FNext(payload))
    )
    return fm.FAnd(at_start, at_edges)


def _window_block(timing: TimingSpec, q: fm.Formula, pi: fm.Formula,
                  npi: fm.Formula, cfg: TickConfig) -> fm.Formula:
    nq = fm.fnot(q)
    match timing:
        case Always():
            return fm.FUntil(fm.FAnd(pi, q),
                             fm.FOr(npi, fm.conj(fm.FEnd(), pi, q)))
        case Eventually():
            return fm.FUntil(pi, fm.FAnd(pi, q))
        case Immediately():
            return fm.FFinallyBounded(0, 0, fm.FAnd(pi, q))
        case NextTimepoint():
            return fm.FAnd(pi, fm.FNext(fm.FAnd(pi, q)))
        case Until(expr=u):
            uf = _conv(u)
            return fm.FUntil(fm.FAnd(pi, q),
                             fm.disj(npi, fm.FAnd(pi, uf), fm.FAnd(fm.FEnd(), pi)))
        case Before(expr=b):
            nb = _conv(b, True)
            return fm.FUntil(
                fm.conj(pi, nb, nq),
                fm.disj(npi, fm.conj(pi, nb, q), fm.conj(fm.FEnd(), pi, nb)),
            )
        case After(duration=d):
            n = duration_to_ticks(d, cfg)
            return fm.FAnd(fm.FFinallyBounded(n, n, q),
                           fm.FGloballyBounded(0, n, pi))
        case For(duration=d):
            n = duration_to_ticks(d, cfg)
            return fm.conj(*[
                fm.FImplies(fm.FGloballyBounded(0, j, pi),
                            fm.FGloballyBounded(j, j, q))
                for j in range(n)
            ])
        case Within(duration=d):
            n = duration_to_ticks(d, cfg)
            return fm.disj(*[
                fm.FAnd(fm.FGloballyBounded(0, j, pi),
                        fm.FFinallyBounded(j, j, q))
                for j in range(n + 1)
            ])
    raise UnsupportedTemplate(timing)


# -- complement-of-after regions (prefix until the first mode exit) -----------

def _fallx_family(fallx: fm.Formula, cond: ConditionSpec, timing: TimingSpec,
                  q: fm.Formula, cfg: TickConfig) -> fm.Formula:
    window = _window_fallx(timing, q, fallx, cfg)
    nonempty = fm.FFinally(fm.FTrue())
    match cond:
        case NullCondition():
            universal = isinstance(timing, (Always, Never, Until, Before))
            return fm.FImplies(nonempty, window) if universal else window
        case TriggerCondition(expr=c):
            cf, ncf = _conv(c), _conv(c, True)
            nfx = fm.fnot(fallx)
            return fm.FOr(
                fm.FUntil(fm.FAnd(ncf, nfx),
                          fm.FOr(fm.FAnd(cf, window), fm.FAnd(ncf, fallx))),
                fm.FGlobally(ncf),
            )
        case ContinualCondition(expr=c):
            per_tick = fm.FImplies(_conv(c), window)
            nfx = fm.fnot(fallx)
            walk = fm.FUntil(
                fm.FAnd(per_tick, nfx),
                fm.FAnd(per_tick, fm.FOr(fallx, fm.FEnd())),
            )
            return fm.FImplies(nonempty, walk)
    raise UnsupportedTemplate(cond)


def _window_fallx(timing: TimingSpec, q: fm.Formula, fallx: fm.Formula,
                  cfg: TickConfig) -> fm.Formula:
    nq = fm.fnot(q)
    nfx = fm.fnot(fallx)
    match timing:
        case Always():
            return fm.FUntil(fm.FAnd(q, nfx),
                             fm.FOr(fm.FAnd(q, fallx), fm.FAnd(q, fm.FEnd())))
        case Eventually():
            return fm.FUntil(fm.FAnd(nq, nfx), q)
        case Immediately():
            return fm.FFinallyBounded(0, 0, q)
        case NextTimepoint():
            return fm.FAnd(nfx, fm.FNext(q))
        case Until(expr=u):
            uf, nuf = _conv(u), _conv(u, True)
            return fm.FUntil(
                fm.conj(q, nuf, nfx),
                fm.disj(uf, fm.conj(q, nuf, fallx), fm.FAnd(nuf, fm.FEnd())),
            )
        case Before(expr=b):
            nb = _conv(b, True)
            return fm.FUntil(
                fm.conj(nb, nq, nfx),
                fm.disj(fm.FAnd(nb, q), fm.FAnd(nb, fallx), fm.FAnd(nb, fm.FEnd())),
            )
        case After(duration=d):
            n = duration_to_ticks(d, cfg)
            return fm.FAnd(fm.FGloballyBounded(0, n - 1, nfx),
                           fm.FFinallyBounded(n, n, q))
    raise UnsupportedTemplate(timing)


# ── Past-time compilation ──────────────────────────────────────────────────

PAST_SCOPES = ("null", "in", "while")
PAST_CONDITIONS = ("null", "trigger")
PAST_TIMINGS = ("eventually", "always", "never", "immediately", "next")


def past_supported(key: TemplateKey) -> bool:
    return (key.scope_option in PAST_SCOPES
            and key.condition_option in PAST_CONDITIONS
            and key.timing_option in PAST_TIMINGS)


def to_past_ltl(req: Requirement, mm: ModeModel = ModeModel()) -> fm.Formula:
    """Pure-past formula whose end-of-trace verdict matches the future form.

    v1 supports scope in {null, in, while}, condition in {null, trigger},
    timing in {eventually, always, never, immediately, next}; anything else
    raises UnsupportedTemplate.
    """
    _check_expandable(req)
    key = template_key(req)
    if not past_supported(key):
        raise UnsupportedTemplate(key, "outside the past-time subset")

    timing, q = _effective_timing(req, negate=False)
    first = fm.FNot(fm.FYesterday(fm.FTrue()))

    if isinstance(req.scope, NullScope):
        if isinstance(req.condition, NullCondition):
            match timing:
                case Always():
                    return fm.FHistorically(q)
                case Eventually():
                    return fm.FOnce(q)
                case Immediately():
                    return fm.FOnce(fm.FAnd(first, q))
                case NextTimepoint():
                    return fm.FOnce(fm.FAnd(fm.FYesterday(first), q))
        else:
            c = _conv(req.condition.expr)
            armed = fm.FOnce(c)
            fc = fm.FAnd(c, fm.FNot(fm.FYesterday(armed)))
            match timing:
                case Always():
                    return fm.FHistorically(fm.FImplies(armed, q))
                case Eventually():
                    return fm.FOr(fm.FNot(armed), fm.FOnce(fm.FAnd(q, armed)))
                case Immediately():
                    return fm.FHistorically(fm.FImplies(fc, q))
                case NextTimepoint():
                    return fm.FAnd(
                        fm.FHistorically(fm.FImplies(fm.FYesterday(fc), q)),
                        _never_now(fc),
                    )
        raise UnsupportedTemplate(key)

    # in / while scopes: regions are maximal blocks of the scope predicate.
    if isinstance(req.scope, InScope):
        pi = _conv(mm.comparison(req.scope.mode))
        npi = _conv(mm.comparison(req.scope.mode), True)
    else:
        pi = _conv(req.scope.expr)
        npi = _conv(req.scope.expr, True)

    seg_start = fm.FAnd(pi, fm.FOr(first, fm.FYesterday(npi)))
    if isinstance(req.condition, NullCondition):
        armed = pi
        w0 = seg_start
    else:
        c = _conv(req.condition.expr)
        armed = fm.FSince(pi, fm.FAnd(pi, c))
        w0 = fm.conj(pi, c, fm.FNot(fm.FYesterday(armed)))

    match timing:
        case Always():
            return fm.FHistorically(fm.FImplies(armed, q))
        case Eventually():
            nq = fm.fnot(q)
            violation = fm.FSince(fm.FAnd(armed, nq), fm.FAnd(w0, nq))
            ended_early = fm.FOnce(fm.FAnd(npi, fm.FYesterday(violation)))
            return fm.FNot(fm.FOr(ended_early, violation))
        case Immediately():
            return fm.FHistorically(fm.FImplies(w0, q))
        case NextTimepoint():
            return fm.FAnd(
                fm.FHistorically(
                    fm.FImplies(fm.FYesterday(w0), fm.FAnd(pi, q))),
                _never_now(w0),
            )
    raise UnsupportedTemplate(key)


def _never_now(window_start: fm.Formula) -> fm.Formula:
    """No window may open at the final position (its next tick is missing).

    Conjoining O(true) pins the vacuous empty-trace value to false even when
    the window-start predicate contains negations.
    """
    return fm.FNot(fm.FAnd(window_start, fm.FOnce(fm.FTrue())))
