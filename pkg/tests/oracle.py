"""Interval-arithmetic oracle for requirement satisfaction on complete traces.

This is the independent executable reading of the window table implemented by
``reqforge.semantics``: scopes carve index regions out of the trace,
conditions pick window anchors, timings check the response over each window.
It never builds a temporal formula, so it can arbitrate the compilers.
"""

from __future__ import annotations

from reqforge import expr as ex
from reqforge.requirement import (
    After, AfterScope, Always, Before, BeforeScope, ContinualCondition,
    Eventually, For, Immediately, InScope, Never, NextTimepoint, NotInScope,
    NullCondition, NullScope, OnlyAfterScope, OnlyBeforeScope, OnlyInScope,
    Requirement, TriggerCondition, Until, WhileScope, Within,
)
from reqforge.semantics import ModeModel, TickConfig, duration_to_ticks

# Timings that hold vacuously over an empty region (everything else needs an
# occurrence, which an empty region cannot provide).
_EMPTY_REGION_TRUE = (Always, Never, Until, Before, For)
# On the genuinely empty trace the whole-trace family follows the plain
# finite-trace reading instead, where until/before are unsatisfied.
_EMPTY_TRACE_TRUE_SIMPLE = (Always, Never, For)

_NEGATING = (OnlyInScope, OnlyBeforeScope, OnlyAfterScope)


def requirement_holds(req: Requirement, rows: list[dict],
                      mm: ModeModel = ModeModel(),
                      cfg: TickConfig = TickConfig()) -> bool:
    """Does the complete trace satisfy the requirement?"""
    n = len(rows)
    consts = mm.constants

    def ev(e: ex.BoolExpr, i: int) -> bool:
        return ex.eval_bool(e, rows[i], consts)

    negate = isinstance(req.scope, _NEGATING)
    timing = req.timing
    if isinstance(timing, Never):
        timing = Always()
        negate = not negate

    def q(i: int) -> bool:
        v = ev(req.response, i)
        return (not v) if negate else v

    family, regions = _regions(req, rows, mm)

    if n == 0:
        if family in ("simple", "prefix", "fallx"):
            if not isinstance(req.condition, NullCondition):
                return True
            allowed = (_EMPTY_TRACE_TRUE_SIMPLE if family == "simple"
                       else _EMPTY_REGION_TRUE)
            return isinstance(timing, allowed)
        return True

    for (s, e) in regions:
        if s > e:  # empty region inside a non-empty trace
            if isinstance(req.condition, NullCondition) and \
                    not isinstance(timing, _EMPTY_REGION_TRUE):
                return False
            continue
        anchors = _anchors(req, rows, s, e, ev)
        for w in anchors:
            if not _window_ok(timing, w, s, e, n, q, ev, cfg):
                return False
    return True


def _regions(req: Requirement, rows: list[dict],
             mm: ModeModel) -> tuple[str, list[tuple[int, int]]]:
    n = len(rows)
    scope = req.scope
    if isinstance(scope, NullScope):
        return "simple", ([(0, n - 1)] if n else [(0, -1)])

    if isinstance(scope, WhileScope):
        mu = [ex.eval_bool(scope.expr, r, mm.constants) for r in rows]
    else:
        cmp = mm.comparison(scope.mode)
        mu = [ex.eval_bool(cmp, r, mm.constants) for r in rows]

    if isinstance(scope, (InScope, WhileScope)):
        return "block", _blocks(mu)
    if isinstance(scope, (NotInScope, OnlyInScope)):
        return "block", _blocks([not v for v in mu])
    first_entry = next((i for i, v in enumerate(mu) if v), None)
    first_fall = next(
        (i for i in range(1, n) if mu[i - 1] and not mu[i]), None)
    if isinstance(scope, BeforeScope):
        if n == 0:
            return "prefix", [(0, -1)]
        end = (first_entry - 1) if first_entry is not None else n - 1
        return "prefix", [(0, end)]
    if isinstance(scope, OnlyBeforeScope):
        return "suffix", ([] if first_entry is None else [(first_entry, n - 1)])
    if isinstance(scope, AfterScope):
        return "suffix", ([] if first_fall is None else [(first_fall, n - 1)])
    # OnlyAfterScope
    if n == 0:
        return "fallx", [(0, -1)]
    end = (first_fall - 1) if first_fall is not None else n - 1
    return "fallx", [(0, end)]


def _blocks(mu: list[bool]) -> list[tuple[int, int]]:
    out = []
    start = None
    for i, v in enumerate(mu):
        if v and start is None:
            start = i
        elif not v and start is not None:
            out.append((start, i - 1))
            start = None
    if start is not None:
        out.append((start, len(mu) - 1))
    return out


def _anchors(req: Requirement, rows, s: int, e: int, ev) -> list[int]:
    match req.condition:
        case NullCondition():
            return [s]
        case TriggerCondition(expr=c):
            w = next((t for t in range(s, e + 1) if ev(c, t)), None)
            return [] if w is None else [w]
        case ContinualCondition(expr=c):
            return [t for t in range(s, e + 1) if ev(c, t)]
    raise TypeError(req.condition)


def _window_ok(timing, w: int, s: int, e: int, n: int, q, ev,
               cfg: TickConfig) -> bool:
    match timing:
        case Always():
            return all(q(t) for t in range(w, e + 1))
        case Eventually():
            return any(q(t) for t in range(w, e + 1))
        case Immediately():
            return q(w)
        case NextTimepoint():
            return w + 1 <= e and q(w + 1)
        case Until(expr=u):
            for t in range(w, e + 1):
                if ev(u, t):
                    return all(q(k) for k in range(w, t))
            if e < n - 1:  # region closed by a scope exit: response to its end
                return all(q(k) for k in range(w, e + 1))
            return all(q(k) for k in range(w, e))  # trace end releases early
        case Before(expr=b):
            for t in range(w, e + 1):
                if ev(b, t):
                    return False  # deadline hit before (or with) the response
                if q(t):
                    return True
            return True  # no deadline in the region
        case After(duration=d):
            k = w + duration_to_ticks(d, cfg)
            return k <= e and q(k)
        case For(duration=d):
            k = duration_to_ticks(d, cfg)
            return all(q(t) for t in range(w, min(w + k - 1, e) + 1))
        case Within(duration=d):
            k = duration_to_ticks(d, cfg)
            return any(q(t) for t in range(w, min(w + k, e) + 1))
    raise TypeError(timing)
