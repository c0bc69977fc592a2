"""Incremental four-valued monitors for past-time formulas over finite traces.

Verdict semantics
-----------------
After each event the monitor reports the formula's value at the current
position.  The verdict is *hard* (``True``/``False``, absorbing) when no
continuation of the trace can make the value at any later stopping point
differ; otherwise it is presumptive (``PresumablyTrue``/``PresumablyFalse``).
The terminal END event finalizes a presumptive verdict to its hard
counterpart.  Stability is decided over the reachable register-state space,
treating the formula's atoms as independent booleans.

Three evaluation routes are kept deliberately separate so they can check one
another: the incremental register evaluator (the execution core), explicit
verdict-labeled automata expanded and minimized from it (for export and
inspection), and a brute-force evaluator that recomputes past-time semantics
from the definitions at every position.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from . import expr as ex
from . import formula as fm
from .errors import (
    EventAfterEnd, ReqForgeError, SchemaError, TooManyAtoms, UnsupportedTemplate,
)

# Stability analysis enumerates atom assignments; beyond this many atoms the
# monitor stays impartial (no early hard verdicts) instead of blowing up.
MAX_STABILITY_ATOMS = 12

DEFAULT_STATE_BOUND = 2 ** 12


class Verdict(Enum):
    TRUE = "True"
    FALSE = "False"
    PRESUMABLY_TRUE = "PresumablyTrue"
    PRESUMABLY_FALSE = "PresumablyFalse"

    @property
    def is_final(self) -> bool:
        return self in (Verdict.TRUE, Verdict.FALSE)

    @property
    def truth(self) -> bool:
        return self in (Verdict.TRUE, Verdict.PRESUMABLY_TRUE)

    def harden(self) -> "Verdict":
        return Verdict.TRUE if self.truth else Verdict.FALSE

    @staticmethod
    def of(value: bool, final: bool) -> "Verdict":
        if final:
            return Verdict.TRUE if value else Verdict.FALSE
        return Verdict.PRESUMABLY_TRUE if value else Verdict.PRESUMABLY_FALSE


# ── Traces ─────────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=True, slots=True)
class TraceEvent:
    tick: int
    assignments: Mapping[str, ex.Value] = field(default_factory=dict)
    terminal: bool = False

    def __post_init__(self):
        if self.tick < 0:
            raise ValueError("tick must be non-negative")
        if self.terminal and self.assignments:
            raise ValueError("END event carries no assignments")


@dataclass(frozen=True, eq=True, slots=True)
class Trace:
    events: tuple[TraceEvent, ...] = ()

    def __post_init__(self):
        prev = -1
        for i, e in enumerate(self.events):
            if e.tick <= prev:
                raise ValueError(f"ticks must be strictly increasing (event {i})")
            prev = e.tick
            if e.terminal and i != len(self.events) - 1:
                raise ValueError("END must be the last event")

    @property
    def terminated(self) -> bool:
        return bool(self.events) and self.events[-1].terminal

    @property
    def states(self) -> tuple[TraceEvent, ...]:
        """The non-terminal events (one snapshot per position)."""
        if self.terminated:
            return self.events[:-1]
        return self.events

    @staticmethod
    def from_assignments(rows: Iterable[Mapping[str, ex.Value]],
                         terminated: bool = True) -> "Trace":
        events = [TraceEvent(i, dict(r)) for i, r in enumerate(rows)]
        if terminated:
            events.append(TraceEvent(len(events), {}, terminal=True))
        return Trace(tuple(events))


def parse_trace(text: str) -> Trace:
    """Parse the newline-delimited JSON trace format.

    One event per line: ``{"tick": n, "assign": {"var": value, ...}}``,
    optionally closed by ``{"end": true}``.
    """
    events: list[TraceEvent] = []
    ended = False
    last_tick = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", lineno) from exc
        if not isinstance(obj, dict):
            raise SchemaError("event must be a JSON object", lineno)
        if ended:
            raise SchemaError("event after END", lineno)
        if obj.get("end") is True:
            if set(obj) != {"end"}:
                raise SchemaError("END line must be exactly {\"end\": true}", lineno)
            events.append(TraceEvent(last_tick + 1, {}, terminal=True))
            ended = True
            continue
        if set(obj) - {"tick", "assign"}:
            unknown = sorted(set(obj) - {"tick", "assign"})
            raise SchemaError(f"unknown keys {unknown}", lineno)
        tick = obj.get("tick")
        if not isinstance(tick, int) or isinstance(tick, bool) or tick < 0:
            raise SchemaError("\"tick\" must be a non-negative integer", lineno)
        if tick <= last_tick:
            raise SchemaError("ticks must be strictly increasing", lineno)
        assign = obj.get("assign", {})
        if not isinstance(assign, dict):
            raise SchemaError("\"assign\" must be an object", lineno)
        for key, value in assign.items():
            if not isinstance(value, (bool, int, float, str)):
                raise SchemaError(f"unsupported value for {key!r}", lineno)
        events.append(TraceEvent(tick, assign))
        last_tick = tick
    return Trace(tuple(events))


def serialize_trace(trace: Trace) -> str:
    lines = []
    for e in trace.events:
        if e.terminal:
            lines.append(json.dumps({"end": True}))
        else:
            lines.append(json.dumps({"tick": e.tick, "assign": dict(e.assignments)},
                                    sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")


# ── Incremental evaluation core ────────────────────────────────────────────

def _require_past(f: fm.Formula) -> None:
    if not fm.is_pure_past(f):
        raise ReqForgeError(f"formula is not pure-past: {fm.to_text(f)}")


RegState = tuple  # per-subformula value; bounded operators hold a value window


class PastMonitor:
    """Compiled incremental evaluator for one pure-past formula.

    The register state stores the current value of every subformula (bounded
    operators keep a short window of operand values); one event advances all
    registers in a single pass.
    """

    def __init__(self, f: fm.Formula, constants: frozenset[str] = frozenset()):
        _require_past(f)
        self.formula = f
        self.constants = constants
        self.subs = fm.subformulas(f)
        self.index = {sub: i for i, sub in enumerate(self.subs)}
        self.atom_exprs = fm.atoms(f)
        self._stable_cache: dict[RegState | None, bool] = {}

    # -- register transitions ------------------------------------------------

    def empty_values(self) -> RegState:
        """Subformula values on the empty trace (the vacuous reading)."""
        vals: list = []

        def sval(sub: fm.Formula) -> bool:
            raw = vals[self.index[sub]]
            return self._window_value(sub, raw) if isinstance(raw, tuple) else raw

        for sub in self.subs:
            match sub:
                case fm.FAtom():
                    vals.append(False)
                case fm.FTrue():
                    vals.append(True)
                case fm.FFalse():
                    vals.append(False)
                case fm.FNot(x):
                    vals.append(not sval(x))
                case fm.FAnd(l, r):
                    vals.append(sval(l) and sval(r))
                case fm.FOr(l, r):
                    vals.append(sval(l) or sval(r))
                case fm.FImplies(l, r):
                    vals.append((not sval(l)) or sval(r))
                case fm.FIff(l, r):
                    vals.append(sval(l) == sval(r))
                case fm.FYesterday() | fm.FOnce() | fm.FSince():
                    vals.append(False)
                case fm.FHistorically():
                    vals.append(True)
                case fm.FHistoricallyBounded() | fm.FOnceBounded():
                    vals.append(())  # empty operand window
                case _:
                    raise ReqForgeError(f"unexpected node in past formula: {sub!r}")
        return tuple(vals)

    def advance(self, prev: RegState | None, atom_values: Sequence[bool]) -> RegState:
        """Registers after one more event; ``prev is None`` means no events yet."""
        first = prev is None
        atom_of = dict(zip(self.atom_exprs, atom_values))
        vals: list = []

        def sval(sub: fm.Formula) -> bool:
            raw = vals[self.index[sub]]
            return self._window_value(sub, raw) if isinstance(raw, tuple) else raw

        for i, sub in enumerate(self.subs):
            match sub:
                case fm.FAtom(e):
                    v = atom_of[e]
                case fm.FTrue():
                    v = True
                case fm.FFalse():
                    v = False
                case fm.FNot(x):
                    v = not sval(x)
                case fm.FAnd(l, r):
                    v = sval(l) and sval(r)
                case fm.FOr(l, r):
                    v = sval(l) or sval(r)
                case fm.FImplies(l, r):
                    v = (not sval(l)) or sval(r)
                case fm.FIff(l, r):
                    v = sval(l) == sval(r)
                case fm.FYesterday(x):
                    v = (not first) and self._scalar(prev, x)
                case fm.FOnce(x):
                    v = sval(x) or ((not first) and prev[i])
                case fm.FHistorically(x):
                    v = sval(x) and (first or prev[i])
                case fm.FSince(l, r):
                    v = sval(r) or (sval(l) and (not first) and prev[i])
                case fm.FHistoricallyBounded(_, hi, x) | fm.FOnceBounded(_, hi, x):
                    window = () if first else prev[i]
                    v = (window + (sval(x),))[-(hi + 1):]
                case _:
                    raise ReqForgeError(f"unexpected node in past formula: {sub!r}")
            vals.append(v)
        return tuple(vals)

    def _scalar(self, values: RegState, sub: fm.Formula) -> bool:
        v = values[self.index[sub]]
        if isinstance(v, tuple):  # bounded node referenced directly
            return self._window_value(sub, v)
        return v

    def _window_value(self, sub: fm.Formula, window: tuple) -> bool:
        lo = sub.lo
        usable = window[: len(window) - lo] if lo else window
        if isinstance(sub, fm.FHistoricallyBounded):
            return all(usable)
        return any(usable)

    def value_of(self, values: RegState | None) -> bool:
        vals = self.empty_values() if values is None else values
        return self._scalar(vals, self.formula)

    # -- verdicts ------------------------------------------------------------

    def eval_atoms(self, event: TraceEvent) -> tuple[bool, ...]:
        return tuple(
            ex.eval_bool(a, event.assignments, self.constants) for a in self.atom_exprs
        )

    def stable(self, values: RegState | None) -> bool:
        """True when every continuation keeps the root value unchanged."""
        if len(self.atom_exprs) > MAX_STABILITY_ATOMS:
            return False
        key = values
        if key in self._stable_cache:
            return self._stable_cache[key]
        target = self.value_of(values)
        seen: set[RegState | None] = {values}
        frontier: list[RegState | None] = [values]
        stable = True
        assignments = list(_assignment_space(len(self.atom_exprs)))
        while frontier and stable:
            state = frontier.pop()
            for assignment in assignments:
                nxt = self.advance(None if state is None else state, assignment)
                if self.value_of(nxt) != target:
                    stable = False
                    break
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        self._stable_cache[key] = stable
        return stable

    def verdict_of(self, values: RegState | None) -> Verdict:
        return Verdict.of(self.value_of(values), self.stable(values))


def _assignment_space(n: int) -> Iterable[tuple[bool, ...]]:
    for bits in range(2 ** n):
        yield tuple(bool(bits >> i & 1) for i in range(n))


@dataclass(frozen=True, slots=True)
class MonitorState:
    """One monitor's progress: register values, current verdict, END flag."""

    values: RegState | None
    verdict: Verdict
    ended: bool = False


def new_state(monitor: "PastMonitor | MonitorAutomaton") -> MonitorState:
    if isinstance(monitor, MonitorAutomaton):
        return MonitorState(values=(monitor.initial,),
                            verdict=monitor.states[monitor.initial].verdict)
    return MonitorState(values=None, verdict=monitor.verdict_of(None))


def step(monitor: "PastMonitor | MonitorAutomaton", state: MonitorState,
         event: TraceEvent) -> tuple[MonitorState, Verdict]:
    """Advance one event; hard verdicts absorb, END finalizes presumptive ones."""
    if state.ended:
        raise EventAfterEnd("monitor already received END")
    if isinstance(monitor, MonitorAutomaton):
        return monitor.step(state, event)
    if event.terminal:
        verdict = state.verdict.harden()
        return MonitorState(state.values, verdict, ended=True), verdict
    values = monitor.advance(state.values, monitor.eval_atoms(event))
    verdict = state.verdict if state.verdict.is_final else monitor.verdict_of(values)
    return MonitorState(values, verdict), verdict


def run_trace(f: fm.Formula, trace: Trace,
              constants: frozenset[str] = frozenset()) -> tuple[Verdict, list[Verdict]]:
    """Fold ``step`` over a trace: final verdict plus one verdict per event."""
    monitor = PastMonitor(f, constants)
    state = new_state(monitor)
    verdicts: list[Verdict] = []
    for event in trace.events:
        state, v = step(monitor, state, event)
        verdicts.append(v)
    final = verdicts[-1] if verdicts else state.verdict
    return final, verdicts


# ── Brute-force oracle ─────────────────────────────────────────────────────

Row = tuple[bool, ...]


def _bf_value(subs: list[fm.Formula], index: Mapping[fm.Formula, int],
              atom_index: Mapping[ex.BoolExpr, int], rows: Sequence[Row],
              node: fm.Formula, i: int, memo: dict) -> bool:
    """Past-time semantics at position ``i``, straight from the definitions."""
    key = (index[node], i)
    if key in memo:
        return memo[key]
    val: bool
    match node:
        case fm.FAtom(e):
            val = rows[i][atom_index[e]]
        case fm.FTrue():
            val = True
        case fm.FFalse():
            val = False
        case fm.FNot(x):
            val = not _bf_value(subs, index, atom_index, rows, x, i, memo)
        case fm.FAnd(l, r):
            val = (_bf_value(subs, index, atom_index, rows, l, i, memo)
                   and _bf_value(subs, index, atom_index, rows, r, i, memo))
        case fm.FOr(l, r):
            val = (_bf_value(subs, index, atom_index, rows, l, i, memo)
                   or _bf_value(subs, index, atom_index, rows, r, i, memo))
        case fm.FImplies(l, r):
            val = ((not _bf_value(subs, index, atom_index, rows, l, i, memo))
                   or _bf_value(subs, index, atom_index, rows, r, i, memo))
        case fm.FIff(l, r):
            val = (_bf_value(subs, index, atom_index, rows, l, i, memo)
                   == _bf_value(subs, index, atom_index, rows, r, i, memo))
        case fm.FYesterday(x):
            val = i > 0 and _bf_value(subs, index, atom_index, rows, x, i - 1, memo)
        case fm.FOnce(x):
            val = any(_bf_value(subs, index, atom_index, rows, x, j, memo)
                      for j in range(i + 1))
        case fm.FHistorically(x):
            val = all(_bf_value(subs, index, atom_index, rows, x, j, memo)
                      for j in range(i + 1))
        case fm.FSince(l, r):
            val = any(
                _bf_value(subs, index, atom_index, rows, r, j, memo)
                and all(_bf_value(subs, index, atom_index, rows, l, k, memo)
                        for k in range(j + 1, i + 1))
                for j in range(i + 1)
            )
        case fm.FHistoricallyBounded(lo, hi, x):
            val = all(_bf_value(subs, index, atom_index, rows, x, j, memo)
                      for j in range(max(0, i - hi), i - lo + 1))
        case fm.FOnceBounded(lo, hi, x):
            val = any(_bf_value(subs, index, atom_index, rows, x, j, memo)
                      for j in range(max(0, i - hi), i - lo + 1))
        case _:
            raise ReqForgeError(f"unexpected node in past formula: {node!r}")
    memo[key] = val
    return val


class _DefinitionalGraph:
    """Reachable semantic states of a formula, built by re-evaluating extended
    traces from scratch (no register recurrences), for the oracle's stability."""

    def __init__(self, f: fm.Formula):
        self.formula = f
        self.subs = fm.subformulas(f)
        self.index = {sub: i for i, sub in enumerate(self.subs)}
        self.atom_exprs = fm.atoms(f)
        self.atom_index = {a: i for i, a in enumerate(self.atom_exprs)}
        self._stable: dict[tuple, bool] = {}
        self._edges: dict[tuple, list[tuple]] = {}
        self._value: dict[tuple, bool] = {}
        self._witness: dict[tuple, tuple[Row, ...]] = {}

    def state_key(self, rows: Sequence[Row], i: int | None,
                  memo: dict | None = None) -> tuple:
        if i is None:
            return ("init",)
        memo = {} if memo is None else memo
        parts = []
        for sub in self.subs:
            if isinstance(sub, (fm.FHistoricallyBounded, fm.FOnceBounded)):
                x = sub.operand
                lo = max(0, i - sub.hi)
                parts.append(tuple(
                    _bf_value(self.subs, self.index, self.atom_index, rows, x, j, memo)
                    for j in range(lo, i + 1)
                ))
            else:
                parts.append(_bf_value(self.subs, self.index, self.atom_index,
                                       rows, sub, i, memo))
        return tuple(parts)

    def value_at(self, rows: Sequence[Row], i: int | None) -> bool:
        if i is None:
            return _bf_empty_value(self.formula)
        return _bf_value(self.subs, self.index, self.atom_index, rows, self.formula,
                         i, {})

    def _explore(self, key: tuple, rows: tuple[Row, ...]) -> None:
        if key in self._edges:
            return
        self._witness.setdefault(key, rows)
        # Breadth-first so witness traces stay as short as the graph diameter;
        # depth-first would make the definitional re-evaluation quadratic in
        # the state count.
        pending = deque([key])
        while pending:
            k = pending.popleft()
            if k in self._edges:
                continue
            witness = self._witness[k]
            i = None if k == ("init",) else len(witness) - 1
            self._value[k] = self.value_at(witness, i)
            succs: list[tuple] = []
            for assignment in _assignment_space(len(self.atom_exprs)):
                extended = witness + (assignment,)
                succ_key = self.state_key(extended, len(extended) - 1)
                succs.append(succ_key)
                if succ_key not in self._edges and succ_key not in self._witness:
                    self._witness[succ_key] = extended
                    pending.append(succ_key)
            self._edges[k] = succs

    def stable(self, rows: Sequence[Row], i: int | None,
               memo: dict | None = None) -> bool:
        if len(self.atom_exprs) > MAX_STABILITY_ATOMS:
            return False
        key = ("init",) if i is None else self.state_key(rows, i, memo)
        if key in self._stable:
            return self._stable[key]
        self._explore(key, tuple(rows[: (i + 1) if i is not None else 0]))
        target = self._value[key]
        seen = {key}
        frontier = [key]
        stable = True
        while frontier and stable:
            node = frontier.pop()
            for succ in self._edges[node]:
                if self._value[succ] != target:
                    stable = False
                    break
                if succ not in seen:
                    seen.add(succ)
                    frontier.append(succ)
        self._stable[key] = stable
        return stable


def _bf_empty_value(f: fm.Formula) -> bool:
    match f:
        case fm.FAtom() | fm.FFalse() | fm.FYesterday() | fm.FOnce() | fm.FSince() \
                | fm.FOnceBounded():
            return False
        case fm.FTrue() | fm.FHistorically() | fm.FHistoricallyBounded():
            return True
        case fm.FNot(x):
            return not _bf_empty_value(x)
        case fm.FAnd(l, r):
            return _bf_empty_value(l) and _bf_empty_value(r)
        case fm.FOr(l, r):
            return _bf_empty_value(l) or _bf_empty_value(r)
        case fm.FImplies(l, r):
            return (not _bf_empty_value(l)) or _bf_empty_value(r)
        case fm.FIff(l, r):
            return _bf_empty_value(l) == _bf_empty_value(r)
    raise ReqForgeError(f"unexpected node in past formula: {f!r}")


_BF_GRAPHS: dict[fm.Formula, _DefinitionalGraph] = {}


def _graph_for(f: fm.Formula) -> _DefinitionalGraph:
    if f not in _BF_GRAPHS:
        _BF_GRAPHS[f] = _DefinitionalGraph(f)
    return _BF_GRAPHS[f]


def brute_force_verdicts(f: fm.Formula, trace: Trace,
                         constants: frozenset[str] = frozenset()
                         ) -> tuple[Verdict, list[Verdict]]:
    """Definitional re-evaluation at every position; the independent oracle."""
    _require_past(f)
    graph = _graph_for(f)
    rows: list[Row] = []
    for event in trace.states:
        rows.append(tuple(
            ex.eval_bool(a, event.assignments, constants) for a in graph.atom_exprs
        ))
    memo: dict = {}
    verdicts: list[Verdict] = []
    for i in range(len(rows)):
        value = _bf_value(graph.subs, graph.index, graph.atom_index, rows,
                          f, i, memo)
        if verdicts and verdicts[-1].is_final:
            verdicts.append(verdicts[-1])
        else:
            verdicts.append(Verdict.of(value, graph.stable(rows, i, memo)))
    if trace.terminated:
        if rows:
            last = verdicts[-1] if verdicts[-1].is_final else verdicts[-1].harden()
        else:
            last = Verdict.of(_bf_empty_value(f), True)
        verdicts.append(last)
    final = verdicts[-1] if verdicts else Verdict.of(_bf_empty_value(f),
                                                     graph.stable((), None))
    return final, verdicts


def brute_force_eval(f: fm.Formula, trace: Trace,
                     constants: frozenset[str] = frozenset()) -> Verdict:
    return brute_force_verdicts(f, trace, constants)[0]


# ── Finite-trace evaluation of future formulas ─────────────────────────────

def eval_future(f: fm.Formula, trace: Trace,
                constants: frozenset[str] = frozenset()) -> bool:
    """Future-time finite-trace value at position 0, reading the trace as
    complete (END holds at the last position)."""
    if not fm.is_pure_future(f):
        raise ReqForgeError(f"formula is not pure-future: {fm.to_text(f)}")
    states = trace.states
    atom_exprs = fm.atoms(f)
    rows = [
        {a: ex.eval_bool(a, e.assignments, constants) for a in atom_exprs}
        for e in states
    ]
    n = len(rows)
    if n == 0:
        return _future_empty_value(f)
    memo: dict = {}

    def val(node: fm.Formula, i: int) -> bool:
        key = (id(node), i)
        if key in memo:
            return memo[key]
        match node:
            case fm.FAtom(e):
                v = rows[i][e]
            case fm.FTrue():
                v = True
            case fm.FFalse():
                v = False
            case fm.FEnd():
                v = i == n - 1
            case fm.FNot(x):
                v = not val(x, i)
            case fm.FAnd(l, r):
                v = val(l, i) and val(r, i)
            case fm.FOr(l, r):
                v = val(l, i) or val(r, i)
            case fm.FImplies(l, r):
                v = (not val(l, i)) or val(r, i)
            case fm.FIff(l, r):
                v = val(l, i) == val(r, i)
            case fm.FNext(x):
                v = i + 1 < n and val(x, i + 1)
            case fm.FGlobally(x):
                v = all(val(x, j) for j in range(i, n))
            case fm.FFinally(x):
                v = any(val(x, j) for j in range(i, n))
            case fm.FUntil(l, r):
                v = any(
                    val(r, j) and all(val(l, k) for k in range(i, j))
                    for j in range(i, n)
                )
            case fm.FGloballyBounded(lo, hi, x):
                v = all(val(x, j) for j in range(i + lo, min(i + hi, n - 1) + 1))
            case fm.FFinallyBounded(lo, hi, x):
                v = any(val(x, j) for j in range(i + lo, min(i + hi, n - 1) + 1))
            case _:
                raise ReqForgeError(f"unexpected node in future formula: {node!r}")
        memo[key] = v
        return v

    return val(f, 0)


def _future_empty_value(f: fm.Formula) -> bool:
    match f:
        case fm.FAtom() | fm.FFalse() | fm.FEnd() | fm.FFinally() | fm.FNext() \
                | fm.FUntil() | fm.FFinallyBounded():
            return False
        case fm.FTrue() | fm.FGlobally() | fm.FGloballyBounded():
            return True
        case fm.FNot(x):
            return not _future_empty_value(x)
        case fm.FAnd(l, r):
            return _future_empty_value(l) and _future_empty_value(r)
        case fm.FOr(l, r):
            return _future_empty_value(l) or _future_empty_value(r)
        case fm.FImplies(l, r):
            return (not _future_empty_value(l)) or _future_empty_value(r)
        case fm.FIff(l, r):
            return _future_empty_value(l) == _future_empty_value(r)
    raise ReqForgeError(f"unexpected node in future formula: {f!r}")


def future_verdict(f: fm.Formula, trace: Trace,
                   constants: frozenset[str] = frozenset()) -> Verdict:
    """Four-valued reading of a future formula: hard after END, else the
    value the trace would have if it ended now (impartial)."""
    return Verdict.of(eval_future(f, trace, constants), trace.terminated)


# ── Explicit automata ──────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class AutomatonState:
    index: int
    verdict: Verdict


@dataclass(frozen=True, slots=True)
class Transition:
    source: int
    target: int
    guard: ex.BoolExpr | None  # None is the catch-all guard
    minterms: frozenset[int]
    is_end: bool = False


class MonitorAutomaton:
    """Explicit, minimized, verdict-labeled view of a past-formula monitor.

    Deterministic by construction: each state's outgoing guards partition the
    atom-assignment space, plus one END edge.  Hard-verdict states self-loop.
    """

    def __init__(self, formula: fm.Formula, atom_exprs: list[ex.BoolExpr],
                 states: tuple[AutomatonState, ...], initial: int,
                 transitions: tuple[Transition, ...],
                 constants: frozenset[str] = frozenset()):
        self.formula = formula
        self.atom_exprs = atom_exprs
        self.states = states
        self.initial = initial
        self.transitions = transitions
        self.constants = constants
        self._by_source: dict[int, list[Transition]] = {}
        for t in transitions:
            self._by_source.setdefault(t.source, []).append(t)

    def outgoing(self, state: int) -> list[Transition]:
        return self._by_source.get(state, [])

    def end_target(self, state: int) -> int:
        for t in self.outgoing(state):
            if t.is_end:
                return t.target
        raise ReqForgeError(f"state {state} has no END transition")

    def _route(self, state: int, assignment_bits: int) -> int:
        for t in self.outgoing(state):
            if not t.is_end and assignment_bits in t.minterms:
                return t.target
        raise ReqForgeError(f"state {state} has no transition for assignment")

    def step(self, state: MonitorState, event: TraceEvent) -> tuple[MonitorState, Verdict]:
        if state.ended:
            raise EventAfterEnd("monitor already received END")
        (current,) = state.values
        if event.terminal:
            target = self.end_target(current)
            verdict = self.states[target].verdict
            return MonitorState((target,), verdict, ended=True), verdict
        bits = 0
        for i, atom in enumerate(self.atom_exprs):
            if ex.eval_bool(atom, event.assignments, self.constants):
                bits |= 1 << i
        target = self._route(current, bits)
        verdict = self.states[target].verdict
        return MonitorState((target,), verdict), verdict

    def run(self, trace: Trace) -> tuple[Verdict, list[Verdict]]:
        state = new_state(self)
        verdicts = []
        for event in trace.events:
            state, v = self.step(state, event)
            verdicts.append(v)
        return (verdicts[-1] if verdicts else state.verdict), verdicts

    def reachable_verdict_states(self) -> set[int]:
        seen = {self.initial}
        frontier = [self.initial]
        while frontier:
            s = frontier.pop()
            for t in self.outgoing(s):
                if t.target not in seen:
                    seen.add(t.target)
                    frontier.append(t.target)
        return seen


def compile_monitor(f: fm.Formula, constants: frozenset[str] = frozenset(),
                    state_bound: int = DEFAULT_STATE_BOUND) -> MonitorAutomaton:
    """Expand the register space into an explicit automaton and minimize it.

    The automaton's run verdicts equal the incremental evaluator's (and hence
    the brute-force oracle's) on every trace.  Raises TooManyAtoms when the
    expansion would exceed ``state_bound`` states or enumerate more than
    2^MAX_STABILITY_ATOMS assignments.
    """
    monitor = PastMonitor(f, constants)
    n_atoms = len(monitor.atom_exprs)
    if n_atoms > MAX_STABILITY_ATOMS:
        raise TooManyAtoms(f"{n_atoms} atoms exceeds the expansion bound")
    assignments = list(_assignment_space(n_atoms))

    # BFS over register states; state None is the pre-event initial state.
    discovered: dict[RegState | None, int] = {None: 0}
    order: list[RegState | None] = [None]
    succ: list[list[int]] = []
    frontier = [None]
    while frontier:
        state = frontier.pop(0)
        row = []
        for assignment in assignments:
            nxt = monitor.advance(state, assignment)
            if nxt not in discovered:
                if len(discovered) >= state_bound:
                    raise TooManyAtoms(
                        f"register expansion exceeds {state_bound} states")
                discovered[nxt] = len(discovered)
                order.append(nxt)
                frontier.append(nxt)
            row.append(discovered[nxt])
        succ.append(row)
    # succ rows were appended in BFS pop order == discovery order
    succ_by_state = {discovered[s]: succ[i] for i, s in enumerate(order)}

    verdicts = [monitor.verdict_of(s) for s in order]

    # Synthetic END sinks; merged away by minimization when redundant.
    sink_t = len(order)
    sink_f = sink_t + 1
    all_states = list(range(len(order) + 2))
    full_verdicts = verdicts + [Verdict.TRUE, Verdict.FALSE]
    for idx in (sink_t, sink_f):
        succ_by_state[idx] = [idx] * len(assignments)
    end_target = {}
    for idx in all_states:
        v = full_verdicts[idx]
        if v.is_final:
            end_target[idx] = idx if idx in (sink_t, sink_f) else (
                sink_t if v is Verdict.TRUE else sink_f)
        else:
            end_target[idx] = sink_t if v.truth else sink_f
    # Hard states absorb within the event alphabet as well: their successors
    # necessarily share the same value, but redirect to the sink so that
    # minimization collapses the whole hard region to one drawn state.
    for idx in all_states:
        if full_verdicts[idx].is_final:
            sink = sink_t if full_verdicts[idx] is Verdict.TRUE else sink_f
            succ_by_state[idx] = [sink] * len(assignments)

    # Partition refinement on (verdict, successor classes, END class).  Each
    # round refines the previous partition (the old class is part of the
    # signature), so an unchanged class count is the fixed point; comparing
    # labelings directly would not terminate, as labels can oscillate.
    classes = {idx: full_verdicts[idx].value for idx in all_states}
    while True:
        label_of: dict = {}
        new_classes: dict[int, int] = {}
        for idx in all_states:
            sig = (
                classes[idx],
                tuple(classes[t] for t in succ_by_state[idx]),
                classes[end_target[idx]],
            )
            if sig not in label_of:
                label_of[sig] = len(label_of)
            new_classes[idx] = label_of[sig]
        done = len(label_of) == len(set(classes.values()))
        classes = new_classes
        if done:
            break

    initial_class = classes[0]
    reachable: list[int] = []
    queue = [0]
    seen_raw = {0}
    while queue:
        raw = queue.pop(0)
        if classes[raw] not in reachable:
            reachable.append(classes[raw])
        for t in succ_by_state[raw] + [end_target[raw]]:
            if t not in seen_raw:
                seen_raw.add(t)
                queue.append(t)
    renum = {cls: i for i, cls in enumerate(reachable)}

    rep: dict[int, int] = {}
    for idx in all_states:
        cls = classes[idx]
        if cls in renum and cls not in rep:
            rep[cls] = idx

    auto_states = tuple(
        AutomatonState(renum[cls], full_verdicts[rep[cls]]) for cls in reachable
    )
    transitions: list[Transition] = []
    for cls in reachable:
        raw = rep[cls]
        by_target: dict[int, list[int]] = {}
        for bits, target_raw in enumerate(succ_by_state[raw]):
            tgt_cls = classes[target_raw]
            by_target.setdefault(renum[tgt_cls], []).append(bits)
        for tgt, minterm_list in sorted(by_target.items()):
            guard = _guard_expr(minterm_list, monitor.atom_exprs)
            transitions.append(Transition(renum[cls], tgt, guard,
                                          frozenset(minterm_list)))
        transitions.append(Transition(renum[cls], renum[classes[end_target[raw]]],
                                      None, frozenset(), is_end=True))

    return MonitorAutomaton(f, monitor.atom_exprs, auto_states, renum[initial_class],
                            tuple(transitions), constants)


# ── Oracle specification files ─────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class MonitorSpec:
    id: str
    formula_text: str
    variables: tuple[tuple[str, str], ...]  # (name, type) pairs, sorted
    channel: str


@dataclass(frozen=True, slots=True)
class OracleSpec:
    """The file handed to a trace-checking oracle: one monitor per requirement."""

    version: int
    tick_period_ms: int
    monitors: tuple[MonitorSpec, ...]
    mode_variable: str = "__mode"
    modes: tuple[str, ...] = ()

    def to_json(self) -> str:
        payload = {
            "version": self.version,
            "tick_period_ms": self.tick_period_ms,
            "mode_variable": self.mode_variable,
            "modes": list(self.modes),
            "monitors": [
                {
                    "id": m.id,
                    "formula": m.formula_text,
                    "vars": [{"name": n, "type": t} for n, t in m.variables],
                    "channel": m.channel,
                }
                for m in self.monitors
            ],
        }
        return json.dumps(payload, indent=2) + "\n"


def parse_oracle_spec(text: str) -> OracleSpec:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}") from exc
    if not isinstance(payload, dict) or payload.get("version") != 1:
        raise SchemaError("unsupported oracle spec version")
    monitors = []
    seen = set()
    for entry in payload.get("monitors", []):
        if not isinstance(entry, dict) or "id" not in entry or "formula" not in entry:
            raise SchemaError("each monitor needs \"id\" and \"formula\"")
        if entry["id"] in seen:
            raise SchemaError(f"duplicate monitor id {entry['id']!r}")
        seen.add(entry["id"])
        monitors.append(MonitorSpec(
            entry["id"], entry["formula"],
            tuple((v["name"], v.get("type", "bool")) for v in entry.get("vars", [])),
            entry.get("channel", f"verdicts/{entry['id']}"),
        ))
    return OracleSpec(
        1, payload.get("tick_period_ms", 100), tuple(monitors),
        payload.get("mode_variable", "__mode"), tuple(payload.get("modes", [])),
    )


def _variable_types(f: fm.Formula, constants: frozenset[str],
                    mode_variable: str) -> tuple[tuple[str, str], ...]:
    types: dict[str, str] = {}
    for atom in fm.atoms(f):
        if isinstance(atom, ex.Comparison):
            for name in ex.variables(atom, constants):
                types[name] = "mode" if name == mode_variable else "number"
        else:
            for name in ex.variables(atom, constants):
                types.setdefault(name, "bool")
    return tuple(sorted(types.items()))


def export_oracle_spec(reqs, mode_model=None,
                       tick=None) -> OracleSpec:
    """Compile every requirement's past form into a deterministic spec file.

    Sorted by requirement id; UnsupportedTemplate is re-raised with the
    offending id attached.
    """
    from . import semantics as sem

    mm = mode_model if mode_model is not None else sem.ModeModel()
    cfg = tick if tick is not None else sem.TickConfig()
    ordered = sorted(reqs, key=lambda r: r.id)
    ids = [r.id for r in ordered]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise SchemaError(f"duplicate requirement ids: {dupes}")
    monitors = []
    for req in ordered:
        try:
            past = sem.to_past_ltl(req, mm)
        except UnsupportedTemplate as exc:
            raise UnsupportedTemplate(exc.key, f"requirement {req.id!r}") from exc
        monitors.append(MonitorSpec(
            req.id, fm.to_text(past),
            _variable_types(past, mm.constants, mm.variable),
            f"verdicts/{req.id}",
        ))
    return OracleSpec(1, cfg.tick_period_ms, tuple(monitors),
                      mm.variable, tuple(sorted(mm.modes)))


# ── Guard synthesis (tiny Quine-McCluskey) ─────────────────────────────────

def _guard_expr(minterms: list[int], atom_exprs: list[ex.BoolExpr]) -> ex.BoolExpr | None:
    n = len(atom_exprs)
    if len(minterms) == 2 ** n:
        return None  # catch-all
    cubes = _prime_cover(set(minterms), n)
    literals_of: list[ex.BoolExpr] = []
    for value_mask, care_mask in cubes:
        lits: list[ex.BoolExpr] = []
        for i in range(n):
            if not care_mask >> i & 1:
                continue
            atom = atom_exprs[i]
            if value_mask >> i & 1:
                lits.append(atom)
            elif isinstance(atom, ex.Comparison):
                lits.append(ex.negate_comparison(atom))
            else:
                lits.append(ex.Not(atom))
        term = lits[0]
        for lit in lits[1:]:
            term = ex.And(term, lit)
        literals_of.append(term)
    guard = literals_of[0]
    for term in literals_of[1:]:
        guard = ex.Or(guard, term)
    return guard


def _prime_cover(minterms: set[int], n: int) -> list[tuple[int, int]]:
    """Greedy prime-implicant cover; cubes are (value_mask, care_mask)."""
    full_care = (1 << n) - 1
    current = {(m, full_care) for m in minterms}
    primes: set[tuple[int, int]] = set()
    while current:
        merged: set[tuple[int, int]] = set()
        used: set[tuple[int, int]] = set()
        group = list(current)
        for a in range(len(group)):
            for b in range(a + 1, len(group)):
                va, ca = group[a]
                vb, cb = group[b]
                if ca != cb:
                    continue
                diff = va ^ vb
                if diff and not diff & (diff - 1):  # single differing bit
                    merged.add((va & ~diff, ca & ~diff))
                    used.add(group[a])
                    used.add(group[b])
        primes |= current - used
        current = merged
    covered: set[int] = set()
    cover: list[tuple[int, int]] = []
    remaining = set(minterms)
    while remaining:
        best = max(primes, key=lambda cube: len(_cube_minterms(cube, n) & remaining))
        cover.append(best)
        covered |= _cube_minterms(best, n)
        remaining -= covered
    return cover


def _cube_minterms(cube: tuple[int, int], n: int) -> set[int]:
    value_mask, care_mask = cube
    free = [i for i in range(n) if not care_mask >> i & 1]
    out = set()
    for bits in range(2 ** len(free)):
        m = value_mask
        for j, i in enumerate(free):
            if bits >> j & 1:
                m |= 1 << i
        out.add(m)
    return out
