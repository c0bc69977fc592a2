"""reqforge: structured requirements, temporal-logic compilation, runtime monitors."""

from . import errors, expr, fixtures, formula, monitor, parser, semantics, store
from .errors import (
    CycleDetected, EventAfterEnd, LexError, MissingVariable, NotApplicable,
    Overflow, ParseError, ReqForgeError, SchemaError, TooManyAtoms,
    TypeMismatch, UnexpandedQuantifier, UnknownDomain, UnknownId,
    UnknownParent, UnsupportedTemplate,
)
from .parser import parse_expr, parse_requirement, pretty_print
from .requirement import (
    After, AfterScope, Always, Before, BeforeScope, ConditionSpec,
    ContinualCondition, Duration, Eventually, FieldSpans, For, Immediately,
    InScope, Never, NextTimepoint, NotInScope, NullCondition, NullScope,
    OnlyAfterScope, OnlyBeforeScope, OnlyInScope, Requirement, ScopeSpec,
    SourceText, TimingSpec, TriggerCondition, Until, WhileScope, Within,
)
from .lexer import Token, tokenize
from .semantics import (
    ModeModel, QuantDomain, TemplateKey, TickConfig, diagram_data,
    duration_to_ticks, expand_quantifiers, past_supported, rewrite_never,
    template_key, to_future_ltl, to_past_ltl,
)
from .monitor import (
    MonitorAutomaton, MonitorState, PastMonitor, Trace, TraceEvent, Verdict,
    brute_force_eval, brute_force_verdicts, compile_monitor, eval_future,
    export_oracle_spec, future_verdict, new_state, parse_trace, run_trace,
    serialize_trace, step,
)
from .store import (
    MetricsReport, RequirementSet, descendants, export_set, import_set,
    load_set, metrics, metrics_json, upsert, upsert_many,
)

__version__ = "0.1.0"
