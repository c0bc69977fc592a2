"""Recursive-descent parser for requirement sentences and expressions.

Grammar (field order is fixed):

    requirement := [scope] [condition+] component "shall" [timing] response
    scope       := "in" MODE | "not" "in" MODE | "only" "in" MODE
                 | "before" MODE | "after" MODE
                 | "only" "before" MODE | "only" "after" MODE
                 | "while" expr
    condition   := ("when" | "if" | "upon") expr   -- stacked clauses conjoin
                 | "whenever" expr
    timing      := "always" | "eventually" | "never" | "immediately"
                 | "at" "the" "next" "timepoint"
                 | "until" expr | "before" expr
                 | ("after" | "for" | "within") NUMBER [unit]

    expr        := iff ; iff := imp ("<=>" imp)* ; imp := or ["=>" imp]
    or          := and ("|" and)* ; and := cmp ("&" cmp)*
    cmp         := sum [("=" | "!=" | "<" | "<=" | ">" | ">=") sum]
    sum         := prod (("+" | "-") prod)* ; prod := unary (("*" | "/") unary)*
    unary       := "!" unary | "-" NUMBER | primary
    primary     := NUMBER | IDENT ["(" expr ("," expr)* ")"] | "(" expr ")"
                 | "if" expr "then" expr "else" expr
                 | ("forall" | "exists") IDENT ":" expr

``shall`` is the pivot: everything between the extracted scope/condition and
``shall`` must be a single identifier (the component).  Bare numbers in
durations mean ticks.  ``if``/``then``/``else`` bodies and quantifier bodies
extend greedily; parenthesize to delimit them.
"""

from __future__ import annotations

from . import expr as ex
from .errors import ParseError
from .lexer import Token, tokenize
from .requirement import (
    After, Always, Before, BeforeScope, AfterScope, ConditionSpec,
    ContinualCondition, Duration, Eventually, FieldSpans, For, Immediately,
    InScope, Never, NextTimepoint, NotInScope, NullCondition, NullScope,
    OnlyAfterScope, OnlyBeforeScope, OnlyInScope, Requirement, ScopeSpec,
    SourceText, TimingSpec, TriggerCondition, Until, WhileScope, Within,
)

_CMP_OPS = frozenset(ex.COMPARISON_OPS)
_TRIGGER_KWS = ("when", "if", "upon")
_UNIT_OF = {
    "tick": "tick", "ticks": "tick", "second": "second", "seconds": "second",
    "minute": "minute", "minutes": "minute", "hour": "hour", "hours": "hour",
}


class _Cursor:
    def __init__(self, tokens: list[Token], text: str):
        self.tokens = tokens
        self.text = text
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token | None:
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text), self.text)
        self.pos += 1
        return tok

    def fail(self, message: str, tok: Token | None = None) -> ParseError:
        offset = tok.start if tok is not None else (
            self.tokens[self.pos].start if self.pos < len(self.tokens) else len(self.text)
        )
        return ParseError(message, offset, self.text)


# ── Expressions ────────────────────────────────────────────────────────────

def _as_bool(node: ex.Expr, cur: _Cursor, tok: Token) -> ex.Expr:
    """Coerce an identifier to an Atom; reject arithmetic in boolean position."""
    if isinstance(node, ex.Var):
        return ex.Atom(node.name)
    if isinstance(node, (ex.Num, ex.Arith)):
        raise cur.fail("arithmetic expression where a boolean is required", tok)
    return node


def _as_arith(node: ex.Expr, cur: _Cursor, tok: Token) -> ex.Expr:
    if isinstance(node, ex.Atom):
        return ex.Var(node.name)
    if not isinstance(node, (ex.Var, ex.Num, ex.Arith, ex.FnApp)):
        raise cur.fail("boolean expression where an arithmetic term is required", tok)
    return node


def _expr(cur: _Cursor) -> ex.Expr:
    return _iff(cur)


def _iff(cur: _Cursor) -> ex.Expr:
    node = _implies(cur)
    while (tok := cur.peek()) is not None and tok.kind == "op" and tok.text == "<=>":
        cur.next()
        rhs = _implies(cur)
        node = ex.Iff(_as_bool(node, cur, tok), _as_bool(rhs, cur, tok))
    return node


def _implies(cur: _Cursor) -> ex.Expr:
    node = _or(cur)
    tok = cur.peek()
    if tok is not None and tok.kind == "op" and tok.text == "=>":
        cur.next()
        rhs = _implies(cur)  # right-associative
        return ex.Implies(_as_bool(node, cur, tok), _as_bool(rhs, cur, tok))
    return node


def _or(cur: _Cursor) -> ex.Expr:
    node = _and(cur)
    while (tok := cur.peek()) is not None and tok.kind == "op" and tok.text == "|":
        cur.next()
        rhs = _and(cur)
        node = ex.Or(_as_bool(node, cur, tok), _as_bool(rhs, cur, tok))
    return node


def _and(cur: _Cursor) -> ex.Expr:
    node = _cmp(cur)
    while (tok := cur.peek()) is not None and tok.kind == "op" and tok.text == "&":
        cur.next()
        rhs = _cmp(cur)
        node = ex.And(_as_bool(node, cur, tok), _as_bool(rhs, cur, tok))
    return node


def _cmp(cur: _Cursor) -> ex.Expr:
    node = _sum(cur)
    tok = cur.peek()
    if tok is not None and tok.kind == "op" and tok.text in _CMP_OPS:
        cur.next()
        rhs = _sum(cur)
        return ex.Comparison(_as_arith(node, cur, tok), tok.text, _as_arith(rhs, cur, tok))
    return node


def _sum(cur: _Cursor) -> ex.Expr:
    node = _prod(cur)
    while (tok := cur.peek()) is not None and tok.kind == "op" and tok.text in ("+", "-"):
        cur.next()
        rhs = _prod(cur)
        node = ex.Arith(tok.text, _as_arith(node, cur, tok), _as_arith(rhs, cur, tok))
    return node


def _prod(cur: _Cursor) -> ex.Expr:
    node = _unary(cur)
    while (tok := cur.peek()) is not None and tok.kind == "op" and tok.text in ("*", "/"):
        cur.next()
        rhs = _unary(cur)
        node = ex.Arith(tok.text, _as_arith(node, cur, tok), _as_arith(rhs, cur, tok))
    return node


def _unary(cur: _Cursor) -> ex.Expr:
    tok = cur.peek()
    if tok is not None and tok.kind == "op" and tok.text == "!":
        cur.next()
        operand = _unary(cur)
        return ex.Not(_as_bool(operand, cur, tok))
    if tok is not None and tok.kind == "op" and tok.text == "-":
        num = cur.peek(1)
        if num is not None and num.kind == "num":
            cur.next()
            cur.next()
            return ex.Num(-_num_value(num))
        raise cur.fail("unary minus is only allowed before a numeric literal", tok)
    return _primary(cur)


def _primary(cur: _Cursor) -> ex.Expr:
    tok = cur.peek()
    if tok is None:
        raise cur.fail("expected an expression")
    if tok.kind == "num":
        cur.next()
        return ex.Num(_num_value(tok))
    if tok.kind == "lparen":
        cur.next()
        node = _expr(cur)
        closing = cur.peek()
        if closing is None or closing.kind != "rparen":
            raise cur.fail("expected ')'", closing)
        cur.next()
        return node
    if tok.kind == "ident":
        cur.next()
        nxt = cur.peek()
        if nxt is not None and nxt.kind == "lparen":
            cur.next()
            args = [_expr(cur)]
            while (sep := cur.peek()) is not None and sep.kind == "comma":
                cur.next()
                args.append(_expr(cur))
            closing = cur.peek()
            if closing is None or closing.kind != "rparen":
                raise cur.fail("expected ')' after function arguments", closing)
            cur.next()
            return ex.FnApp(tok.text, tuple(args))
        return ex.Var(tok.text)  # coerced to Atom when used as a boolean
    if tok.is_kw("if"):
        cur.next()
        cond = _expr(cur)
        then_tok = cur.peek()
        if then_tok is None or not then_tok.is_kw("then"):
            raise cur.fail("expected 'then' in if-then-else", then_tok)
        cur.next()
        then = _expr(cur)
        else_tok = cur.peek()
        if else_tok is None or not else_tok.is_kw("else"):
            raise cur.fail("expected 'else' in if-then-else", else_tok)
        cur.next()
        orelse = _expr(cur)
        return ex.IfThenElse(_as_bool(cond, cur, tok), _as_bool(then, cur, tok),
                             _as_bool(orelse, cur, tok))
    if tok.is_kw("forall", "exists"):
        cur.next()
        var_tok = cur.peek()
        if var_tok is None or var_tok.kind != "ident":
            raise cur.fail("expected a quantified variable name", var_tok)
        cur.next()
        colon = cur.peek()
        if colon is None or colon.kind != "colon":
            raise cur.fail("expected ':' after quantified variable", colon)
        cur.next()
        body = _as_bool(_expr(cur), cur, tok)
        cls = ex.Forall if tok.text == "forall" else ex.Exists
        return cls(var_tok.text, body)
    raise cur.fail(f"unexpected token {tok.text!r}", tok)


def _num_value(tok: Token) -> int | float:
    return float(tok.text) if "." in tok.text else int(tok.text)


def _atom_expr(cur: _Cursor) -> ex.BoolExpr:
    """One connective-free boolean atom (identifier, comparison or signal),
    as used at the leaves of canonical formula text."""
    tok = cur.peek()
    node = _cmp(cur)
    return _as_bool(node, cur, tok)


def parse_expr(text: str) -> ex.BoolExpr:
    """Parse a standalone boolean expression, consuming the entire input."""
    cur = _Cursor(tokenize(text), text)
    first = cur.peek()
    node = _as_bool(_expr(cur), cur, first)
    trailing = cur.peek()
    if trailing is not None:
        raise cur.fail(f"unexpected token {trailing.text!r} after expression", trailing)
    return node


# ── Requirement sentences ──────────────────────────────────────────────────

def parse_requirement(src: SourceText | str, *, req_id: str = "REQ",
                      project: str = "", parent_id: str | None = None,
                      rationale: str | None = None) -> tuple[Requirement, FieldSpans]:
    """Parse one requirement sentence into its structured form plus field spans."""
    source = src if isinstance(src, SourceText) else SourceText(src)
    cur = _Cursor(tokenize(source), source.text)

    scope, scope_span = _parse_scope(cur)
    condition, cond_span = _parse_condition(cur)

    shall_idx = next(
        (i for i in range(cur.pos, len(cur.tokens)) if cur.tokens[i].is_kw("shall")),
        None,
    )
    if shall_idx is None:
        raise cur.fail("missing 'shall' keyword")
    comp_tokens = cur.tokens[cur.pos:shall_idx]
    if not comp_tokens:
        raise cur.fail("missing component before 'shall'", cur.tokens[shall_idx])
    if len(comp_tokens) != 1 or comp_tokens[0].kind != "ident":
        raise cur.fail("component must be a single identifier", comp_tokens[0])
    component_tok = comp_tokens[0]
    cur.pos = shall_idx
    shall_tok = cur.next()

    timing, timing_span = _parse_timing(cur)

    first_resp = cur.peek()
    if first_resp is None:
        raise cur.fail("missing response after 'shall'")
    response = _as_bool(_expr(cur), cur, first_resp)
    trailing = cur.peek()
    if trailing is not None:
        raise cur.fail(f"unexpected token {trailing.text!r} after response", trailing)
    resp_end = cur.tokens[-1].end

    req = Requirement(
        id=req_id, component=component_tok.text, response=response,
        scope=scope, condition=condition, timing=timing,
        parent_id=parent_id, project=project, rationale=rationale, source=source,
    )
    spans = FieldSpans(
        scope=scope_span, condition=cond_span,
        component=(component_tok.start, component_tok.end),
        shall=(shall_tok.start, shall_tok.end),
        timing=timing_span, response=(first_resp.start, resp_end),
    )
    return req, spans


def _parse_scope(cur: _Cursor) -> tuple[ScopeSpec, tuple[int, int] | None]:
    tok = cur.peek()
    if tok is None:
        return NullScope(), None
    start = tok.start

    def mode_after(n_keywords: int, cls) -> tuple[ScopeSpec, tuple[int, int]]:
        for _ in range(n_keywords):
            cur.next()
        mode_tok = cur.peek()
        if mode_tok is None or mode_tok.kind != "ident":
            raise cur.fail("expected a mode name in the scope field", mode_tok)
        cur.next()
        return cls(mode_tok.text), (start, mode_tok.end)

    if tok.is_kw("in"):
        return mode_after(1, InScope)
    if tok.is_kw("not") and (nxt := cur.peek(1)) is not None and nxt.is_kw("in"):
        return mode_after(2, NotInScope)
    if tok.is_kw("only") and (nxt := cur.peek(1)) is not None:
        if nxt.is_kw("in"):
            return mode_after(2, OnlyInScope)
        if nxt.is_kw("before"):
            return mode_after(2, OnlyBeforeScope)
        if nxt.is_kw("after"):
            return mode_after(2, OnlyAfterScope)
        raise cur.fail("expected 'in', 'before' or 'after' after 'only'", nxt)
    if tok.is_kw("before"):
        return mode_after(1, BeforeScope)
    if tok.is_kw("after"):
        return mode_after(1, AfterScope)
    if tok.is_kw("while"):
        cur.next()
        guard = _as_bool(_expr(cur), cur, tok)
        end = cur.tokens[cur.pos - 1].end
        return WhileScope(guard), (start, end)
    return NullScope(), None


def _parse_condition(cur: _Cursor) -> tuple[ConditionSpec, tuple[int, int] | None]:
    clauses: list[ex.BoolExpr] = []
    keyword: str | None = None
    span_start: int | None = None
    span_end = 0
    while (tok := cur.peek()) is not None:
        if tok.is_kw(*_TRIGGER_KWS):
            if keyword == "whenever":
                raise cur.fail("cannot mix 'whenever' with trigger conditions", tok)
            cur.next()
            clauses.append(_as_bool(_expr(cur), cur, tok))
            keyword = keyword or tok.text
        elif tok.is_kw("whenever"):
            if clauses:
                raise cur.fail("cannot mix 'whenever' with trigger conditions", tok)
            cur.next()
            clauses.append(_as_bool(_expr(cur), cur, tok))
            keyword = "whenever"
        else:
            break
        span_start = tok.start if span_start is None else span_start
        span_end = cur.tokens[cur.pos - 1].end

    if not clauses:
        return NullCondition(), None
    combined = clauses[0]
    for clause in clauses[1:]:
        combined = ex.And(combined, clause)
    span = (span_start, span_end)
    if keyword == "whenever":
        return ContinualCondition(combined), span
    return TriggerCondition(combined, keyword), span


def _parse_timing(cur: _Cursor) -> tuple[TimingSpec, tuple[int, int] | None]:
    tok = cur.peek()
    if tok is None:
        return Eventually(), None
    start = tok.start

    simple = {"always": Always, "eventually": Eventually,
              "never": Never, "immediately": Immediately}
    if tok.kind == "kw" and tok.text in simple:
        cur.next()
        return simple[tok.text](), (start, tok.end)

    if tok.is_kw("at"):
        expected = ("at", "the", "next", "timepoint")
        for i, word in enumerate(expected):
            t = cur.peek(i)
            if t is None or not t.is_kw(word):
                raise cur.fail("expected 'at the next timepoint'", t)
        for _ in expected:
            cur.next()
        return NextTimepoint(), (start, cur.tokens[cur.pos - 1].end)

    if tok.is_kw("until", "before"):
        cur.next()
        guard = _as_bool(_expr(cur), cur, tok)
        end = cur.tokens[cur.pos - 1].end
        cls = Until if tok.text == "until" else Before
        return cls(guard), (start, end)

    if tok.is_kw("after", "for", "within"):
        cur.next()
        num_tok = cur.peek()
        if num_tok is None or num_tok.kind != "num":
            raise cur.fail(f"expected a duration after '{tok.text}'", num_tok)
        if "." in num_tok.text:
            raise cur.fail("duration magnitude must be an integer", num_tok)
        magnitude = int(num_tok.text)
        if magnitude <= 0:
            raise cur.fail("duration magnitude must be strictly positive", num_tok)
        cur.next()
        unit = "tick"
        end = num_tok.end
        unit_tok = cur.peek()
        if unit_tok is not None and unit_tok.kind == "kw" and unit_tok.text in _UNIT_OF:
            unit = _UNIT_OF[unit_tok.text]
            cur.next()
            end = unit_tok.end
        duration = Duration(magnitude, unit)
        cls = {"after": After, "for": For, "within": Within}[tok.text]
        return cls(duration), (start, end)

    return Eventually(), None


# ── Pretty printing ────────────────────────────────────────────────────────

def _fully_parenthesized(text: str) -> bool:
    if not (text.startswith("(") and text.endswith(")")):
        return False
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return i == len(text) - 1
    return False


def _clause_text(e: ex.BoolExpr) -> str:
    """Render a field expression, parenthesized unless it is a bare signal."""
    text = ex.to_text(e)
    if isinstance(e, (ex.Atom, ex.Var, ex.FnApp)):
        return text
    return text if _fully_parenthesized(text) else f"({text})"


def _delimited_text(e: ex.BoolExpr) -> str:
    """Render with mandatory parentheses; a bare identifier followed by the
    next field's "(" would otherwise re-parse as a function call."""
    text = ex.to_text(e)
    return text if _fully_parenthesized(text) else f"({text})"


def _duration_text(d: Duration) -> str:
    unit = d.unit if d.magnitude == 1 else d.unit + "s"
    return f"{d.magnitude} {unit}"


def pretty_print(req: Requirement) -> SourceText:
    """Canonical sentence; re-parsing yields a structurally equal requirement.

    Omitted fields stay omitted: null scope and condition print nothing, and
    eventual timing is left implicit.
    """
    parts: list[str] = []
    match req.scope:
        case NullScope():
            pass
        case InScope(mode):
            parts.append(f"in {mode}")
        case NotInScope(mode):
            parts.append(f"not in {mode}")
        case OnlyInScope(mode):
            parts.append(f"only in {mode}")
        case BeforeScope(mode):
            parts.append(f"before {mode}")
        case AfterScope(mode):
            parts.append(f"after {mode}")
        case OnlyBeforeScope(mode):
            parts.append(f"only before {mode}")
        case OnlyAfterScope(mode):
            parts.append(f"only after {mode}")
        case WhileScope(guard):
            parts.append(f"while {_clause_text(guard)}")

    match req.condition:
        case NullCondition():
            pass
        case TriggerCondition(expr=e, keyword=kw):
            parts.append(f"{kw} {_clause_text(e)}")
        case ContinualCondition(expr=e):
            parts.append(f"whenever {_clause_text(e)}")

    parts.append(req.component)
    parts.append("shall")

    match req.timing:
        case Eventually():
            pass
        case Always():
            parts.append("always")
        case Never():
            parts.append("never")
        case Immediately():
            parts.append("immediately")
        case NextTimepoint():
            parts.append("at the next timepoint")
        case Until(expr=e):
            parts.append(f"until {_delimited_text(e)}")
        case Before(expr=e):
            parts.append(f"before {_delimited_text(e)}")
        case After(duration=d):
            parts.append(f"after {_duration_text(d)}")
        case For(duration=d):
            parts.append(f"for {_duration_text(d)}")
        case Within(duration=d):
            parts.append(f"within {_duration_text(d)}")

    # After an until/before clause the response must be delimited, or a
    # leading "(" or "-" would be re-parsed as part of the clause expression.
    if isinstance(req.timing, (Until, Before)):
        parts.append(_clause_text(req.response))
    else:
        parts.append(ex.to_text(req.response))
    return SourceText(" ".join(parts))
