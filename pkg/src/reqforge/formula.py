"""Finite-trace temporal formula trees.

A formula is built over boolean expression atoms with either future operators
(``G F X U`` plus tick-bounded ``G[a,b]``/``F[a,b]`` and the trace-termination
marker ``END``) or past operators (``H O Y S`` plus bounded ``H[a,b]``/
``O[a,b]``).  Directions never mix inside one formula, and ``END`` is a
future-only device: past formulas are read out at the end of the trace, so
they never need it.

Canonical text uses the one-letter operator names with parenthesized
operands, e.g. ``G (battery > 0)`` or ``(a U (b | END))``.  A structured JSON
tree is available for tooling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from . import expr as ex

# ── Nodes ──────────────────────────────────────────────────────────────────


@dataclass(frozen=True, slots=True)
class FAtom:
    expr: ex.BoolExpr


@dataclass(frozen=True, slots=True)
class FTrue:
    pass


@dataclass(frozen=True, slots=True)
class FFalse:
    pass


@dataclass(frozen=True, slots=True)
class FEnd:
    """True exactly at the final position of a terminated trace."""


@dataclass(frozen=True, slots=True)
class FNot:
    operand: "Formula"


@dataclass(frozen=True, slots=True)
class FAnd:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class FOr:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class FImplies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class FIff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class FGlobally:
    operand: "Formula"


@dataclass(frozen=True, slots=True)
class FFinally:
    operand: "Formula"


@dataclass(frozen=True, slots=True)
class FNext:
    operand: "Formula"


@dataclass(frozen=True, slots=True)
class FUntil:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class FGloballyBounded:
    lo: int
    hi: int
    operand: "Formula"

    def __post_init__(self):
        _check_bounds(self.lo, self.hi)


@dataclass(frozen=True, slots=True)
class FFinallyBounded:
    lo: int
    hi: int
    operand: "Formula"

    def __post_init__(self):
        _check_bounds(self.lo, self.hi)


@dataclass(frozen=True, slots=True)
class FHistorically:
    operand: "Formula"


@dataclass(frozen=True, slots=True)
class FOnce:
    operand: "Formula"


@dataclass(frozen=True, slots=True)
class FYesterday:
    operand: "Formula"


@dataclass(frozen=True, slots=True)
class FSince:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class FHistoricallyBounded:
    lo: int
    hi: int
    operand: "Formula"

    def __post_init__(self):
        _check_bounds(self.lo, self.hi)


@dataclass(frozen=True, slots=True)
class FOnceBounded:
    lo: int
    hi: int
    operand: "Formula"

    def __post_init__(self):
        _check_bounds(self.lo, self.hi)


def _check_bounds(lo: int, hi: int) -> None:
    if lo < 0 or hi < lo:
        raise ValueError(f"bad tick bounds [{lo},{hi}]")


Formula = Union[
    FAtom, FTrue, FFalse, FEnd,
    FNot, FAnd, FOr, FImplies, FIff,
    FGlobally, FFinally, FNext, FUntil, FGloballyBounded, FFinallyBounded,
    FHistorically, FOnce, FYesterday, FSince, FHistoricallyBounded, FOnceBounded,
]

FUTURE_OPS = (FGlobally, FFinally, FNext, FUntil, FGloballyBounded, FFinallyBounded)
PAST_OPS = (FHistorically, FOnce, FYesterday, FSince, FHistoricallyBounded, FOnceBounded)

_UNARY_NAMES = {
    FGlobally: "G", FFinally: "F", FNext: "X",
    FHistorically: "H", FOnce: "O", FYesterday: "Y",
    FNot: "!",
}
_BOUNDED_NAMES = {
    FGloballyBounded: "G", FFinallyBounded: "F",
    FHistoricallyBounded: "H", FOnceBounded: "O",
}
_CONNECTIVE_NAMES = {FAnd: "&", FOr: "|", FImplies: "=>", FIff: "<=>"}
_BINARY_TEMPORAL_NAMES = {FUntil: "U", FSince: "S"}


def children(f: Formula) -> tuple[Formula, ...]:
    match f:
        case FAtom() | FTrue() | FFalse() | FEnd():
            return ()
        case FNot(x) | FGlobally(x) | FFinally(x) | FNext(x) | \
                FHistorically(x) | FOnce(x) | FYesterday(x):
            return (x,)
        case FGloballyBounded(_, _, x) | FFinallyBounded(_, _, x) | \
                FHistoricallyBounded(_, _, x) | FOnceBounded(_, _, x):
            return (x,)
        case FAnd(l, r) | FOr(l, r) | FImplies(l, r) | FIff(l, r) | \
                FUntil(l, r) | FSince(l, r):
            return (l, r)
    raise TypeError(f"not a formula node: {f!r}")


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(children(node))


def subformulas(f: Formula) -> list[Formula]:
    """Distinct subformulas, children before parents."""
    seen: dict[Formula, None] = {}

    def visit(node: Formula) -> None:
        if node in seen:
            return
        for child in children(node):
            visit(child)
        seen[node] = None

    visit(f)
    return list(seen)


def atoms(f: Formula) -> list[ex.BoolExpr]:
    """Distinct atom expressions in first-appearance order."""
    seen: dict[ex.BoolExpr, None] = {}
    for node in subformulas(f):
        if isinstance(node, FAtom):
            seen.setdefault(node.expr)
    return list(seen)


def is_pure_future(f: Formula) -> bool:
    return not any(isinstance(n, PAST_OPS) for n in walk(f))


def is_pure_past(f: Formula) -> bool:
    return not any(isinstance(n, FUTURE_OPS + (FEnd,)) for n in walk(f))


def variables(f: Formula, constants: frozenset[str] = frozenset()) -> set[str]:
    out: set[str] = set()
    for a in atoms(f):
        out |= ex.variables(a, constants)
    return out


# ── Canonical text ─────────────────────────────────────────────────────────

def to_text(f: Formula) -> str:
    match f:
        case FAtom(e):
            return ex.to_text(e)
        case FTrue():
            return "true"
        case FFalse():
            return "false"
        case FEnd():
            return "END"
        case FNot(x):
            return f"!({to_text(x)})"
        case FAnd(l, r) | FOr(l, r) | FImplies(l, r) | FIff(l, r):
            return f"({to_text(l)} {_CONNECTIVE_NAMES[type(f)]} {to_text(r)})"
        case FUntil(l, r) | FSince(l, r):
            return f"({to_text(l)} {_BINARY_TEMPORAL_NAMES[type(f)]} {to_text(r)})"
        case FGlobally(x) | FFinally(x) | FNext(x) | \
                FHistorically(x) | FOnce(x) | FYesterday(x):
            return f"{_UNARY_NAMES[type(f)]} ({to_text(x)})"
        case FGloballyBounded(lo, hi, x) | FFinallyBounded(lo, hi, x) | \
                FHistoricallyBounded(lo, hi, x) | FOnceBounded(lo, hi, x):
            return f"{_BOUNDED_NAMES[type(f)]}[{lo},{hi}] ({to_text(x)})"
    raise TypeError(f"not a formula node: {f!r}")


# ── JSON tree ──────────────────────────────────────────────────────────────

def to_json(f: Formula) -> dict:
    match f:
        case FAtom(e):
            return {"op": "atom", "text": ex.to_text(e)}
        case FTrue():
            return {"op": "true"}
        case FFalse():
            return {"op": "false"}
        case FEnd():
            return {"op": "end"}
        case FNot(x):
            return {"op": "not", "args": [to_json(x)]}
        case FAnd(l, r):
            return {"op": "and", "args": [to_json(l), to_json(r)]}
        case FOr(l, r):
            return {"op": "or", "args": [to_json(l), to_json(r)]}
        case FImplies(l, r):
            return {"op": "implies", "args": [to_json(l), to_json(r)]}
        case FIff(l, r):
            return {"op": "iff", "args": [to_json(l), to_json(r)]}
        case FGlobally(x):
            return {"op": "G", "args": [to_json(x)]}
        case FFinally(x):
            return {"op": "F", "args": [to_json(x)]}
        case FNext(x):
            return {"op": "X", "args": [to_json(x)]}
        case FUntil(l, r):
            return {"op": "U", "args": [to_json(l), to_json(r)]}
        case FHistorically(x):
            return {"op": "H", "args": [to_json(x)]}
        case FOnce(x):
            return {"op": "O", "args": [to_json(x)]}
        case FYesterday(x):
            return {"op": "Y", "args": [to_json(x)]}
        case FSince(l, r):
            return {"op": "S", "args": [to_json(l), to_json(r)]}
        case FGloballyBounded(lo, hi, x):
            return {"op": "G", "bounds": [lo, hi], "args": [to_json(x)]}
        case FFinallyBounded(lo, hi, x):
            return {"op": "F", "bounds": [lo, hi], "args": [to_json(x)]}
        case FHistoricallyBounded(lo, hi, x):
            return {"op": "H", "bounds": [lo, hi], "args": [to_json(x)]}
        case FOnceBounded(lo, hi, x):
            return {"op": "O", "bounds": [lo, hi], "args": [to_json(x)]}
    raise TypeError(f"not a formula node: {f!r}")


# ── Canonical text parsing ─────────────────────────────────────────────────

_UNARY_BY_NAME = {
    "G": FGlobally, "F": FFinally, "X": FNext,
    "H": FHistorically, "O": FOnce, "Y": FYesterday,
}
_BOUNDED_BY_NAME = {
    "G": FGloballyBounded, "F": FFinallyBounded,
    "H": FHistoricallyBounded, "O": FOnceBounded,
}
_BINOP_BY_NAME = {
    "&": FAnd, "|": FOr, "=>": FImplies, "<=>": FIff, "U": FUntil, "S": FSince,
}


def parse_formula(text: str) -> Formula:
    """Parse the canonical formula text back into a tree.

    Accepts exactly the grammar ``to_text`` emits; the single-letter operator
    names (G F X U H O Y S) and ``true``/``false``/``END`` are reserved here.
    """
    from .errors import ParseError
    from .lexer import tokenize
    from .parser import _Cursor, _atom_expr

    cur = _Cursor(tokenize(text), text)

    def parse() -> Formula:
        tok = cur.peek()
        if tok is None:
            raise cur.fail("expected a formula")
        if tok.kind == "ident" and tok.text in ("true", "false", "END") and not (
                (nxt := cur.peek(1)) is not None and nxt.kind == "lparen"):
            cur.next()
            return {"true": FTrue(), "false": FFalse(), "END": FEnd()}[tok.text]
        if tok.kind == "ident" and tok.text in _UNARY_BY_NAME:
            nxt = cur.peek(1)
            if nxt is not None and nxt.kind in ("lparen", "lbracket"):
                cur.next()
                bounds = None
                if cur.peek() is not None and cur.peek().kind == "lbracket":
                    if tok.text not in _BOUNDED_BY_NAME:
                        raise cur.fail(f"operator {tok.text} takes no bounds", tok)
                    cur.next()
                    lo = _bound_number(cur)
                    comma = cur.next()
                    if comma.kind != "comma":
                        raise cur.fail("expected ',' in bounds", comma)
                    hi = _bound_number(cur)
                    closing = cur.next()
                    if closing.kind != "rbracket":
                        raise cur.fail("expected ']'", closing)
                    bounds = (lo, hi)
                opening = cur.next()
                if opening.kind != "lparen":
                    raise cur.fail("expected '(' after operator", opening)
                operand = parse()
                closing = cur.next()
                if closing.kind != "rparen":
                    raise cur.fail("expected ')'", closing)
                if bounds is None:
                    return _UNARY_BY_NAME[tok.text](operand)
                return _BOUNDED_BY_NAME[tok.text](bounds[0], bounds[1], operand)
        if tok.kind == "op" and tok.text == "!" and (
                (nxt := cur.peek(1)) is not None and nxt.kind == "lparen"):
            cur.next()
            cur.next()
            operand = parse()
            closing = cur.next()
            if closing.kind != "rparen":
                raise cur.fail("expected ')'", closing)
            return FNot(operand)
        if tok.kind == "lparen":
            cur.next()
            left = parse()
            op_tok = cur.peek()
            if op_tok is not None and (
                    (op_tok.kind == "op" and op_tok.text in _BINOP_BY_NAME)
                    or (op_tok.kind == "ident" and op_tok.text in ("U", "S"))):
                cur.next()
                right = parse()
                closing = cur.next()
                if closing.kind != "rparen":
                    raise cur.fail("expected ')'", closing)
                return _BINOP_BY_NAME[op_tok.text](left, right)
            if op_tok is not None and op_tok.kind == "rparen":
                cur.next()
                return left
            raise cur.fail("expected a connective or ')'", op_tok)
        return FAtom(_atom_expr(cur))

    def _bound_number(cursor) -> int:
        tok = cursor.next()
        if tok.kind != "num" or "." in tok.text:
            raise cursor.fail("expected an integer bound", tok)
        return int(tok.text)

    out = parse()
    trailing = cur.peek()
    if trailing is not None:
        raise ParseError(f"unexpected token {trailing.text!r} after formula",
                         trailing.start, text)
    return out


# ── Convenience constructors ───────────────────────────────────────────────

def conj(*parts: Formula) -> Formula:
    """Left-folded conjunction; empty input is true."""
    items = [p for p in parts if not isinstance(p, FTrue)]
    if not items:
        return FTrue()
    out = items[0]
    for p in items[1:]:
        out = FAnd(out, p)
    return out


def disj(*parts: Formula) -> Formula:
    items = [p for p in parts if not isinstance(p, FFalse)]
    if not items:
        return FFalse()
    out = items[0]
    for p in items[1:]:
        out = FOr(out, p)
    return out


def fnot(f: Formula) -> Formula:
    if isinstance(f, FTrue):
        return FFalse()
    if isinstance(f, FFalse):
        return FTrue()
    return FNot(f)
