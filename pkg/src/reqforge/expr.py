"""Boolean/arithmetic expression trees shared by conditions, responses and guards.

Two layers share one node space: arithmetic terms (variables, numeric
literals, ``+ - * /``, function applications) feed comparisons, and the
boolean layer combines atoms, comparisons and function applications with
``! & | => <=>``, if-then-else, and finite-quantifier macros.

A bare identifier is an ``Atom`` in boolean positions and a ``Var`` in
arithmetic positions; both print identically, so round-trips are stable.
Function applications are opaque signals: they evaluate by looking up their
canonical rendering (e.g. ``grasp(TGT, BGP)``) in an event's assignments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from .errors import MissingVariable, TypeMismatch

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=")
ARITH_OPS = ("+", "-", "*", "/")

Value = Union[bool, int, float, str]


# ── Nodes ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class Var:
    """Identifier in an arithmetic position."""

    name: str


@dataclass(frozen=True, slots=True)
class Num:
    value: int | float


@dataclass(frozen=True, slots=True)
class Arith:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class FnApp:
    """Uninterpreted function application, usable as a boolean or numeric signal."""

    name: str
    args: tuple["Expr", ...]


@dataclass(frozen=True, slots=True)
class Atom:
    """Identifier in a boolean position."""

    name: str


@dataclass(frozen=True, slots=True)
class Comparison:
    left: "Expr"
    op: str
    right: "Expr"


@dataclass(frozen=True, slots=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True, slots=True)
class And:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class Or:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class Implies:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class Iff:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class IfThenElse:
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"


@dataclass(frozen=True, slots=True)
class Forall:
    """Finite-domain quantifier macro; expanded before compilation."""

    var: str
    body: "Expr"


@dataclass(frozen=True, slots=True)
class Exists:
    var: str
    body: "Expr"


Expr = Union[
    Var, Num, Arith, FnApp, Atom, Comparison,
    Not, And, Or, Implies, Iff, IfThenElse, Forall, Exists,
]

BoolExpr = Expr  # boolean-position alias; well-typedness is checked by the parser

_BINARY = {And: "&", Or: "|", Implies: "=>", Iff: "<=>"}


def children(e: Expr) -> tuple[Expr, ...]:
    match e:
        case Var() | Num() | Atom():
            return ()
        case Arith(_, l, r) | Comparison(l, _, r):
            return (l, r)
        case FnApp(_, args):
            return args
        case Not(x):
            return (x,)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return (l, r)
        case IfThenElse(c, t, o):
            return (c, t, o)
        case Forall(_, b) | Exists(_, b):
            return (b,)
    raise TypeError(f"not an expression node: {e!r}")


def walk(e: Expr) -> Iterator[Expr]:
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(children(node))


# ── Rendering ──────────────────────────────────────────────────────────────

# Looser operators get smaller numbers; a child is parenthesized when its
# level is at or below what its context requires.
_PREC = {
    Forall: 1, Exists: 1, IfThenElse: 1,
    Iff: 2, Implies: 3, Or: 4, And: 5,
    Comparison: 6, Arith: 7, Not: 9,
    Var: 10, Num: 10, Atom: 10, FnApp: 10,
}

_ARITH_PREC = {"+": 7, "-": 7, "*": 8, "/": 8}


def _prec(e: Expr) -> int:
    if isinstance(e, Arith):
        return _ARITH_PREC[e.op]
    return _PREC[type(e)]


def to_text(e: Expr) -> str:
    """Canonical rendering; ``parse_expr(to_text(e)) == e`` for parser output."""
    return _render(e, 0)


def _render(e: Expr, context: int) -> str:
    p = _prec(e)
    match e:
        case Var(name) | Atom(name):
            s = name
        case Num(value):
            s = repr(value) if isinstance(value, float) else str(value)
        case FnApp(name, args):
            s = f"{name}({', '.join(_render(a, 0) for a in args)})"
        case Arith(op, l, r):
            s = f"{_render(l, p - 1)} {op} {_render(r, p)}"
        case Comparison(l, op, r):
            s = f"{_render(l, p)} {op} {_render(r, p)}"
        case Not(x):
            s = f"!{_render(x, p)}"
        case And(l, r) | Or(l, r):
            s = f"{_render(l, p - 1)} {_BINARY[type(e)]} {_render(r, p)}"
        case Implies(l, r):
            # right-associative: parenthesize an Implies on the left
            s = f"{_render(l, p)} => {_render(r, p - 1)}"
        case Iff(l, r):
            s = f"{_render(l, p - 1)} <=> {_render(r, p)}"
        case IfThenElse(c, t, o):
            s = f"if {_render(c, 0)} then {_render(t, 0)} else {_render(o, 0)}"
        case Forall(var, body):
            s = f"forall {var}: {_render(body, 0)}"
        case Exists(var, body):
            s = f"exists {var}: {_render(body, 0)}"
        case _:
            raise TypeError(f"not an expression node: {e!r}")
    return f"({s})" if p <= context else s


# ── Queries and transforms ─────────────────────────────────────────────────

def variables(e: Expr, constants: frozenset[str] = frozenset()) -> set[str]:
    """Signal names the expression reads: identifiers plus opaque function keys.

    Identifiers in ``constants`` (declared modes, enum literals) are excluded.
    """
    out: set[str] = set()
    for node in walk(e):
        match node:
            case Var(name) | Atom(name):
                if name not in constants:
                    out.add(name)
            case FnApp():
                out.add(to_text(node))
    return out


def _fn_free_vars(e: Expr) -> set[str]:
    out: set[str] = set()
    for node in walk(e):
        if isinstance(node, (Var, Atom)):
            out.add(node.name)
    return out


def substitute(e: Expr, var: str, replacement: str) -> Expr:
    """Replace every free occurrence of identifier ``var`` with ``replacement``."""
    match e:
        case Var(name):
            return Var(replacement) if name == var else e
        case Atom(name):
            return Atom(replacement) if name == var else e
        case Num():
            return e
        case Arith(op, l, r):
            return Arith(op, substitute(l, var, replacement), substitute(r, var, replacement))
        case FnApp(name, args):
            return FnApp(name, tuple(substitute(a, var, replacement) for a in args))
        case Comparison(l, op, r):
            return Comparison(substitute(l, var, replacement), op, substitute(r, var, replacement))
        case Not(x):
            return Not(substitute(x, var, replacement))
        case And(l, r):
            return And(substitute(l, var, replacement), substitute(r, var, replacement))
        case Or(l, r):
            return Or(substitute(l, var, replacement), substitute(r, var, replacement))
        case Implies(l, r):
            return Implies(substitute(l, var, replacement), substitute(r, var, replacement))
        case Iff(l, r):
            return Iff(substitute(l, var, replacement), substitute(r, var, replacement))
        case IfThenElse(c, t, o):
            return IfThenElse(
                substitute(c, var, replacement),
                substitute(t, var, replacement),
                substitute(o, var, replacement),
            )
        case Forall(v, body):
            return e if v == var else Forall(v, substitute(body, var, replacement))
        case Exists(v, body):
            return e if v == var else Exists(v, substitute(body, var, replacement))
    raise TypeError(f"not an expression node: {e!r}")


def has_quantifier(e: Expr) -> bool:
    return any(isinstance(n, (Forall, Exists)) for n in walk(e))


def quantified_vars(e: Expr) -> set[str]:
    return {n.var for n in walk(e) if isinstance(n, (Forall, Exists))}


def negate_comparison(c: Comparison) -> Comparison:
    flipped = {"=": "!=", "!=": "=", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}
    return Comparison(c.left, flipped[c.op], c.right)


# ── Evaluation ─────────────────────────────────────────────────────────────

def eval_bool(e: Expr, assignments: Mapping[str, Value],
              constants: frozenset[str] = frozenset()) -> bool:
    """Truth value of a boolean expression under one event's assignments.

    Identifiers in ``constants`` denote themselves (enum literals such as mode
    names); every other identifier must be assigned, else MissingVariable.
    Quantifier macros must have been expanded away before evaluation.
    """
    match e:
        case Atom(name):
            if name in constants:
                raise TypeMismatch(f"constant {name!r} used as a boolean atom")
            v = _lookup(name, assignments)
            if not isinstance(v, bool):
                raise TypeMismatch(f"atom {name!r} is assigned non-boolean {v!r}")
            return v
        case FnApp():
            v = _lookup(to_text(e), assignments)
            if not isinstance(v, bool):
                raise TypeMismatch(f"signal {to_text(e)!r} is assigned non-boolean {v!r}")
            return v
        case Comparison(l, op, r):
            return _compare(eval_arith(l, assignments, constants), op,
                            eval_arith(r, assignments, constants))
        case Not(x):
            return not eval_bool(x, assignments, constants)
        case And(l, r):
            return eval_bool(l, assignments, constants) and eval_bool(r, assignments, constants)
        case Or(l, r):
            return eval_bool(l, assignments, constants) or eval_bool(r, assignments, constants)
        case Implies(l, r):
            return (not eval_bool(l, assignments, constants)) or eval_bool(r, assignments, constants)
        case Iff(l, r):
            return eval_bool(l, assignments, constants) == eval_bool(r, assignments, constants)
        case IfThenElse(c, t, o):
            branch = t if eval_bool(c, assignments, constants) else o
            return eval_bool(branch, assignments, constants)
        case Forall() | Exists():
            raise TypeMismatch("quantifier macro reached evaluation; expand it first")
    raise TypeMismatch(f"arithmetic expression {to_text(e)!r} used as a boolean")


def eval_arith(e: Expr, assignments: Mapping[str, Value],
               constants: frozenset[str] = frozenset()) -> Value:
    match e:
        case Num(value):
            return value
        case Var(name) | Atom(name):
            if name in constants:
                return name
            return _lookup(name, assignments)
        case FnApp():
            return _lookup(to_text(e), assignments)
        case Arith(op, l, r):
            lv = eval_arith(l, assignments, constants)
            rv = eval_arith(r, assignments, constants)
            if not isinstance(lv, (int, float)) or isinstance(lv, bool) or \
               not isinstance(rv, (int, float)) or isinstance(rv, bool):
                raise TypeMismatch(f"non-numeric operand in {to_text(e)!r}")
            if op == "+":
                return lv + rv
            if op == "-":
                return lv - rv
            if op == "*":
                return lv * rv
            if rv == 0:
                raise TypeMismatch(f"division by zero in {to_text(e)!r}")
            return lv / rv
    raise TypeMismatch(f"boolean expression {to_text(e)!r} used as a number")


def _lookup(name: str, assignments: Mapping[str, Value]) -> Value:
    if name not in assignments:
        raise MissingVariable(name)
    return assignments[name]


def _compare(lv: Value, op: str, rv: Value) -> bool:
    if op == "=":
        return lv == rv
    if op == "!=":
        return lv != rv
    if isinstance(lv, str) or isinstance(rv, str):
        raise TypeMismatch(f"ordering comparison on non-numeric value: {lv!r} {op} {rv!r}")
    if op == "<":
        return lv < rv
    if op == "<=":
        return lv <= rv
    if op == ">":
        return lv > rv
    return lv >= rv
