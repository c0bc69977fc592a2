"""Exception hierarchy shared across the toolkit.

Positioned errors carry a character ``offset`` into the source text plus a
derived ``line``/``col`` pair so front ends can render ``line:col: message``.
"""

from __future__ import annotations


class ReqForgeError(Exception):
    """Base class for all toolkit errors."""


def line_col(text: str, offset: int) -> tuple[int, int]:
    """1-based (line, col) of a character offset in ``text``."""
    prefix = text[:offset]
    line = prefix.count("\n") + 1
    col = offset - (prefix.rfind("\n") + 1) + 1
    return line, col


class PositionedError(ReqForgeError):
    def __init__(self, message: str, offset: int = 0, source: str = ""):
        self.message = message
        self.offset = offset
        self.line, self.col = line_col(source, offset) if source else (1, offset + 1)
        super().__init__(f"{self.line}:{self.col}: {message}")


class LexError(PositionedError):
    """Input contains a character no token can start with, or is empty."""


class ParseError(PositionedError):
    """Token stream does not form a requirement or expression."""


class EvalError(ReqForgeError):
    """Expression evaluation failed against an event's assignments."""


class MissingVariable(EvalError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"missing variable: {name}")


class TypeMismatch(EvalError):
    def __init__(self, message: str):
        super().__init__(message)


class UnsupportedTemplate(ReqForgeError):
    """Requirement's template key falls outside the supported table."""

    def __init__(self, key, reason: str = ""):
        self.key = key
        self.reason = reason
        detail = f" ({reason})" if reason else ""
        super().__init__(f"unsupported template {key}{detail}")


class NotApplicable(ReqForgeError):
    """Rewrite requested on a requirement it does not apply to."""


class UnexpandedQuantifier(ReqForgeError):
    """Requirement still contains quantifier macros; expand them first."""


class UnknownDomain(ReqForgeError):
    def __init__(self, variable: str):
        self.variable = variable
        super().__init__(f"no instantiation domain for quantified variable: {variable}")


class Overflow(ReqForgeError):
    """Duration conversion exceeds the representable tick range."""


class TooManyAtoms(ReqForgeError):
    """Explicit automaton expansion would exceed the configured state bound."""


class EventAfterEnd(ReqForgeError):
    """A trace event arrived after the terminal END event."""


class SchemaError(ReqForgeError):
    """A persisted file violates its documented schema."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownParent(ReqForgeError):
    def __init__(self, req_id: str, parent_id: str):
        self.req_id = req_id
        self.parent_id = parent_id
        super().__init__(f"requirement {req_id!r} names unknown parent {parent_id!r}")


class CycleDetected(ReqForgeError):
    def __init__(self, req_id: str):
        self.req_id = req_id
        super().__init__(f"parent chain through {req_id!r} forms a cycle")


class UnknownId(ReqForgeError):
    def __init__(self, req_id: str):
        self.req_id = req_id
        super().__init__(f"no requirement with id {req_id!r}")
