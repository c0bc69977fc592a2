"""Tokenizer for requirement sentences and bare expressions.

Keywords are reserved in lowercase only, so capitalized component names such
as ``Controller`` stay ordinary identifiers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import LexError
from .requirement import SourceText

KEYWORDS = frozenset({
    "in", "when", "if", "upon", "whenever", "while", "shall",
    "always", "eventually", "never", "until", "before", "after",
    "for", "within", "immediately", "at", "the", "next", "timepoint",
    "not", "only", "then", "else", "forall", "exists",
    "tick", "ticks", "second", "seconds", "minute", "minutes",
    "hour", "hours",
})

# Longest first so <=> wins over <= wins over <.
OPERATORS = ("<=>", "=>", "!=", "<=", ">=", "=", "<", ">",
             "!", "&", "|", "+", "-", "*", "/")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"\d+(\.\d+)?")
_WS = re.compile(r"\s+")


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # ident | num | kw | op | lparen | rparen | colon | comma
    text: str
    start: int
    end: int

    def is_kw(self, *words: str) -> bool:
        return self.kind == "kw" and self.text in words


def tokenize(src: SourceText | str) -> list[Token]:
    """Split source text into classified tokens covering the input.

    Raises LexError on empty input (after trimming) or at the offset of the
    first character no token can start with.
    """
    text = src.text if isinstance(src, SourceText) else src
    if not text.strip():
        raise LexError("empty input", 0, text)

    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ws = _WS.match(text, i)
        if ws:
            i = ws.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            word = m.group()
            kind = "kw" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, i, m.end()))
            i = m.end()
            continue
        m = _NUMBER.match(text, i)
        if m:
            tokens.append(Token("num", m.group(), i, m.end()))
            i = m.end()
            continue
        for op in OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token("op", op, i, i + len(op)))
                i += len(op)
                break
        else:
            ch = text[i]
            if ch == "(":
                tokens.append(Token("lparen", ch, i, i + 1))
            elif ch == ")":
                tokens.append(Token("rparen", ch, i, i + 1))
            elif ch == ":":
                tokens.append(Token("colon", ch, i, i + 1))
            elif ch == ",":
                tokens.append(Token("comma", ch, i, i + 1))
            elif ch == "[":
                tokens.append(Token("lbracket", ch, i, i + 1))
            elif ch == "]":
                tokens.append(Token("rbracket", ch, i, i + 1))
            else:
                raise LexError(f"unrecognizable character {ch!r}", i, text)
            i += 1
    return tokens
