"""Vectorized finite-trace evaluators for the large agreement sweeps.

Evaluates one formula over *every* trace of a fixed length simultaneously:
traces are encoded as (N, L) arrays of per-tick alphabet symbols, and each
formula node becomes an (N, L) boolean array.  Correctness is anchored by
cross-checking against the scalar package evaluators on random samples inside
the acceptance suite.
"""

from __future__ import annotations

import numpy as np

from reqforge import expr as ex
from reqforge import formula as fm
from reqforge.monitor import _bf_empty_value, _future_empty_value


class TraceSpace:
    """All traces of length L over a finite per-tick alphabet."""

    def __init__(self, alphabet: list[dict], length: int):
        self.alphabet = alphabet
        self.length = length
        k = len(alphabet)
        n = k ** length
        if length == 0:
            self.symbols = np.zeros((1, 0), dtype=np.int64)
        else:
            idx = np.arange(n, dtype=np.int64)
            cols = []
            for pos in range(length):
                cols.append((idx // (k ** (length - 1 - pos))) % k)
            self.symbols = np.stack(cols, axis=1)

    def atom_column(self, atom: ex.BoolExpr, constants: frozenset[str]) -> np.ndarray:
        table = np.array(
            [ex.eval_bool(atom, assign, constants) for assign in self.alphabet],
            dtype=bool)
        return table[self.symbols]

    def rows_of(self, trace_index: int) -> list[dict]:
        return [self.alphabet[s] for s in self.symbols[trace_index]]


def eval_future_all(f: fm.Formula, space: TraceSpace,
                    constants: frozenset[str] = frozenset()) -> np.ndarray:
    """Value of a pure-future formula at position 0 for every trace (terminated)."""
    n, L = space.symbols.shape
    if L == 0:
        return np.full(1, _future_empty_value(f), dtype=bool)
    memo: dict[fm.Formula, np.ndarray] = {}

    def val(node: fm.Formula) -> np.ndarray:
        if node in memo:
            return memo[node]
        match node:
            case fm.FAtom(e):
                v = space.atom_column(e, constants)
            case fm.FTrue():
                v = np.ones((n, L), dtype=bool)
            case fm.FFalse():
                v = np.zeros((n, L), dtype=bool)
            case fm.FEnd():
                v = np.zeros((n, L), dtype=bool)
                v[:, L - 1] = True
            case fm.FNot(x):
                v = ~val(x)
            case fm.FAnd(l, r):
                v = val(l) & val(r)
            case fm.FOr(l, r):
                v = val(l) | val(r)
            case fm.FImplies(l, r):
                v = ~val(l) | val(r)
            case fm.FIff(l, r):
                v = val(l) == val(r)
            case fm.FNext(x):
                xv = val(x)
                v = np.zeros((n, L), dtype=bool)
                if L > 1:
                    v[:, :-1] = xv[:, 1:]
            case fm.FGlobally(x):
                v = _suffix_all(val(x))
            case fm.FFinally(x):
                v = _suffix_any(val(x))
            case fm.FUntil(l, r):
                lv, rv = val(l), val(r)
                v = np.empty((n, L), dtype=bool)
                v[:, L - 1] = rv[:, L - 1]
                for i in range(L - 2, -1, -1):
                    v[:, i] = rv[:, i] | (lv[:, i] & v[:, i + 1])
            case fm.FGloballyBounded(lo, hi, x):
                xv = val(x)
                v = np.ones((n, L), dtype=bool)
                for i in range(L):
                    window = xv[:, min(i + lo, L):min(i + hi, L - 1) + 1]
                    if window.shape[1]:
                        v[:, i] = window.all(axis=1)
            case fm.FFinallyBounded(lo, hi, x):
                xv = val(x)
                v = np.zeros((n, L), dtype=bool)
                for i in range(L):
                    window = xv[:, min(i + lo, L):min(i + hi, L - 1) + 1]
                    if window.shape[1]:
                        v[:, i] = window.any(axis=1)
            case _:
                raise TypeError(f"unexpected future node {node!r}")
        memo[node] = v
        return v

    return val(f)[:, 0]


def eval_past_all(f: fm.Formula, space: TraceSpace,
                  constants: frozenset[str] = frozenset()) -> np.ndarray:
    """Value of a pure-past formula at the last position for every trace."""
    n, L = space.symbols.shape
    if L == 0:
        return np.full(1, _bf_empty_value(f), dtype=bool)
    memo: dict[fm.Formula, np.ndarray] = {}

    def val(node: fm.Formula) -> np.ndarray:
        if node in memo:
            return memo[node]
        match node:
            case fm.FAtom(e):
                v = space.atom_column(e, constants)
            case fm.FTrue():
                v = np.ones((n, L), dtype=bool)
            case fm.FFalse():
                v = np.zeros((n, L), dtype=bool)
            case fm.FNot(x):
                v = ~val(x)
            case fm.FAnd(l, r):
                v = val(l) & val(r)
            case fm.FOr(l, r):
                v = val(l) | val(r)
            case fm.FImplies(l, r):
                v = ~val(l) | val(r)
            case fm.FIff(l, r):
                v = val(l) == val(r)
            case fm.FYesterday(x):
                xv = val(x)
                v = np.zeros((n, L), dtype=bool)
                if L > 1:
                    v[:, 1:] = xv[:, :-1]
            case fm.FOnce(x):
                v = np.logical_or.accumulate(val(x), axis=1)
            case fm.FHistorically(x):
                v = np.logical_and.accumulate(val(x), axis=1)
            case fm.FSince(l, r):
                lv, rv = val(l), val(r)
                v = np.empty((n, L), dtype=bool)
                v[:, 0] = rv[:, 0]
                for i in range(1, L):
                    v[:, i] = rv[:, i] | (lv[:, i] & v[:, i - 1])
            case fm.FHistoricallyBounded(lo, hi, x):
                xv = val(x)
                v = np.ones((n, L), dtype=bool)
                for i in range(L):
                    window = xv[:, max(0, i - hi):i - lo + 1] if i - lo >= 0 \
                        else xv[:, 0:0]
                    if window.shape[1]:
                        v[:, i] = window.all(axis=1)
            case fm.FOnceBounded(lo, hi, x):
                xv = val(x)
                v = np.zeros((n, L), dtype=bool)
                for i in range(L):
                    window = xv[:, max(0, i - hi):i - lo + 1] if i - lo >= 0 \
                        else xv[:, 0:0]
                    if window.shape[1]:
                        v[:, i] = window.any(axis=1)
            case _:
                raise TypeError(f"unexpected past node {node!r}")
        memo[node] = v
        return v

    return val(f)[:, L - 1]


def _suffix_all(x: np.ndarray) -> np.ndarray:
    return np.logical_and.accumulate(x[:, ::-1], axis=1)[:, ::-1]


def _suffix_any(x: np.ndarray) -> np.ndarray:
    return np.logical_or.accumulate(x[:, ::-1], axis=1)[:, ::-1]
