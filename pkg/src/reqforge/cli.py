"""Command-line front door.

Subcommands: ``check`` (parse + hierarchy + template keys), ``formalize``
(temporal-logic output, optional oracle-spec export), ``monitor`` (verdict
stream over a trace log), ``metrics`` (Table-style option counts), ``serve``
(HTTP API).  Exit codes: 0 success, 1 validation or verdict failure, 2 usage
error, 3 I/O or schema error.

Requirement files: ``.json``/``.csv`` requirement sets, or ``.txt`` with one
sentence per line (ids ``L<lineno>``).  ``REQFORGE_TICK_MS`` supplies the
default tick period.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import formula as fm
from .errors import (
    LexError, MissingVariable, ParseError, ReqForgeError, SchemaError,
    UnsupportedTemplate,
)
from .monitor import (
    PastMonitor, Verdict, export_oracle_spec, new_state, parse_oracle_spec,
    parse_trace, step,
)
from .parser import parse_requirement
from .semantics import TickConfig, template_key, to_future_ltl, to_past_ltl
from .store import (
    RequirementSet, effective_mode_model, load_set, metrics, metrics_json,
    upsert_many,
)

OK, FAIL, USAGE, IO = 0, 1, 2, 3


def _default_tick_ms() -> int:
    raw = os.environ.get("REQFORGE_TICK_MS")
    if raw is None:
        return 100
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value <= 0:
        print(f"reqforge: invalid REQFORGE_TICK_MS {raw!r}", file=sys.stderr)
        return 100
    return value


def _load(path: str) -> RequirementSet:
    if path.endswith(".txt"):
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        reqs = []
        errors = []
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                req, _ = parse_requirement(line, req_id=f"L{lineno}")
            except (LexError, ParseError) as exc:
                errors.append(f"{path}:{lineno}:{exc.col}: {exc.message}")
                continue
            reqs.append(req)
        if errors:
            raise ParseError("; ".join(errors))
        return upsert_many(RequirementSet(os.path.basename(path)), reqs)
    return load_set(path)


def _iter_sets(paths: list[str]) -> list[tuple[str, RequirementSet]]:
    out = []
    for path in paths:
        out.append((path, _load(path)))
    return out


# ── check ──────────────────────────────────────────────────────────────────

def cmd_check(args) -> int:
    status = OK
    for path in args.paths:
        try:
            s = _load(path)
        except OSError as exc:
            print(f"reqforge: {path}: {exc.strerror or exc}", file=sys.stderr)
            return IO
        except SchemaError as exc:
            print(f"reqforge: {path}: {exc}", file=sys.stderr)
            return IO
        except (LexError, ParseError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            status = FAIL
            continue
        for req in s.ordered():
            print(f"{req.id}: {template_key(req)}")
    return status


# ── formalize ──────────────────────────────────────────────────────────────

def cmd_formalize(args) -> int:
    cfg = TickConfig(args.tick_ms)
    status = OK
    rows: list[dict] = []
    unsupported: list[str] = []
    try:
        loaded = _iter_sets(args.paths)
    except OSError as exc:
        print(f"reqforge: {exc}", file=sys.stderr)
        return IO
    except SchemaError as exc:
        print(f"reqforge: {exc}", file=sys.stderr)
        return IO
    except (LexError, ParseError) as exc:
        print(f"reqforge: {exc}", file=sys.stderr)
        return FAIL

    for path, s in loaded:
        mm = effective_mode_model(s, args.mode_var)
        for req in s.ordered():
            row: dict = {"id": req.id}
            if args.target in ("future", "both"):
                f = to_future_ltl(req, mm, cfg)
                row["future"] = fm.to_text(f)
                if args.json:
                    row["future_tree"] = fm.to_json(f)
            if args.target in ("past", "both"):
                try:
                    p = to_past_ltl(req, mm)
                    row["past"] = fm.to_text(p)
                    if args.json:
                        row["past_tree"] = fm.to_json(p)
                except UnsupportedTemplate as exc:
                    row["unsupported"] = str(exc.key)
                    unsupported.append(req.id)
            rows.append(row)
        if args.oracle_out:
            try:
                spec = export_oracle_spec(s.ordered(), mm, cfg)
            except UnsupportedTemplate as exc:
                print(f"reqforge: {exc}", file=sys.stderr)
                return FAIL
            with open(args.oracle_out, "w", encoding="utf-8") as fh:
                fh.write(spec.to_json())

    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        for row in rows:
            for field in ("future", "past"):
                if field in row:
                    print(f"{row['id']}: {row[field]}")
            if "unsupported" in row:
                print(f"{row['id']}: unsupported template {row['unsupported']}")
    if unsupported:
        print(f"reqforge: no past form for: {', '.join(unsupported)}",
              file=sys.stderr)
        status = FAIL
    return status


# ── monitor ────────────────────────────────────────────────────────────────

def cmd_monitor(args) -> int:
    try:
        with open(args.spec, "r", encoding="utf-8") as fh:
            spec = parse_oracle_spec(fh.read())
    except OSError as exc:
        print(f"reqforge: {args.spec}: {exc.strerror or exc}", file=sys.stderr)
        return IO
    except SchemaError as exc:
        print(f"reqforge: {args.spec}: {exc}", file=sys.stderr)
        return IO
    try:
        raw = sys.stdin.read() if args.trace == "-" else open(
            args.trace, "r", encoding="utf-8").read()
    except OSError as exc:
        print(f"reqforge: {args.trace}: {exc.strerror or exc}", file=sys.stderr)
        return IO
    try:
        trace = parse_trace(raw)
    except SchemaError as exc:
        print(f"reqforge: {args.trace}: {exc}", file=sys.stderr)
        return IO

    constants = frozenset(spec.modes)
    monitors = []
    for m in spec.monitors:
        try:
            f = fm.parse_formula(m.formula_text)
        except (LexError, ParseError) as exc:
            print(f"reqforge: {m.id}: bad formula: {exc}", file=sys.stderr)
            return IO
        monitors.append((m.id, PastMonitor(f, constants)))

    states = {mid: new_state(mon) for mid, mon in monitors}
    finals: dict[str, Verdict] = {mid: states[mid].verdict for mid, _ in monitors}
    try:
        for event in trace.events:
            for mid, mon in monitors:
                states[mid], verdict = step(mon, states[mid], event)
                finals[mid] = verdict
                line = json.dumps(
                    {"tick": event.tick, "id": mid, "verdict": verdict.value})
                print(line, flush=args.stream)
    except MissingVariable as exc:
        print(f"reqforge: {exc}", file=sys.stderr)
        return IO
    return OK if all(v is Verdict.TRUE for v in finals.values()) else FAIL


# ── metrics ────────────────────────────────────────────────────────────────

def _metrics_table(report) -> str:
    def fmt(counts):
        return ", ".join(f"{k} = {v}" for k, v in counts.items())

    lines = [
        f"scope-option        {fmt(report.scope_counts)}",
        f"condition-option    {fmt(report.condition_counts)}",
        f"timing-option       {fmt(report.timing_counts)}",
        f"parent-child        {report.child_count} child requirements were "
        f"assigned a parent requirement",
        f"Total Requirements  {report.total}",
    ]
    return "\n".join(lines)


def cmd_metrics(args) -> int:
    try:
        loaded = _iter_sets(args.paths)
    except OSError as exc:
        print(f"reqforge: {exc}", file=sys.stderr)
        return IO
    except SchemaError as exc:
        print(f"reqforge: {exc}", file=sys.stderr)
        return IO
    except (LexError, ParseError) as exc:
        print(f"reqforge: {exc}", file=sys.stderr)
        return FAIL
    if args.format == "json" and len(loaded) != 1:
        print("reqforge: --format json takes exactly one path", file=sys.stderr)
        return USAGE
    for path, s in loaded:
        report = metrics(s)
        if args.format == "json":
            print(metrics_json(report))
        elif args.format == "csv":
            print("dimension,option,count")
            for dim, counts in (("scope", report.scope_counts),
                                ("condition", report.condition_counts),
                                ("timing", report.timing_counts)):
                for option, count in counts.items():
                    print(f"{dim},{option},{count}")
            print(f"parent-child,children,{report.child_count}")
            print(f"total,requirements,{report.total}")
        else:
            if len(loaded) > 1:
                print(f"== {path}")
            print(_metrics_table(report))
    return OK


# ── serve ──────────────────────────────────────────────────────────────────

def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    corpus = None
    if args.corpus:
        try:
            corpus = _load(args.corpus)
        except (OSError, SchemaError, ParseError, LexError) as exc:
            print(f"reqforge: {args.corpus}: {exc}", file=sys.stderr)
            return IO
    ui_dir = args.ui_dir or os.environ.get("REQFORGE_UI_DIR")
    if ui_dir and not os.path.isdir(ui_dir):
        print(f"reqforge: ui dir {ui_dir!r} not found", file=sys.stderr)
        return IO
    cors = [o.strip() for o in args.cors_origin] if args.cors_origin else None
    host, _, port = args.addr.rpartition(":")
    app = create_app(corpus=corpus, tick_ms=args.tick_ms, ui_dir=ui_dir or None,
                     cors_origins=cors)
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port),
                    log_level="warning")
    except (OSError, ValueError) as exc:
        print(f"reqforge: cannot bind {args.addr}: {exc}", file=sys.stderr)
        return IO
    return OK


# ── entry point ────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="reqforge",
        description="Structured requirements: parse, formalize, monitor.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse requirement files, print template keys")
    p.add_argument("paths", nargs="+")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("formalize", help="emit temporal-logic forms")
    p.add_argument("paths", nargs="+")
    p.add_argument("--target", choices=("future", "past", "both"),
                   default="future")
    p.add_argument("--mode-var", default=None,
                   help="mode-tracking variable (default __mode)")
    p.add_argument("--tick-ms", type=int, default=_default_tick_ms())
    p.add_argument("--json", action="store_true")
    p.add_argument("--oracle-out", metavar="FILE",
                   help="also write an oracle spec file (uses past forms)")
    p.set_defaults(fn=cmd_formalize)

    p = sub.add_parser("monitor", help="run monitors from a spec over a trace")
    p.add_argument("spec")
    p.add_argument("trace", help="newline-delimited JSON trace, or - for stdin")
    p.add_argument("--stream", action="store_true",
                   help="flush each verdict line as it is produced")
    p.set_defaults(fn=cmd_monitor)

    p = sub.add_parser("metrics", help="option-usage metrics for a set")
    p.add_argument("paths", nargs="+")
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.set_defaults(fn=cmd_metrics)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--addr", default="127.0.0.1:8123")
    p.add_argument("--corpus", default=None)
    p.add_argument("--tick-ms", type=int, default=_default_tick_ms())
    p.add_argument("--ui-dir", default=None,
                   help="static UI bundle to serve at / (or REQFORGE_UI_DIR)")
    p.add_argument("--cors-origin", action="append", default=None,
                   help="allowed CORS origin (repeatable; default any)")
    p.set_defaults(fn=cmd_serve)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ReqForgeError as exc:
        print(f"reqforge: {exc}", file=sys.stderr)
        return FAIL


if __name__ == "__main__":
    sys.exit(main())
