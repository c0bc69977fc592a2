import itertools

import pytest

from reqforge import expr as ex
from reqforge import formula as fm
from reqforge import monitor as mon
from reqforge.errors import (
    EventAfterEnd, MissingVariable, SchemaError, TooManyAtoms,
)
from reqforge.monitor import Trace, TraceEvent, Verdict
from reqforge.parser import parse_expr

P = fm.FAtom(ex.Atom("p"))
Q = fm.FAtom(ex.Atom("q"))
GRASP_NEAR = fm.FHistorically(fm.FImplies(fm.FAtom(ex.Atom("grasp")),
                                          fm.FAtom(ex.Atom("near"))))


def trace(*rows, end=True):
    return Trace.from_assignments(list(rows), terminated=end)


# ── verdict basics ─────────────────────────────────────────────────────────

def test_violation_locks_false_forever():
    final, vs = mon.run_trace(GRASP_NEAR, trace(
        {"grasp": True, "near": False},
        {"grasp": False, "near": False}, end=False))
    assert vs[0] is Verdict.FALSE
    assert vs[1] is Verdict.FALSE
    assert final is Verdict.FALSE


def test_historically_vacuous_on_empty_trace():
    final, vs = mon.run_trace(fm.FHistorically(P), trace(end=True))
    assert final is Verdict.TRUE
    assert vs == [Verdict.TRUE]


def test_once_never_seen_resolves_false_at_end():
    final, _ = mon.run_trace(fm.FOnce(P), trace({"p": False}, {"p": False}))
    assert final is Verdict.FALSE


def test_once_seen_becomes_hard_true_immediately():
    """Once(p) can never become false again, so the verdict hardens early."""
    _, vs = mon.run_trace(fm.FOnce(P), trace({"p": False}, {"p": True},
                                             {"p": False}, end=False))
    assert vs == [Verdict.PRESUMABLY_FALSE, Verdict.TRUE, Verdict.TRUE]


def test_presumptive_verdicts_before_end():
    _, vs = mon.run_trace(GRASP_NEAR, trace({"grasp": False, "near": False},
                                            end=False))
    assert vs == [Verdict.PRESUMABLY_TRUE]


def test_end_resolves_presumptive():
    final, vs = mon.run_trace(GRASP_NEAR, trace({"grasp": False, "near": False}))
    assert vs == [Verdict.PRESUMABLY_TRUE, Verdict.TRUE]
    assert final is Verdict.TRUE


def test_fig6_left_trace():
    f = fm.FHistorically(fm.conj(
        fm.FAtom(parse_expr("x != 0")), fm.FAtom(parse_expr("y != 0")),
        fm.FAtom(parse_expr("z != 0"))))
    final, vs = mon.run_trace(f, trace({"x": 1, "y": 2, "z": 3},
                                       {"x": 0, "y": 1, "z": 1}, end=False))
    assert vs == [Verdict.PRESUMABLY_TRUE, Verdict.FALSE]
    assert final is Verdict.FALSE


def test_step_errors():
    monitor = mon.PastMonitor(GRASP_NEAR)
    state = mon.new_state(monitor)
    with pytest.raises(MissingVariable):
        mon.step(monitor, state, TraceEvent(0, {"grasp": True}))
    state, _ = mon.step(monitor, state, TraceEvent(0, {}, terminal=True))
    with pytest.raises(EventAfterEnd):
        mon.step(monitor, state, TraceEvent(1, {"grasp": True, "near": True}))


def test_yesterday_base_case():
    # Y p is false at position 0 by definition.
    final, vs = mon.run_trace(fm.FYesterday(P), trace({"p": True}))
    assert vs[0] is Verdict.PRESUMABLY_FALSE
    assert final is Verdict.FALSE


def test_since_hand_unfolded():
    # p S q over [{p,~q},{p,q},{p,~q}]: true at position 2 (q at 1, p since).
    f = fm.FSince(P, Q)
    rows = [{"p": True, "q": False}, {"p": True, "q": True},
            {"p": True, "q": False}]
    final, _ = mon.run_trace(f, trace(*rows))
    assert final is Verdict.TRUE
    bf_final = mon.brute_force_eval(f, trace(*rows))
    assert bf_final is Verdict.TRUE


def test_bounded_once_window():
    # O[0,1] p: p in the last two positions.
    f = fm.FOnceBounded(0, 1, P)
    _, vs = mon.run_trace(f, trace({"p": True}, {"p": False}, {"p": False},
                                   end=False))
    truths = [v.truth for v in vs]
    assert truths == [True, True, False]


# ── traces and files ───────────────────────────────────────────────────────

def test_trace_invariants():
    with pytest.raises(ValueError):
        Trace((TraceEvent(1, {}), TraceEvent(1, {})))
    with pytest.raises(ValueError):
        Trace((TraceEvent(0, {}, terminal=True), TraceEvent(1, {})))
    with pytest.raises(ValueError):
        TraceEvent(0, {"x": 1}, terminal=True)


def test_trace_ndjson_round_trip():
    text = ('{"tick": 0, "assign": {"grasp": false, "near": true}}\n'
            '{"tick": 3, "assign": {"grasp": true, "near": true}}\n'
            '{"end": true}\n')
    tr = mon.parse_trace(text)
    assert tr.terminated
    assert len(tr.states) == 2
    assert mon.parse_trace(mon.serialize_trace(tr)).events == tr.events


@pytest.mark.parametrize("bad,line", [
    ('{"tick": 0}\n{"tick": 0}', 2),
    ('{"end": true}\n{"tick": 1}', 2),
    ('not json', 1),
    ('{"tick": -1}', 1),
    ('{"tick": 0, "assign": {"x": null}}', 1),
    ('{"tick": 0, "extra": 1}', 1),
])
def test_trace_ndjson_schema_errors(bad, line):
    with pytest.raises(SchemaError) as err:
        mon.parse_trace(bad)
    assert err.value.line == line


# ── explicit automata ──────────────────────────────────────────────────────

def test_compile_monitor_single_atom():
    auto = mon.compile_monitor(P)
    final, vs = auto.run(trace({"p": True}))
    assert vs[0] is Verdict.PRESUMABLY_TRUE
    assert final is Verdict.TRUE


def test_automaton_determinism_and_exhaustiveness():
    auto = mon.compile_monitor(GRASP_NEAR)
    n = len(auto.atom_exprs)
    for state in auto.reachable_verdict_states():
        event_edges = [t for t in auto.outgoing(state) if not t.is_end]
        seen = set()
        for t in event_edges:
            assert not (seen & t.minterms), "guards overlap"
            seen |= t.minterms
        assert seen == set(range(2 ** n)), "guards not exhaustive"
        assert sum(t.is_end for t in auto.outgoing(state)) == 1


def test_hard_states_self_loop():
    auto = mon.compile_monitor(GRASP_NEAR)
    for state in auto.states:
        if state.verdict.is_final:
            for t in auto.outgoing(state.index):
                assert t.target == state.index


def test_too_many_atoms():
    wide = fm.conj(*[fm.FAtom(ex.Atom(f"a{i}")) for i in range(13)])
    with pytest.raises(TooManyAtoms):
        mon.compile_monitor(fm.FHistorically(wide))


def test_state_bound():
    f = fm.FHistorically(fm.FImplies(P, fm.FOnceBounded(0, 9, Q)))
    with pytest.raises(TooManyAtoms):
        mon.compile_monitor(f, state_bound=4)


# ── oracle equivalence (sampled here; exhaustive in the acceptance suite) ──

def _formulas_depth2():
    atoms = [P, Q]
    out = list(atoms)
    for a in atoms:
        out += [fm.FNot(a), fm.FYesterday(a), fm.FOnce(a), fm.FHistorically(a)]
    for a in atoms:
        for b in atoms:
            out += [fm.FAnd(a, b), fm.FSince(a, b)]
    return out


@pytest.mark.parametrize("f", _formulas_depth2(), ids=fm.to_text)
def test_three_routes_agree_exhaustively_depth2(f):
    auto = mon.compile_monitor(f)
    for L in range(4):
        for bits in itertools.product([False, True], repeat=2 * L):
            rows = [{"p": bits[2 * i], "q": bits[2 * i + 1]} for i in range(L)]
            for end in (False, True):
                tr = trace(*rows, end=end)
                bf_final, bf = mon.brute_force_verdicts(f, tr)
                inc_final, inc = mon.run_trace(f, tr)
                auto_final, auto_vs = auto.run(tr)
                assert bf == inc == auto_vs, (fm.to_text(f), rows, end)
                assert bf_final == inc_final == auto_final


def test_verdict_monotonicity_random():
    import random
    rng = random.Random(7)
    fs = _formulas_depth2()
    for _ in range(300):
        f = rng.choice(fs)
        rows = [{"p": rng.random() < 0.5, "q": rng.random() < 0.5}
                for _ in range(rng.randrange(6))]
        _, vs = mon.run_trace(f, trace(*rows, end=True))
        hardened = False
        for prev, cur in zip(vs, vs[1:]):
            if prev.is_final:
                hardened = True
                assert cur == prev
        _ = hardened


# ── oracle spec export ─────────────────────────────────────────────────────

def test_export_oracle_spec_fig6_pair():
    from reqforge.parser import parse_requirement
    from reqforge.semantics import ModeModel
    reqs = [
        parse_requirement("SV shall always !(x = 0 | y = 0 | z = 0)",
                          req_id="R2_2")[0],
        parse_requirement("SV shall always (grasp => near)", req_id="R1_8")[0],
    ]
    spec = mon.export_oracle_spec(reqs, ModeModel())
    assert [m.id for m in spec.monitors] == ["R1_8", "R2_2"]
    by_id = {m.id: m for m in spec.monitors}
    assert [n for n, _ in by_id["R2_2"].variables] == ["x", "y", "z"]
    assert [n for n, _ in by_id["R1_8"].variables] == ["grasp", "near"]
    # a parsed spec reproduces the formulas
    parsed = mon.parse_oracle_spec(spec.to_json())
    assert parsed.monitors == spec.monitors
    assert parsed.tick_period_ms == 100


def test_export_oracle_spec_empty():
    spec = mon.export_oracle_spec([])
    assert spec.monitors == ()
    assert mon.parse_oracle_spec(spec.to_json()) == spec


def test_export_oracle_spec_twenty_requirements():
    from reqforge.fixtures import grasping_fixture
    s = grasping_fixture()
    spec = mon.export_oracle_spec(s.ordered())
    assert len(spec.monitors) == 20
    assert len({m.id for m in spec.monitors}) == 20
    assert [m.id for m in spec.monitors] == sorted(m.id for m in spec.monitors)
