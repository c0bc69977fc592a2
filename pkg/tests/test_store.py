import random

import pytest

from reqforge.errors import (
    CycleDetected, ParseError, SchemaError, UnknownId, UnknownParent,
)
from reqforge.fixtures import (
    engine_controller_fixture, grasping_fixture, inspection_rover_fixture,
    sample_corpus_set,
)
from reqforge.parser import parse_requirement
from reqforge.store import (
    RequirementSet, descendants, export_set, import_set, metrics,
    metrics_json, remove, upsert, upsert_many,
)


def req(text, req_id, parent=None):
    return parse_requirement(text, req_id=req_id, parent_id=parent,
                             project="p")[0]


def test_upsert_parent_child():
    s = RequirementSet("p")
    s = upsert(s, req("A shall r", "FUN5"))
    s = upsert(s, req("A shall q", "FUN5_3", parent="FUN5"))
    assert metrics(s).child_count == 1


def test_self_parent_cycle():
    with pytest.raises(CycleDetected):
        req("A shall r", "X", parent="X")


def test_two_node_cycle():
    s = RequirementSet("p")
    s = upsert(s, req("A shall r", "A"))
    s = upsert(s, req("A shall r", "B", parent="A"))
    with pytest.raises(CycleDetected):
        upsert(s, req("A shall r", "A", parent="B"))


def test_unknown_parent():
    with pytest.raises(UnknownParent):
        upsert(RequirementSet("p"), req("A shall r", "X", parent="missing"))


def test_batch_upsert_allows_forward_parents():
    s = upsert_many(RequirementSet("p"), [
        req("A shall r", "child", parent="root"),
        req("A shall r", "root"),
    ])
    assert set(s.requirements) == {"root", "child"}


def test_remove_reroots_children():
    s = upsert_many(RequirementSet("p"), [
        req("A shall r", "root"),
        req("A shall r", "mid", parent="root"),
        req("A shall r", "leaf", parent="mid"),
    ])
    s = remove(s, "mid")
    assert s.get("leaf").parent_id is None


def test_descendants_preorder():
    s = upsert_many(RequirementSet("p"), [
        req("A shall r", "FUN6"),
        *[req("A shall r", f"FUN6_{i}", parent="FUN6") for i in range(1, 7)],
        req("A shall r", "FUN6_1_1", parent="FUN6_1"),
    ])
    got = [r.id for r in descendants(s, "FUN6")]
    assert got == ["FUN6_1", "FUN6_1_1", "FUN6_2", "FUN6_3", "FUN6_4",
                   "FUN6_5", "FUN6_6"]
    assert descendants(s, "FUN6_2") == []
    with pytest.raises(UnknownId):
        descendants(s, "nope")


def test_forest_invariant_under_random_mutations():
    rng = random.Random(11)
    s = RequirementSet("p")
    ids = []
    for i in range(120):
        rid = f"R{i}"
        parent = rng.choice(ids) if ids and rng.random() < 0.7 else None
        s = upsert(s, req("A shall r", rid, parent=parent))
        ids.append(rid)
        if ids and rng.random() < 0.2:
            victim = rng.choice(ids)
            s = remove(s, victim)
            ids.remove(victim)
    # survives the constructor's own forest validation
    RequirementSet(s.project, dict(s.requirements), s.mode_model, s.domains)


def test_metrics_empty():
    r = metrics(RequirementSet("p"))
    assert r.total == 0 and r.child_count == 0
    assert r.scope_counts == {} and r.timing_counts == {}


def test_metrics_small_mixed():
    s = upsert_many(RequirementSet("p"), [
        req("A shall always r", "R1"),
        req("B shall always q", "R2"),
        req("in m when c A shall until u r", "R3"),
    ])
    r = metrics(s)
    assert r.scope_counts == {"in": 1, "null": 2}
    assert r.condition_counts == {"null": 2, "trigger": 1}
    assert r.timing_counts == {"always": 2, "until": 1}


def test_metrics_sum_to_total():
    for fixture in (engine_controller_fixture, inspection_rover_fixture,
                    grasping_fixture, sample_corpus_set):
        r = metrics(fixture())
        assert sum(r.scope_counts.values()) == r.total
        assert sum(r.condition_counts.values()) == r.total
        assert sum(r.timing_counts.values()) == r.total
        assert r.child_count <= r.total


def test_engine_controller_distribution():
    r = metrics(engine_controller_fixture())
    assert r.total == 42
    assert r.scope_counts == {"in": 4, "null": 38}
    assert r.condition_counts == {"trigger": 42}
    assert r.timing_counts == {"eventually": 14, "until": 28}
    assert r.child_count == 28


def test_metrics_json_deterministic():
    s = engine_controller_fixture()
    assert metrics_json(metrics(s)) == metrics_json(metrics(s))


# ── import / export ────────────────────────────────────────────────────────

def test_json_round_trip_sample_corpus():
    s = sample_corpus_set()
    assert import_set(export_set(s, "json"), "json") == s


def test_csv_round_trip():
    s = grasping_fixture()
    again = import_set(export_set(s, "csv"), "csv")
    assert again.requirements == s.requirements


def test_json_round_trip_of_programmatic_set():
    s = upsert_many(RequirementSet("p"), [
        req("in m when c A shall until u r", "R1"),
        req("A shall after 15 minutes !resume", "R2", parent="R1"),
    ])
    assert import_set(export_set(s, "json"), "json") == s


def test_csv_missing_id_column():
    with pytest.raises(SchemaError):
        import_set(b"parent_id,fretish_text\n,A shall r\n", "csv")


def test_json_duplicate_ids():
    s = export_set(upsert_many(RequirementSet("p"), [req("A shall r", "R1")]))
    doubled = s.replace(b'"id": "R1"', b'"id": "R1"', 1)
    payload = doubled.decode().replace(
        '"requirements": [', '"requirements": [\n    {"id": "R1", "text": "A shall r"},', 1)
    with pytest.raises(SchemaError) as err:
        import_set(payload.encode(), "json")
    assert "duplicate" in str(err.value)


def test_import_reports_parse_error_with_id():
    payload = (b'{"schema": 1, "project": "p", "requirements": '
               b'[{"id": "BAD", "text": "Controller always p"}]}')
    with pytest.raises(ParseError) as err:
        import_set(payload, "json")
    assert "BAD" in str(err.value)


def test_import_rejects_wrong_schema_version():
    with pytest.raises(SchemaError):
        import_set(b'{"schema": 99, "project": "p", "requirements": []}', "json")
