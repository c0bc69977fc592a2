import json

import pytest

from reqforge.cli import main
from reqforge.fixtures import sample_corpus_set
from reqforge.store import export_set, metrics, metrics_json


@pytest.fixture()
def corpus_json(tmp_path):
    path = tmp_path / "corpus.json"
    path.write_bytes(export_set(sample_corpus_set(), "json"))
    return str(path)


@pytest.fixture()
def corpus_txt(tmp_path):
    path = tmp_path / "corpus.txt"
    path.write_text("Rover shall always battery > 0\n"
                    "SV shall (grasp(TGT, BGP) & closer(SV, TGT))\n")
    return str(path)


def test_check_corpus(corpus_json, capsys):
    assert main(["check", corpus_json]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 8
    assert "EC_1: (in,trigger,until)" in out


def test_check_parse_failure(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("C always p\n")
    assert main(["check", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "shall" in err and ":1:" in err


def test_check_missing_file(capsys):
    assert main(["check", "/nonexistent/reqs.json"]) == 3


def test_formalize_rover(corpus_txt, capsys):
    assert main(["formalize", corpus_txt, "--target", "both"]) == 0
    out = capsys.readouterr().out
    assert "L1: G (battery > 0)" in out
    assert "L1: H (battery > 0)" in out


def test_formalize_duration_bound_follows_tick(tmp_path, capsys):
    path = tmp_path / "r.txt"
    path.write_text("when off System shall after 15 minutes !resumeVentilation\n")
    assert main(["formalize", str(path), "--tick-ms", "100"]) == 0
    assert "F[9000,9000]" in capsys.readouterr().out
    assert main(["formalize", str(path), "--tick-ms", "200"]) == 0
    assert "F[4500,4500]" in capsys.readouterr().out


def test_formalize_tick_env_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("REQFORGE_TICK_MS", "500")
    path = tmp_path / "r.txt"
    path.write_text("System shall within 1 second ok\n")
    assert main(["formalize", str(path)]) == 0
    assert "F[0,2]" in capsys.readouterr().out


def test_formalize_unsupported_past_exits_1(tmp_path, capsys):
    path = tmp_path / "r.txt"
    path.write_text("C shall until u r\n")
    assert main(["formalize", str(path), "--target", "past"]) == 1
    captured = capsys.readouterr()
    assert "L1" in captured.err


def test_formalize_json_validates(corpus_json, capsys):
    # EC_1 (until) and LV_2 (after) fall outside the past-time subset, so
    # --target both reports them and exits 1 while still emitting the rest.
    assert main(["formalize", corpus_json, "--target", "both", "--json"]) == 1
    captured = capsys.readouterr()
    rows = json.loads(captured.out)
    assert len(rows) == 8
    assert all("future" in row for row in rows)
    unsupported = {row["id"] for row in rows if "unsupported" in row}
    assert unsupported == {"EC_1", "LV_2"}
    assert main(["formalize", corpus_json, "--json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert all("future_tree" in row for row in rows)


def test_monitor_flow(tmp_path, capsys):
    reqs = tmp_path / "r.txt"
    reqs.write_text("SV shall always (grasp => near)\n")
    spec = tmp_path / "spec.json"
    assert main(["formalize", str(reqs), "--target", "past",
                 "--oracle-out", str(spec)]) == 0
    capsys.readouterr()

    ok_trace = tmp_path / "ok.ndjson"
    ok_trace.write_text('{"tick": 0, "assign": {"grasp": true, "near": true}}\n'
                        '{"end": true}\n')
    assert main(["monitor", str(spec), str(ok_trace)]) == 0
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert lines[-1]["verdict"] == "True"

    bad_trace = tmp_path / "bad.ndjson"
    bad_trace.write_text('{"tick": 0, "assign": {"grasp": true, "near": false}}\n')
    assert main(["monitor", str(spec), str(bad_trace)]) == 1
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert lines[-1]["verdict"] == "False"


def test_monitor_empty_trace_vacuous(tmp_path, capsys):
    reqs = tmp_path / "r.txt"
    reqs.write_text("SV shall always (grasp => near)\n")
    spec = tmp_path / "spec.json"
    main(["formalize", str(reqs), "--target", "past", "--oracle-out", str(spec)])
    capsys.readouterr()
    tracef = tmp_path / "t.ndjson"
    tracef.write_text('{"end": true}\n')
    assert main(["monitor", str(spec), str(tracef)]) == 0
    line = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert line["verdict"] == "True"


def test_monitor_missing_variable_exits_3(tmp_path, capsys):
    reqs = tmp_path / "r.txt"
    reqs.write_text("SV shall always (grasp => near)\n")
    spec = tmp_path / "spec.json"
    main(["formalize", str(reqs), "--target", "past", "--oracle-out", str(spec)])
    capsys.readouterr()
    tracef = tmp_path / "t.ndjson"
    tracef.write_text('{"tick": 0, "assign": {"grasp": true}}\n')
    assert main(["monitor", str(spec), str(tracef)]) == 3
    assert "near" in capsys.readouterr().err


def test_monitor_schema_error_exits_3(tmp_path, capsys):
    reqs = tmp_path / "r.txt"
    reqs.write_text("SV shall always p\n")
    spec = tmp_path / "spec.json"
    main(["formalize", str(reqs), "--target", "past", "--oracle-out", str(spec)])
    capsys.readouterr()
    tracef = tmp_path / "t.ndjson"
    tracef.write_text('{"tick": 0}\nnot json\n')
    assert main(["monitor", str(spec), str(tracef)]) == 3
    assert "line 2" in capsys.readouterr().err


def test_monitor_trace_from_stdin(tmp_path, capsys, monkeypatch):
    import io
    reqs = tmp_path / "r.txt"
    reqs.write_text("SV shall always p\n")
    spec = tmp_path / "spec.json"
    main(["formalize", str(reqs), "--target", "past", "--oracle-out", str(spec)])
    capsys.readouterr()
    monkeypatch.setattr("sys.stdin",
                        io.StringIO('{"tick": 0, "assign": {"p": true}}\n'
                                    '{"end": true}\n'))
    assert main(["monitor", str(spec), "-", "--stream"]) == 0


def test_metrics_table_mirrors_row_labels(corpus_json, capsys):
    assert main(["metrics", corpus_json]) == 0
    out = capsys.readouterr().out
    for label in ("scope-option", "condition-option", "timing-option",
                  "parent-child", "Total Requirements"):
        assert label in out
    assert "Total Requirements  8" in out


def test_metrics_json_matches_library(corpus_json, capsys):
    assert main(["metrics", corpus_json, "--format", "json"]) == 0
    out = capsys.readouterr().out.strip()
    assert out == metrics_json(metrics(sample_corpus_set()))


def test_metrics_csv(corpus_json, capsys):
    assert main(["metrics", corpus_json, "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("dimension,option,count")
    assert "total,requirements,8" in out


def test_outputs_deterministic(corpus_json, capsys):
    main(["check", corpus_json])
    first = capsys.readouterr().out
    main(["check", corpus_json])
    assert capsys.readouterr().out == first


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["metrics", "--format", "nope", "x.json"])
    assert exc.value.code == 2
