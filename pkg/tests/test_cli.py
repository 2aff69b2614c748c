import json

import numpy as np
import pytest

from splitbench.cli import main

EXPR = (
    "id,g0,g1,g2\n"
    + "\n".join(
        f"s{i},{x},{y},{0.3 * x}"
        for i, (x, y) in enumerate(
            [(-4, 0.2), (-4.4, -0.1), (-3.8, 0.05), (-4.1, 0.1),
             (4, -0.2), (4.3, 0.1), (3.9, 0.0), (4.2, -0.05)]
        )
    )
    + "\n"
)

CLINICAL = (
    "sample_id,time_days,event,label\n"
    + "\n".join(f"s{i},{50 + i},{1 if i in (0, 4) else 0},{'neg' if i < 4 else 'pos'}" for i in range(8))
    + "\n"
)

ALL_CENSORED = (
    "sample_id,time_days,event\n"
    + "\n".join(f"s{i},{50 + i},0" for i in range(8))
    + "\n"
)


@pytest.fixture
def dataset(tmp_path):
    expr = tmp_path / "expr.csv"
    expr.write_text(EXPR)
    clin = tmp_path / "clin.csv"
    clin.write_text(CLINICAL)
    return expr, clin


def write_script(tmp_path, commands):
    path = tmp_path / "script.jsonl"
    path.write_text("\n".join(json.dumps(c) for c in commands) + "\n")
    return path


SPLIT_ROOT = {
    "op": "split",
    "node": "n0",
    "pcx": 0,
    "pcy": 1,
    "line": {"point": [0.0, 0.0], "normal": [1.0, 0.0]},
}


def test_ingest_check_ok(dataset, capsys):
    expr, clin = dataset
    code = main(["ingest-check", "--expression", str(expr), "--clinical", str(clin)])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["n_samples"] == 8
    assert record["n_features"] == 3
    assert record["label_histogram"] == {"neg": 4, "pos": 4}


def test_ingest_check_duplicate_id_names_it(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("id,g0,g1\nsA,1,2\nsA,3,4\n")
    code = main(["ingest-check", "--expression", str(bad)])
    assert code == 2
    assert "sA" in capsys.readouterr().err


def test_usage_error_exit_1(capsys):
    assert main(["replay", "--script", "x"]) == 1
    assert main(["no-such-command"]) == 1


def test_replay_empty_script(dataset, tmp_path, capsys):
    expr, clin = dataset
    script = write_script(tmp_path, [])
    out_dir = tmp_path / "out"
    code = main([
        "replay", "--expression", str(expr), "--clinical", str(clin),
        "--script", str(script), "--out-dir", str(out_dir),
    ])
    assert code == 0
    model = json.loads((out_dir / "model.json").read_text())
    assert len(model["nodes"]) == 1
    report = json.loads((out_dir / "report.json").read_text())
    assert report["clusters"] == [{"id": "n0", "size": 8, "color": 0}]
    assert "cluster n0: 8 samples" in capsys.readouterr().out


def test_replay_split_writes_artifacts(dataset, tmp_path):
    expr, clin = dataset
    script = write_script(tmp_path, [SPLIT_ROOT])
    out_dir = tmp_path / "out"
    code = main([
        "replay", "--expression", str(expr), "--clinical", str(clin),
        "--script", str(script), "--out-dir", str(out_dir),
    ])
    assert code == 0
    report = json.loads((out_dir / "report.json").read_text())
    assert len(report["clusters"]) == 2
    assert {c["size"] for c in report["clusters"]} == {4}
    assert report["splits"][0]["important"]["selected"]
    assert "survival" in report
    # clusters align with labels perfectly in this construction
    assert report["comparison"]["ari"] == pytest.approx(1.0)


def test_replay_deterministic(dataset, tmp_path):
    expr, clin = dataset
    script = write_script(tmp_path, [SPLIT_ROOT])
    outputs = []
    for run in ("a", "b"):
        out_dir = tmp_path / run
        assert main([
            "replay", "--expression", str(expr), "--clinical", str(clin),
            "--script", str(script), "--out-dir", str(out_dir),
        ]) == 0
        outputs.append((out_dir / "model.json").read_bytes())
    assert outputs[0] == outputs[1]


def test_replay_script_error_exit_3(dataset, tmp_path, capsys):
    expr, clin = dataset
    script = write_script(tmp_path, [dict(SPLIT_ROOT, node="n9")])
    code = main([
        "replay", "--expression", str(expr), "--clinical", str(clin),
        "--script", str(script), "--out-dir", str(tmp_path / "out"),
    ])
    assert code == 3
    assert "command 0" in capsys.readouterr().err


def test_prune_command_in_script(dataset, tmp_path):
    expr, clin = dataset
    script = write_script(tmp_path, [SPLIT_ROOT, {"op": "prune", "node": "n0"}])
    out_dir = tmp_path / "out"
    assert main([
        "replay", "--expression", str(expr), "--clinical", str(clin),
        "--script", str(script), "--out-dir", str(out_dir),
    ]) == 0
    report = json.loads((out_dir / "report.json").read_text())
    assert report["clusters"] == [{"id": "n0", "size": 8, "color": 0}]


def test_export_model_then_classify(dataset, tmp_path, capsys):
    expr, clin = dataset
    script = write_script(tmp_path, [SPLIT_ROOT])
    model = tmp_path / "model.json"
    assert main([
        "export-model", "--expression", str(expr), "--clinical", str(clin),
        "--script", str(script), "--model", str(model),
    ]) == 0

    out = tmp_path / "assignments.csv"
    assert main(["classify", "--model", str(model), "--expression", str(expr), "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "sample_id,cluster"
    assignments = dict(line.split(",") for line in lines[1:])
    assert len(set(assignments.values())) == 2
    # samples in the same blob share a cluster
    assert assignments["s0"] == assignments["s1"]
    assert assignments["s4"] == assignments["s5"]
    assert assignments["s0"] != assignments["s4"]


def test_classify_zero_rule_model(dataset, tmp_path, capsys):
    expr, clin = dataset
    script = write_script(tmp_path, [])
    model = tmp_path / "model.json"
    main([
        "export-model", "--expression", str(expr), "--clinical", str(clin),
        "--script", str(script), "--model", str(model),
    ])
    assert main(["classify", "--model", str(model), "--expression", str(expr)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    clusters = {line.split(",")[1] for line in lines[1:]}
    assert clusters == {"n0"}


def test_survival_all_censored_flat(tmp_path, capsys):
    expr = tmp_path / "expr.csv"
    expr.write_text(EXPR)
    clin = tmp_path / "clin.csv"
    clin.write_text(ALL_CENSORED)
    assert main(["survival", "--expression", str(expr), "--clinical", str(clin)]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["baseline"]["steps"] == [[0.0, 1.0]]
    assert record["curves"][0]["steps"] == [[0.0, 1.0]]


def test_survival_with_script(dataset, tmp_path, capsys):
    expr, clin = dataset
    script = write_script(tmp_path, [SPLIT_ROOT])
    assert main([
        "survival", "--expression", str(expr), "--clinical", str(clin), "--script", str(script),
    ]) == 0
    record = json.loads(capsys.readouterr().out)
    assert len(record["curves"]) == 2


def test_compare_subcommand(dataset, tmp_path, capsys):
    expr, clin = dataset
    script = write_script(tmp_path, [SPLIT_ROOT])
    model = tmp_path / "model.json"
    main([
        "export-model", "--expression", str(expr), "--clinical", str(clin),
        "--script", str(script), "--model", str(model),
    ])
    assert main([
        "compare", "--model", str(model), "--expression", str(expr), "--clinical", str(clin),
    ]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["ari"] == pytest.approx(1.0)
    assert np.asarray(record["table"]).sum() == 8


def test_missing_file_exit_2(tmp_path, capsys):
    assert main(["ingest-check", "--expression", str(tmp_path / "nope.csv")]) == 2
