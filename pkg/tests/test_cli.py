"""End-to-end command behavior: exit codes, determinism, formats."""

import json

import pytest

from slantgeo.cli import main
from slantgeo.report import ENGINE_VERSION


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def manifest_text(**overrides) -> str:
    doc = {
        "manifest_version": 1,
        "ambient": {"builtin": "euclidean_cosymplectic", "n": 2},
        "submanifold": {
            "params": ["x1", "x2"],
            "domain": [[0.05, 1.5], [0.05, 1.5]],
            "map": ["0", "cos(x1)", "x2", "sin(x1)", "0"],
        },
        "sampling": {"grid": 4, "seed": 3},
        "expect": {"theta": "x1", "xi_position": "normal"},
    }
    doc.update(overrides)
    return json.dumps(doc)


def test_classify_builtin(capsys):
    code, out, _ = run_cli(capsys, "classify", manifest_text())
    doc = json.loads(out)
    assert code == 0 and doc["exit_code"] == 0
    assert doc["engine_version"] == ENGINE_VERSION
    assert doc["payload"]["class"] == "cosymplectic"
    assert doc["payload"]["sample_count"] == 200


def test_classify_kenmotsu_class_expectation(capsys):
    doc = {
        "manifest_version": 1,
        "ambient": {"builtin": "kenmotsu_warped", "n": 1},
        "expect": {"class": "kenmotsu"},
    }
    code, out, _ = run_cli(capsys, "classify", json.dumps(doc))
    payload = json.loads(out)["payload"]
    assert code == 0 and payload["class_matches"] is True


def test_slant_reports_angles_in_radians_and_degrees(capsys):
    code, out, _ = run_cli(capsys, "slant", manifest_text())
    doc = json.loads(out)
    assert code == 0
    summary = doc["payload"]["summary"]
    assert summary["verdict"] == "pointwise-slant"
    assert summary["expected_theta_deviation"] < 1e-6
    sample = doc["payload"]["samples"][0]
    assert sample["angle_degrees"] == pytest.approx(sample["angle"] * 180 / 3.141592653589793)


def test_semislant_summary(capsys):
    code, out, _ = run_cli(capsys, "example", "semislant-r11", "semislant")
    doc = json.loads(out)
    summary = doc["payload"]["summary"]
    assert code == 0
    assert summary["verdict"] == "proper"
    assert (summary["invariant_dim"], summary["slant_dim"]) == (2, 2)
    assert summary["verdict_matches"] and summary["xi_position_matches"]


def test_verify_exit_zero_on_pass(capsys):
    code, out, _ = run_cli(capsys, "verify", "slant-basic", manifest_text())
    doc = json.loads(out)
    assert code == 0
    assert doc["payload"]["summary"]["fail"] == 0


def test_verify_exit_one_on_failed_expectation(capsys):
    bad = manifest_text(expect={"theta": "x1 + 0.3"})
    code, out, _ = run_cli(capsys, "verify", "slant-basic", bad)
    assert code == 1
    assert json.loads(out)["payload"]["summary"]["fail"] >= 1


def test_verify_all_skipped_is_exit_zero_with_note(capsys):
    # Kenmotsu ambient: the parallel-transfer identities do not apply
    code, out, _ = run_cli(capsys, "example", "slant-kenmotsu", "verify",
                           "parallel-tensors")
    doc = json.loads(out)
    assert code == 0
    assert doc["payload"]["summary"]["pass"] == 0
    assert doc["payload"]["summary"]["note"] == "all checks skipped or vacuous"


def test_invalid_manifest_is_exit_two(capsys):
    code, out, err = run_cli(capsys, "slant", '{"manifest_version": 1}')
    assert code == 2 and out == "" and "ambient" in err


def test_unknown_entry_and_suite_are_exit_two(capsys):
    code, _, err = run_cli(capsys, "example", "nope", "slant")
    assert code == 2 and "unknown catalog entry" in err
    code, _, err = run_cli(capsys, "verify", "nope", manifest_text())
    assert code == 2 and "unknown suite" in err


def test_degenerate_grid_is_exit_three(capsys):
    rank_drop = manifest_text(
        submanifold={
            "params": ["x1", "x2"],
            "domain": [[0.1, 1.0], [0.1, 1.0]],
            "map": ["x1", "x1", "0", "0", "0"],
        },
        expect={},
    )
    code, out, _ = run_cli(capsys, "slant", rank_drop)
    assert code == 3
    assert json.loads(out)["payload"]["summary"]["degenerate_points"] > 0


def test_same_manifest_and_seed_byte_identical(capsys):
    _, first, _ = run_cli(capsys, "slant", manifest_text())
    _, second, _ = run_cli(capsys, "slant", manifest_text())
    assert first == second
    _, reseeded, _ = run_cli(capsys, "slant", manifest_text(), "--seed", "9")
    assert json.loads(reseeded)["manifest_digest"] != json.loads(first)["manifest_digest"]


def test_grid_and_tol_overrides(capsys):
    code, out, _ = run_cli(capsys, "slant", manifest_text(), "--grid", "2,3")
    assert code == 0
    assert json.loads(out)["payload"]["summary"]["grid_points"] == 6
    code, _, _ = run_cli(capsys, "slant", manifest_text(), "--tol", "1e-20")
    assert code == 1


def test_text_format_renders_same_payload(capsys):
    _, as_json, _ = run_cli(capsys, "slant", manifest_text())
    _, as_text, _ = run_cli(capsys, "slant", manifest_text(), "--format", "text")
    doc = json.loads(as_json)
    assert "command: slant" in as_text
    assert doc["manifest_digest"] in as_text
    assert "verdict: pointwise-slant" in as_text


def test_out_writes_atomically(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "slant", manifest_text(), "--out", str(target))
    assert code == 0 and out == ""
    doc = json.loads(target.read_text(encoding="utf-8"))
    assert doc["exit_code"] == 0
    leftovers = [p for p in tmp_path.iterdir() if p.name != "report.json"]
    assert leftovers == []


def test_example_list(capsys):
    code, out, _ = run_cli(capsys, "example", "--list")
    doc = json.loads(out)
    ids = [row["id"] for row in doc["payload"]["entries"]]
    assert code == 0 and "slant-r5-tangent" in ids and len(ids) >= 20
