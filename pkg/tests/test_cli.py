from __future__ import annotations

import json
from pathlib import Path

import pytest

from affinetask import complex_from_dict
from affinetask.cli import main
from affinetask.simulate import STATE_CAP_ENV
from conftest import FIXTURE_DIR

OF1 = str(FIXTURE_DIR / "obstruction_free_1.json")
RES1 = str(FIXTURE_DIR / "resilient_1.json")
SS = str(FIXTURE_DIR / "superset_closed_2_13.json")

REPRO_FILES = [
    "subdivision_one_round.svg", "task_resilient_1.svg",
    "contention_two_rounds.svg", "critical_simplices.svg",
    "concurrency_map.svg", "task_affine.svg",
    "classification.json", "affine_report.json",
    "leader_report.json", "model_check.json",
]


def run_json(capsys, argv) -> tuple[int, dict]:
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


# --- chr -------------------------------------------------------------------------


def test_chr_json_round_trips(capsys):
    code, doc = run_json(capsys, ["chr", "--n", "2"])
    assert code == 0
    K = complex_from_dict(doc)
    assert K.n == 2 and len(K.facets) == 3


def test_chr_two_rounds_to_file(tmp_path):
    out = tmp_path / "chr2.json"
    assert main(["chr", "--n", "2", "--rounds", "2", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["facets"]) == 9


def test_task_json_doubles_as_highlight_overlay(tmp_path):
    task_file = tmp_path / "task.json"
    svg_file = tmp_path / "picture.svg"
    assert main(["affine", "build", "--adversary", OF1,
                 "--out", str(task_file)]) == 0
    assert main(["chr", "--n", "3", "--rounds", "2", "--format", "svg",
                 "--highlight", str(task_file), "--out", str(svg_file)]) == 0
    svg = svg_file.read_text()
    assert svg.count('class="hl0"') == 73


def test_chr_accepts_highlight_from_a_sub_complex(tmp_path):
    # the subdivided edge is a face of the subdivided triangle
    small = tmp_path / "small.json"
    svg = tmp_path / "x.svg"
    assert main(["chr", "--n", "2", "--rounds", "2", "--out", str(small)]) == 0
    assert main(["chr", "--n", "3", "--rounds", "2", "--format", "svg",
                 "--highlight", str(small), "--out", str(svg)]) == 0
    assert svg.read_text().count('class="hl0"') == 9


def test_chr_rejects_foreign_highlight(tmp_path, capsys):
    # one-round vertices are not two-round vertices
    shallow = tmp_path / "shallow.json"
    assert main(["chr", "--n", "3", "--out", str(shallow)]) == 0
    code = main(["chr", "--n", "3", "--rounds", "2", "--format", "svg",
                 "--highlight", str(shallow), "--out", str(tmp_path / "x.svg")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_chr_dimension_four_emits_a_mesh(capsys):
    assert main(["chr", "--n", "4", "--format", "svg"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("OFF\n32 176 0\n")


# --- adv -------------------------------------------------------------------------


def test_adv_setcon_alpha_fair(capsys):
    code, doc = run_json(capsys, ["adv", "setcon", "--adversary", RES1])
    assert (code, doc) == (0, {"setcon": 2})
    code, doc = run_json(capsys, ["adv", "alpha", "--adversary", RES1])
    assert code == 0
    assert doc["alpha"][""] == 0
    assert doc["alpha"]["1"] == 0
    assert doc["alpha"]["1,2"] == 1
    assert doc["alpha"]["1,2,3"] == 2
    code, doc = run_json(capsys, ["adv", "fair", "--adversary", RES1])
    assert (code, doc) == (0, {"fair": True})


def test_adv_fair_reports_witness_and_fails(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 3, "live_sets": [[1, 2], [3]]}))
    code, doc = run_json(capsys, ["adv", "fair", "--adversary", str(bad)])
    assert code == 1
    assert doc == {"fair": False, "witness": {"P": [1, 3], "Q": [1]}}


def test_adv_classify_sweep(capsys):
    code, doc = run_json(capsys, ["adv", "classify", "--n", "2"])
    assert code == 0
    assert doc["count"] == 8
    assert sum(r["fair"] for r in doc["rows"]) == 6


def test_adv_requires_adversary_file(capsys):
    assert main(["adv", "setcon"]) == 2
    assert "needs --adversary" in capsys.readouterr().err


def test_missing_file_is_an_input_error(capsys):
    assert main(["adv", "setcon", "--adversary", "no/such/file.json"]) == 2


# --- affine ----------------------------------------------------------------------


def test_affine_build_with_svg(tmp_path):
    task_file = tmp_path / "task.json"
    svg_file = tmp_path / "task.svg"
    assert main(["affine", "build", "--adversary", SS, "--combine",
                 "intersection", "--out", str(task_file),
                 "--svg", str(svg_file)]) == 0
    doc = json.loads(task_file.read_text())
    assert doc["combine"] == "intersection"
    assert len(doc["facets"]) == 139
    assert svg_file.read_text().count('class="hl0"') == 139


@pytest.mark.parametrize("prop", ["distribution", "single-carrier", "subtraction"])
def test_affine_verify_properties(capsys, prop):
    code, doc = run_json(capsys, ["affine", "verify", prop, "--adversary", SS])
    assert code == 0
    assert doc["ok"] is True
    assert doc["checked"] > 0


# --- leader ----------------------------------------------------------------------


def test_leader_verify_single_query(capsys):
    code, doc = run_json(capsys, ["leader", "verify", "--adversary", RES1,
                                  "--Q", "1,3"])
    assert code == 0
    assert set(doc) == {"mu_validity", "mu_agreement", "mu_robustness"}
    assert all(part["ok"] for part in doc.values())


# --- simulate ----------------------------------------------------------------------


def test_simulate_check_one_participation(capsys):
    code, doc = run_json(capsys, [
        "simulate", "check", "--adversary", OF1, "--participation", "1,2",
        "--safety"])
    assert code == 0
    (row,) = doc["participations"]
    assert row["participation"] == [1, 2]
    assert row["states"] == 126
    assert row["safety"]["ok"] is True
    assert "liveness" not in row


def test_simulate_check_rejects_mismatched_n(capsys):
    assert main(["simulate", "check", "--adversary", OF1, "--n", "4"]) == 2


def test_simulate_traces_round_trip_through_replay(tmp_path, capsys):
    traces = tmp_path / "traces"
    code = main(["simulate", "check", "--adversary", OF1,
                 "--participation", "1,2", "--fault-budget", "1",
                 "--liveness", "--trace-out", str(traces),
                 "--out", str(tmp_path / "report.json")])
    assert code == 1
    doc = json.loads((tmp_path / "report.json").read_text())
    (row,) = doc["participations"]
    assert len(row["liveness"]["violations"]) == 10
    written = sorted(traces.glob("trace_12_*.json"))
    assert len(written) == 10
    code, decoded = run_json(capsys, [
        "simulate", "replay", "--adversary", OF1, "--fault-budget", "1",
        "--trace", str(written[0])])
    assert code == 0
    assert decoded["participation"] == [1, 2]
    states = {p["pc"] for p in decoded["processes"].values()}
    assert "Crashed" in states


def test_simulate_respects_state_cap_env(monkeypatch, capsys):
    monkeypatch.setenv(STATE_CAP_ENV, "10")
    assert main(["simulate", "check", "--adversary", OF1,
                 "--participation", "1,2"]) == 2
    assert "state cap" in capsys.readouterr().err


# --- repro -----------------------------------------------------------------------


def test_repro_bundle_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["repro", "--out", str(a)]) == 0
    assert main(["repro", "--out", str(b)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(REPRO_FILES + ["manifest.json"])
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    manifest = json.loads((a / "manifest.json").read_text())
    assert sorted(manifest["files"]) == sorted(REPRO_FILES)
    classification = json.loads((a / "classification.json").read_text())
    assert classification["count"] == 128
    affine_doc = json.loads((a / "affine_report.json").read_text())
    assert affine_doc["facet_counts"] == {"union": 73, "intersection": 49}
    assert (a / "task_affine.svg").read_text().count('class="hl0"') == 73


def test_repro_with_selected_adversary(tmp_path):
    out = tmp_path / "bundle"
    assert main(["repro", "--out", str(out), "--adversary", SS]) == 0
    assert (out / "task_affine.svg").read_text().count('class="hl0"') == 145
    doc = json.loads((out / "affine_report.json").read_text())
    assert doc["facet_counts"] == {"union": 145, "intersection": 139}


def test_repro_only_defined_at_three(tmp_path):
    assert main(["repro", "--n", "2", "--out", str(tmp_path / "x")]) == 2
