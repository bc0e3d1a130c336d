"""CLI contract tests: exit codes, artifact files, determinism, and the
machine-greppable summary line. The binary path arrives via COMBSYNC_CLI."""

import csv
import json
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ["COMBSYNC_CLI"]
SCENARIOS = Path(os.environ["COMBSYNC_SCENARIOS"])
SHORT = SCENARIOS / "short.json"


def run_cli(*args, **kwargs):
    return subprocess.run([CLI, *args], capture_output=True, text=True, **kwargs)


def test_run_writes_report_offsets_histogram(tmp_path):
    result = run_cli("run", "--scenario", str(SHORT), "--out", str(tmp_path))
    assert result.returncode == 0, result.stderr
    assert (tmp_path / "report.json").is_file()
    assert (tmp_path / "offsets.csv").is_file()
    assert (tmp_path / "histogram.csv").is_file()
    assert "rms_wander_ps" in result.stdout
    assert result.stdout.startswith("summary ")

    report = json.loads((tmp_path / "report.json").read_text())
    assert report["rus"][0]["rms_wander_ps"] < 30.0
    assert report["histogram"]["total"] == report["rus"][0]["samples"]

    with open(tmp_path / "offsets.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "time_s"
    assert len(rows) - 1 == report["rus"][0]["samples"]

    with open(tmp_path / "histogram.csv") as fh:
        hist_rows = list(csv.reader(fh))
    assert hist_rows[0] == ["bin_center_s", "count"]
    assert sum(int(r[1]) for r in hist_rows[1:]) == report["histogram"]["total"]


def test_run_is_deterministic(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        result = run_cli("run", "--scenario", str(SHORT), "--out", str(out), "--seed", "3")
        assert result.returncode == 0, result.stderr
    assert (out_a / "offsets.csv").read_bytes() == (out_b / "offsets.csv").read_bytes()
    assert (out_a / "report.json").read_bytes() == (out_b / "report.json").read_bytes()


def test_distinct_seeds_differ_but_both_meet_the_bound(tmp_path):
    offsets = {}
    for seed in (7, 8):
        out = tmp_path / str(seed)
        result = run_cli("run", "--scenario", str(SHORT), "--out", str(out), "--seed", str(seed))
        assert result.returncode == 0, result.stderr
        report = json.loads((out / "report.json").read_text())
        assert report["rus"][0]["rms_wander_ps"] < 30.0
        offsets[seed] = (out / "offsets.csv").read_bytes()
    assert offsets[7] != offsets[8]


def test_msg_log_has_fixed_frame_size(tmp_path):
    result = run_cli("run", "--scenario", str(SHORT), "--out", str(tmp_path), "--msg-log")
    assert result.returncode == 0, result.stderr
    log = tmp_path / "messages_ru0.bin"
    assert log.is_file()
    scenario = json.loads(SHORT.read_text())
    steps = round(scenario["duration_s"] / scenario["caching"]["update_interval_s"])
    assert log.stat().st_size == steps * 20


def test_validate_writes_nothing(tmp_path):
    result = run_cli("validate", "--scenario", str(SHORT), cwd=tmp_path)
    assert result.returncode == 0, result.stderr
    assert "OK" in result.stdout
    assert list(tmp_path.iterdir()) == []


def test_invalid_scenario_exits_1(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"duration_s": -5, "comb": {"f_rep_hz": 2.5e9,
                                                          "center_wavelength_m": 1.5511e-06,
                                                          "n_lines": 3}}))
    assert run_cli("validate", "--scenario", str(bad)).returncode == 1
    assert run_cli("run", "--scenario", str(bad), "--out", str(tmp_path)).returncode == 1
    assert run_cli("run", "--scenario", str(tmp_path / "missing.json")).returncode == 1


def test_unwritable_output_exits_2(tmp_path):
    blocker = tmp_path / "not_a_dir"
    blocker.write_text("occupied")
    result = run_cli("run", "--scenario", str(SHORT), "--out", str(blocker))
    assert result.returncode == 2


def test_fading_table_shape_and_filter_comparison():
    result = run_cli("fading-table")
    assert result.returncode == 0, result.stderr
    rows = list(csv.DictReader(result.stdout.splitlines()))
    assert rows, "no fading rows"

    amp = {(float(r["filter_ghz"]), float(r["length_km"]), int(r["k"])): float(r["amplitude"])
           for r in rows}

    # The stock trunk-length row for the 25 GHz tone exists and is physical.
    assert 0.0 < amp[(50.0, 13.0, 10)] <= 1.0
    # No dispersion, no fading.
    for (f, length, k), a in amp.items():
        if length == 0.0:
            assert a == pytest.approx(1.0)
    # Inside the main lobe a wider filter fades the 25 GHz tone harder.
    assert amp[(200.0, 2.0, 10)] < amp[(50.0, 2.0, 10)]


def test_jitter_lists_every_preset():
    result = run_cli("jitter")
    assert result.returncode == 0, result.stderr
    for name in ("carrier-25g", "clock-2g5", "clock-2g5-with-data", "embedded-clock-2g5"):
        assert name in result.stdout
    assert "fading" in result.stdout

    as_json = run_cli("jitter", "--format", "json")
    parsed = json.loads(as_json.stdout)
    jitter = {row["preset"]: row["rms_jitter_s"] for row in parsed["jitter"]}
    assert jitter["clock-2g5"] == pytest.approx(70.3e-15, rel=5e-3)
    assert parsed["fading"]["survives"] is True


def test_presets_export(tmp_path):
    listing = run_cli("presets")
    assert listing.returncode == 0
    assert "clock-2g5" in listing.stdout

    result = run_cli("presets", "--out", str(tmp_path))
    assert result.returncode == 0, result.stderr
    files = sorted(p.name for p in tmp_path.glob("*.json"))
    assert files == ["carrier-25g.json", "clock-2g5-with-data.json",
                     "clock-2g5.json", "embedded-clock-2g5.json"]
    profile = json.loads((tmp_path / "clock-2g5.json").read_text())
    assert profile["carrier_hz"] == pytest.approx(2.5e9)
    assert len(profile["segments"]) == 2


def test_scenario_directory_runs_each_file(tmp_path):
    scenario_dir = tmp_path / "scenarios"
    scenario_dir.mkdir()
    for name in ("one", "two"):
        scenario = json.loads(SHORT.read_text())
        scenario["name"] = name
        scenario["duration_s"] = 5.0
        (scenario_dir / f"{name}.json").write_text(json.dumps(scenario))
    out = tmp_path / "out"
    result = run_cli("run", "--scenario", str(scenario_dir), "--out", str(out))
    assert result.returncode == 0, result.stderr
    assert (out / "one" / "report.json").is_file()
    assert (out / "two" / "report.json").is_file()
