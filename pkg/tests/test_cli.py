import json
import os
import subprocess
import sys

import pytest

from eyeguide.cli import EXIT_CALIBRATION, EXIT_OK, EXIT_VALIDATION, main

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def run_cli(*argv):
    return main(list(argv))


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli("--bogus-flag", "experiment", "--report", "x.json")
    assert exc.value.code == 2


def test_missing_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        run_cli()
    assert exc.value.code == 2


def test_simulate_writes_frames_and_truth(tmp_path):
    scen = tmp_path / "scen.json"
    scen.write_text(json.dumps({
        "pupil_path": [100.0, 80.0],
        "duration": 200,
        "noise_sigma": 2.0,
        "blink_intervals": [[66, 99]],
    }))
    out = tmp_path / "frames"
    assert run_cli("simulate", "--scenario", str(scen), "--out-dir", str(out)) == EXIT_OK
    pgms = sorted(p.name for p in out.glob("*.pgm"))
    assert "frame_0.pgm" in pgms and len(pgms) == 7
    lines = (out / "ground_truth.csv").read_text().splitlines()
    assert lines[0] == "timestamp,x,y,blink"
    assert any(",1" in l for l in lines[1:])  # the blink rows


def test_simulate_dump_mask(tmp_path):
    scen = tmp_path / "scen.json"
    scen.write_text(json.dumps({"pupil_path": [100.0, 80.0], "duration": 100}))
    out = tmp_path / "frames"
    assert run_cli("simulate", "--scenario", str(scen), "--out-dir", str(out),
                   "--dump-mask") == EXIT_OK
    masks = sorted(p.name for p in out.glob("mask_*.pgm"))
    assert "mask_0.pgm" in masks
    from eyeguide.simulator import read_pgm
    mask = read_pgm(str(out / "mask_0.pgm"))
    assert set(mask.ravel().tolist()) <= {0, 255}
    assert (mask == 255).sum() > 100  # the pupil disk


def test_experiment_logs_dir(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": {"trials_per_cell": 1, "max_trial_ms": 5000,
                       "distances_in": [12.0]}
    }))
    logs = tmp_path / "logs"
    report = tmp_path / "r.json"
    assert run_cli("--config", str(cfg), "--seed", "3", "experiment",
                   "--report", str(report), "--logs-dir", str(logs)) == EXIT_OK
    names = sorted(p.name for p in logs.iterdir())
    assert "12in_trial0_gaze.csv" in names
    assert "12in_trial0_clicks.csv" in names
    click_lines = (logs / "12in_trial0_clicks.csv").read_text().splitlines()
    assert click_lines[0] == "timestamp,target_id,x,y"
    assert len(click_lines) >= 2


def test_run_serves_and_exits(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"messenger": {"port": 0}}))
    assert run_cli("--config", str(cfg), "--seed", "4", "run", "--max-ms", "400") == EXIT_OK


def test_simulate_bad_scenario_exits_2(tmp_path):
    scen = tmp_path / "bad.json"
    scen.write_text(json.dumps({"pupil_level": 250, "sclera_level": 200}))
    assert run_cli("simulate", "--scenario", str(scen), "--out-dir", str(tmp_path / "o")) == EXIT_VALIDATION


def test_calibrate_persists_model(tmp_path):
    model = tmp_path / "model.json"
    report = tmp_path / "report.json"
    code = run_cli("--seed", "5", "calibrate", "--out", str(model), "--report", str(report))
    assert code == EXIT_OK
    doc = json.loads(model.read_text())
    assert doc["status"] == "passed"
    rep = json.loads(report.read_text())
    assert len(rep["targets"]) == 9


def test_calibrate_sabotage_exits_3(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "calibration": {"offset_px": 60.0, "offset_targets": 3, "pass_threshold_px": 2.0}
    }))
    report = tmp_path / "report.json"
    code = run_cli("--config", str(cfg), "--seed", "5", "calibrate", "--report", str(report))
    assert code == EXIT_CALIBRATION
    assert json.loads(report.read_text())["status"] == "failed"


def test_replay_reproduces_golden_click_log(tmp_path):
    out = tmp_path / "clicks.csv"
    code = run_cli(
        "replay",
        "--input", os.path.join(FIXTURES, "scanpath.csv"),
        "--targets", os.path.join(FIXTURES, "targets.json"),
        "--out", str(out),
    )
    assert code == EXIT_OK
    golden = open(os.path.join(FIXTURES, "golden_clicks.csv")).read()
    assert out.read_text() == golden


def test_replay_overlapping_targets_exits_2(tmp_path):
    bad = tmp_path / "targets.json"
    bad.write_text(json.dumps([
        {"id": "a", "rect": [0, 0, 100, 100]},
        {"id": "b", "rect": [50, 50, 100, 100]},
    ]))
    out = tmp_path / "clicks.csv"
    code = run_cli("replay", "--input", os.path.join(FIXTURES, "scanpath.csv"),
                   "--targets", str(bad), "--out", str(out))
    assert code == EXIT_VALIDATION


def test_replay_events_log(tmp_path):
    out = tmp_path / "clicks.csv"
    events = tmp_path / "gaze.csv"
    run_cli(
        "replay",
        "--input", os.path.join(FIXTURES, "scanpath.csv"),
        "--targets", os.path.join(FIXTURES, "targets.json"),
        "--out", str(out),
        "--events", str(events),
    )
    header = events.read_text().splitlines()[0]
    assert header == "timestamp,x,y,valid,event_kind"


def test_experiment_reports_byte_identical(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": {"trials_per_cell": 2, "max_trial_ms": 6000}
    }))
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    assert run_cli("--config", str(cfg), "--seed", "7", "experiment", "--report", str(r1)) == EXIT_OK
    assert run_cli("--config", str(cfg), "--seed", "7", "experiment", "--report", str(r2)) == EXIT_OK
    assert r1.read_bytes() == r2.read_bytes()


def test_entry_point_script():
    proc = subprocess.run(
        [sys.executable, "-m", "eyeguide.cli", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "experiment" in proc.stdout


def test_env_overrides(tmp_path, monkeypatch):
    from eyeguide.config import load_config

    monkeypatch.setenv("EYEGUIDE_PORT", "9123")
    monkeypatch.setenv("EYEGUIDE_SPEAKER_COMMAND", "say -v nice")
    monkeypatch.setenv("EYEGUIDE_SEED", "321")
    cfg = load_config()
    assert cfg["messenger"]["port"] == 9123
    assert cfg["messenger"]["speaker_command"] == ["say", "-v", "nice"]
    assert cfg["seed"] == 321


def test_config_file_merges_over_defaults(tmp_path):
    from eyeguide.config import load_config

    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"dwell": {"dwell_time": 640}}))
    cfg = load_config(str(path), env={})
    assert cfg["dwell"]["dwell_time"] == 640
    assert cfg["dwell"]["refractory"] == 500  # untouched default
