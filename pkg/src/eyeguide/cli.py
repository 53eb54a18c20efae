"""Command-line entry point wiring the whole pipeline.

Subcommands: simulate (render a scenario to PGM frames + ground-truth CSV),
calibrate (closed-loop calibration, persisted model), run (live loop with
the UI served over HTTP/WebSocket), replay (scanpath CSV through filter and
dwell), experiment (distance/angle series report).

Exit codes: 0 success, 2 validation errors, 3 calibration gate failure.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import dataclasses
import json
import logging
import os
import statistics
import sys
from collections import deque

import numpy as np

from . import calibration as calib
from .config import detector_config, dwell_config, filter_config, load_config
from .dwell import TargetRegion, replay, validate_layout, write_click_csv
from .errors import CalibrationRequiredError, EyeGuideError
from .filtering import (
    detect_fixations,
    hold_through_blinks,
    read_scanpath_csv,
    smooth,
    streaming_hold,
    write_gaze_csv,
)
from .harness import ExperimentConfig, Rig, calibrate_rig, run_experiment
from .messenger import SpeakSink, build_layout, load_templates
from .pupil import binarize, detect
from .server import MessengerSession, UiServer, drive_session
from .simulator import EyeFrame, SimScenario, load_scenario, play_scenario, write_pgm

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CALIBRATION = 3


def _write_json(doc: dict, path: str):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def cmd_simulate(args, cfg) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario.seed = args.seed
    os.makedirs(args.out_dir, exist_ok=True)
    dcfg = detector_config(cfg)
    truth_path = os.path.join(args.out_dir, "ground_truth.csv")
    n = 0
    with open(truth_path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["timestamp", "x", "y", "blink"])
        for frame, truth in play_scenario(scenario):
            write_pgm(frame, args.out_dir)
            if args.dump_mask:
                mask = binarize(frame, dcfg).astype(np.uint8) * 255
                mask_frame = EyeFrame(frame.width, frame.height, mask, frame.timestamp)
                path = write_pgm(mask_frame, args.out_dir)
                os.replace(path, os.path.join(args.out_dir, f"mask_{frame.timestamp}.pgm"))
            if truth.blink:
                w.writerow([truth.timestamp, "", "", 1])
            else:
                w.writerow([truth.timestamp, f"{truth.centre[0]:.3f}", f"{truth.centre[1]:.3f}", 0])
            n += 1
    print(f"wrote {n} frames and {truth_path}")
    return EXIT_OK


def _calibration_rig(cfg, seed: int) -> tuple[Rig, SimScenario]:
    exp = ExperimentConfig.from_dict(cfg["experiment"], screen_size=cfg["screen_size"])
    rig = Rig(tuple(cfg["screen_size"]), exp.eye_frame_size, exp.gain_base)
    proto = SimScenario(
        width=exp.eye_frame_size[0],
        height=exp.eye_frame_size[1],
        frame_rate=exp.frame_rate,
        duration=1000,
        pupil_radius=exp.pupil_radius,
        noise_sigma=exp.noise_sigma,
        seed=seed,
    )
    return rig, proto


def cmd_calibrate(args, cfg) -> int:
    seed = cfg["seed"] if args.seed is None else args.seed
    rig, proto = _calibration_rig(cfg, seed)
    ccfg = cfg["calibration"]
    offset_px = float(ccfg.get("offset_px", 0.0))
    offset_targets = int(ccfg.get("offset_targets", 0))

    fixation_offset = None
    if offset_px and offset_targets:
        # perturb diagonal targets first: the quadratic family cannot absorb them
        diagonal = (0, 4, 8, 2, 6, 1, 3, 5, 7)
        bad = set(diagonal[:offset_targets])

        def fixation_offset(i, point):
            if i in bad:
                return (point[0] + offset_px, point[1])
            return point

    model = calibrate_rig(
        rig, proto, detector_config(cfg),
        pass_threshold=float(ccfg["pass_threshold_px"]),
        per_target_ms=int(ccfg["per_target_ms"]),
        fixation_offset=fixation_offset,
    )
    if args.report:
        _write_json(calib.calibration_report(model, calib.default_targets(rig.screen_size)), args.report)
    print(f"calibration {model.status}: rms {model.rms_error:.3f} px "
          f"(gate {ccfg['pass_threshold_px']} px)")
    if not model.passed:
        return EXIT_CALIBRATION
    if args.out:
        calib.save_model(model, args.out)
        print(f"model saved to {args.out}")
    return EXIT_OK


def _demo_scenario(cfg, seed: int, duration: int) -> tuple[Rig, SimScenario]:
    """Wandering-gaze scenario for the live demo loop."""
    exp = ExperimentConfig.from_dict(cfg["experiment"], screen_size=cfg["screen_size"])
    rig = Rig(tuple(cfg["screen_size"]), exp.eye_frame_size, exp.gain_base)
    w, h = rig.screen_size
    rng = np.random.default_rng(seed)
    stops = [(w / 2, h / 2)]
    t_stops = [0.0]
    t = 0.0
    while t < duration:
        t += float(rng.uniform(800, 2500))
        stops.append((float(rng.uniform(0.1 * w, 0.9 * w)), float(rng.uniform(0.1 * h, 0.9 * h))))
        t_stops.append(t)

    def path(ts):
        i = 0
        while i + 1 < len(t_stops) and t_stops[i + 1] <= ts:
            i += 1
        return rig.pupil_for_screen(stops[i])

    scenario = SimScenario(
        width=exp.eye_frame_size[0],
        height=exp.eye_frame_size[1],
        frame_rate=exp.frame_rate,
        duration=duration,
        pupil_path=path,
        pupil_radius=exp.pupil_radius,
        noise_sigma=exp.noise_sigma,
        seed=seed,
    )
    return rig, scenario


def cmd_run(args, cfg) -> int:
    seed = cfg["seed"] if args.seed is None else args.seed
    mcfg = cfg["messenger"]
    templates = load_templates(mcfg.get("templates_file"))
    layout = build_layout(tuple(cfg["screen_size"]), templates)
    sink = SpeakSink(mcfg.get("speaker_command"))
    session = MessengerSession(layout, dwell_config(cfg), sink)

    if args.model:
        model = calib.load_model(args.model)
        if not model.passed:
            print("persisted model did not pass; recalibrate", file=sys.stderr)
            return EXIT_CALIBRATION
    else:
        rig, proto = _calibration_rig(cfg, seed)
        model = calibrate_rig(
            rig, proto, detector_config(cfg),
            pass_threshold=float(cfg["calibration"]["pass_threshold_px"]),
        )
        if not model.passed:
            print(f"calibration failed (rms {model.rms_error:.1f} px); not starting",
                  file=sys.stderr)
            return EXIT_CALIBRATION

    duration = args.max_ms if args.max_ms else 10 * 60 * 1000
    _, scenario = _demo_scenario(cfg, seed, duration)
    fcfg = filter_config(cfg)
    dcfg = detector_config(cfg)

    def gaze_samples():
        window: deque = deque(maxlen=fcfg.smooth_window)
        floor = float(cfg["calibration"]["confidence_floor"])
        for frame, _ in play_scenario(scenario):
            obs = detect(frame, dcfg)
            sample = calib.map_gaze(model, obs, timestamp=frame.timestamp,
                                    confidence_floor=floor)
            if sample.valid:
                window.append(sample.screen)
                mx = statistics.median(p[0] for p in window)
                my = statistics.median(p[1] for p in window)
                sample = dataclasses.replace(sample, screen=(mx, my))
            yield sample

    async def main():
        server = UiServer(session, host=mcfg["host"], port=int(mcfg["port"]),
                          static_dir=mcfg.get("static_dir"))
        port = await server.start()
        print(f"serving UI on http://{mcfg['host']}:{port} (WebSocket /ws)")
        try:
            await drive_session(
                server, streaming_hold(gaze_samples(), fcfg), realtime=not args.max_ms
            )
        finally:
            await server.stop()

    asyncio.run(main())
    return EXIT_OK


def _load_targets(path: str) -> list[TargetRegion]:
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    regions = [TargetRegion(id=r["id"], rect=tuple(float(v) for v in r["rect"])) for r in doc]
    validate_layout(regions)
    return regions


def cmd_replay(args, cfg) -> int:
    samples = read_scanpath_csv(args.input)
    regions = _load_targets(args.targets)
    fcfg = filter_config(cfg)
    processed = hold_through_blinks(smooth(samples, fcfg), fcfg)
    clicks, _ = replay(processed, regions, dwell_config(cfg))
    write_click_csv(clicks, args.out)
    if args.events:
        events = detect_fixations(smooth(samples, fcfg), fcfg)
        write_gaze_csv(processed, events, args.events)
    print(f"{len(clicks)} clicks -> {args.out}")
    return EXIT_OK


def cmd_experiment(args, cfg) -> int:
    seed = cfg["seed"] if args.seed is None else args.seed
    exp = ExperimentConfig.from_dict(cfg["experiment"], screen_size=cfg["screen_size"])
    report = run_experiment(
        exp,
        detector_config(cfg),
        filter_config(cfg),
        dwell_config(cfg),
        pass_threshold=float(cfg["calibration"]["pass_threshold_px"]),
        seed=seed,
        log_dir=args.logs_dir,
    )
    _write_json(report, args.report)
    print(f"report -> {args.report}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eyeguide",
        description="Camera-free gaze interaction pipeline and experiment harness",
    )
    parser.add_argument("--config", help="global JSON config file")
    parser.add_argument("--seed", type=int, help="override the configured seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="render a scenario to PGM frames + ground truth CSV")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--dump-mask", action="store_true",
                   help="also dump the detector's binarized mask per frame (debug)")

    p = sub.add_parser("calibrate", help="run the calibration sequence and persist the model")
    p.add_argument("--out", help="write the fitted model JSON here")
    p.add_argument("--report", help="write the per-target residual report here")

    p = sub.add_parser("run", help="live loop serving the messenger UI")
    p.add_argument("--model", help="reuse a persisted calibration model")
    p.add_argument("--max-ms", type=int, default=0,
                   help="stop after this much scenario time (0 = keep running)")

    p = sub.add_parser("replay", help="drive filter+dwell from a scanpath CSV")
    p.add_argument("--input", required=True, help="CSV with timestamp,x,y,valid")
    p.add_argument("--targets", required=True, help="JSON list of {id, rect}")
    p.add_argument("--out", required=True, help="click log CSV")
    p.add_argument("--events", help="also write the gaze/event CSV here")

    p = sub.add_parser("experiment", help="run the distance/angle series and write the report")
    p.add_argument("--report", required=True)
    p.add_argument("--logs-dir", help="also write per-trial gaze/click CSV logs here")

    return parser


COMMANDS = {
    "simulate": cmd_simulate,
    "calibrate": cmd_calibrate,
    "run": cmd_run,
    "replay": cmd_replay,
    "experiment": cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except CalibrationRequiredError as exc:
        print(f"calibration gate: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except (EyeGuideError, FileNotFoundError, KeyError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
