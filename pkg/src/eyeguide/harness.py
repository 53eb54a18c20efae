"""Closed-loop experiment harness: simulator -> detector -> calibration ->
filtering -> dwell, driven by a simulated user.

Two series mirror the original prototype's evaluation: time-to-click over
screen distances (icons shrink and control noise grows with distance) and
robustness over face tilt angles. Human absolute times are not reproducible,
so reports carry the published benchmark values alongside the simulated
ones, and the assertions are orderings and lower bounds.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Callable, Sequence

import numpy as np

from . import calibration as calib
from .calibration import CalibrationModel, GazeSample, map_gaze, run_calibration
from .dwell import ClickEvent, DwellConfig, TargetRegion, replay, write_click_csv
from .errors import CalibrationRequiredError, InsufficientDataError
from .filtering import FilterConfig, detect_fixations, hold_through_blinks, smooth, write_gaze_csv
from .pupil import DetectorConfig, detect
from .simulator import SimScenario, play_scenario

DISTANCE_SERIES = "distance-series"
ANGLE_SERIES = "angle-series"

# Benchmark measurements from the original prototype evaluation (seconds).
REFERENCE_DISTANCE_TRIALS = {
    12: (1.5, 2.2, 1.07),
    24: (2.44, 1.98, 2.1),
    36: (3.13, 1.22, 2.28),
}
REFERENCE_ANGLE_TIMES = {30: 2.3, 45: 3.8, 90: 1.5}

DETECTION_RATE_FLOOR = 0.99


@dataclass(frozen=True)
class AgentConfig:
    """Simulated user: one main saccade after a reaction latency, Gaussian
    landing error, corrective saccades until comfortably inside the icon."""

    reaction_ms: int = 200
    landing_sigma_px: float = 12.0
    refine_factor: float = 0.5
    margin_px: float = 8.0


@dataclass
class ExperimentConfig:
    kind: str = DISTANCE_SERIES
    distances_in: tuple = (12.0, 24.0, 36.0)
    face_angles_deg: tuple = (30.0, 45.0, 90.0)
    trials_per_cell: int = 3
    icon_base_px: float = 120.0  # icon side at the 12 in reference distance
    gain_base: float = 9.0  # screen px per pupil px at 12 in
    angle_gain: float = 14.0  # gain used by the angle series (fixed distance)
    eye_frame_size: tuple = (160, 120)
    pupil_radius: float = 8.0
    frame_rate: float = 30.0
    noise_sigma: float = 3.0
    max_trial_ms: int = 15000
    agent: AgentConfig = field(default_factory=AgentConfig)
    screen_size: tuple = (1024, 768)

    def __post_init__(self):
        if self.kind not in (DISTANCE_SERIES, ANGLE_SERIES):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be >= 1")
        ds = list(self.distances_in)
        if any(d <= 0 for d in ds) or ds != sorted(ds):
            raise ValueError("distances must be positive and ascending")

    @classmethod
    def from_dict(cls, d: dict, screen_size=(1024, 768)) -> "ExperimentConfig":
        d = dict(d)
        agent = AgentConfig(**d.pop("agent", {}))
        d.pop("screen_size", None)
        for k in ("distances_in", "face_angles_deg", "eye_frame_size"):
            if k in d:
                d[k] = tuple(d[k])
        return cls(agent=agent, screen_size=tuple(screen_size), **d)


@dataclass
class TrialResult:
    cell: str
    parameter: float  # distance in inches or face angle in degrees
    trial_times_s: list
    average_s: float | None
    pupil_detected: bool
    cursor_ok: bool
    detection_rate: float

    def to_dict(self) -> dict:
        return {
            "cell": self.cell,
            "parameter": self.parameter,
            "trial_times_s": self.trial_times_s,
            "average_s": self.average_s,
            "pupil_detected": self.pupil_detected,
            "cursor_ok": self.cursor_ok,
            "detection_rate": round(self.detection_rate, 4),
        }


def average_trials(times: Sequence[float]) -> float:
    """Arithmetic mean rounded half-up to 2 decimals."""
    if not times:
        raise InsufficientDataError("no trial times to average")
    total = sum(Decimal(str(t)) for t in times)
    mean = total / Decimal(len(times))
    return float(mean.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def face_angle_to_tilt(angle_deg: float) -> float:
    """90 degrees denotes the untilted face; smaller angles tilt more."""
    return 90.0 - angle_deg


class Rig:
    """True pupil<->screen geometry of one simulated sitting.

    gain is screen px per pupil px; larger gain means the camera sees
    smaller pupil excursions for the same screen travel (farther screen).
    """

    def __init__(self, screen_size, eye_frame_size, gain: float):
        self.screen_size = screen_size
        self.eye_frame_size = eye_frame_size
        self.gain = float(gain)
        self.screen_centre = (screen_size[0] / 2.0, screen_size[1] / 2.0)
        self.eye_centre = (eye_frame_size[0] / 2.0, eye_frame_size[1] / 2.0)

    def pupil_for_screen(self, screen_xy) -> tuple[float, float]:
        return (
            self.eye_centre[0] + (screen_xy[0] - self.screen_centre[0]) / self.gain,
            self.eye_centre[1] + (screen_xy[1] - self.screen_centre[1]) / self.gain,
        )


def plan_gaze_track(
    rng: np.random.Generator,
    agent: AgentConfig,
    start: tuple[float, float],
    icon: TargetRegion,
    sigma_scale: float,
    horizon_ms: int,
) -> Callable[[float], tuple[float, float]]:
    """Precompute the agent's true gaze as a piecewise-constant function of time.

    The agent aims at the icon centre; each landing draws a fresh Gaussian
    error (shrinking by refine_factor per corrective saccade) and the agent
    keeps correcting until it sits margin_px inside the icon, then holds.
    """
    x, y, w, h = icon.rect
    centre = (x + w / 2.0, y + h / 2.0)
    m = min(agent.margin_px, w / 2.0 - 1.0, h / 2.0 - 1.0)
    jumps = [(0, start)]
    t = agent.reaction_ms
    sigma = agent.landing_sigma_px * sigma_scale
    while t <= horizon_ms:
        land = (
            centre[0] + float(rng.normal(0.0, sigma)),
            centre[1] + float(rng.normal(0.0, sigma)),
        )
        jumps.append((t, land))
        inside = (x + m <= land[0] <= x + w - m) and (y + m <= land[1] <= y + h - m)
        if inside:
            break
        sigma = max(1.0, sigma * agent.refine_factor)
        t += agent.reaction_ms

    def gaze_at(ts: float) -> tuple[float, float]:
        pos = jumps[0][1]
        for jt, p in jumps:
            if ts >= jt:
                pos = p
            else:
                break
        return pos

    return gaze_at


def pipeline_samples(
    scenario: SimScenario,
    model: CalibrationModel,
    detector_cfg: DetectorConfig,
    filter_cfg: FilterConfig,
    confidence_floor: float = calib.DEFAULT_CONFIDENCE_FLOOR,
) -> tuple[list[GazeSample], float]:
    """frames -> detect -> map -> smooth -> hold; returns samples and the
    fraction of non-blink frames with a detected pupil."""
    raw: list[GazeSample] = []
    detected = 0
    total = 0
    for frame, truth in play_scenario(scenario):
        obs = detect(frame, detector_cfg)
        if not truth.blink:
            total += 1
            if obs is not None:
                detected += 1
        raw.append(
            map_gaze(model, obs, timestamp=frame.timestamp, confidence_floor=confidence_floor)
        )
    held = hold_through_blinks(smooth(raw, filter_cfg), filter_cfg)
    rate = detected / total if total else 0.0
    return held, rate


def calibrate_rig(
    rig: Rig,
    scenario_proto: SimScenario,
    detector_cfg: DetectorConfig,
    pass_threshold: float,
    per_target_ms: int = 1000,
    fixation_offset: Callable[[int, tuple], tuple] | None = None,
) -> CalibrationModel:
    """Run the 9-target calibration sequence through the full loop.

    fixation_offset, when given, perturbs the simulated user's fixation for
    target index i (used to script failing calibrations).
    """
    targets = calib.default_targets(rig.screen_size)
    n = len(targets)

    def path(t: float) -> tuple[float, float]:
        i = min(int(t // per_target_ms), n - 1)
        point = targets[i]
        if fixation_offset is not None:
            point = fixation_offset(i, point)
        return rig.pupil_for_screen(point)

    scenario = SimScenario(
        width=scenario_proto.width,
        height=scenario_proto.height,
        frame_rate=scenario_proto.frame_rate,
        duration=n * per_target_ms,
        pupil_path=path,
        pupil_radius=scenario_proto.pupil_radius,
        sclera_level=scenario_proto.sclera_level,
        pupil_level=scenario_proto.pupil_level,
        noise_sigma=scenario_proto.noise_sigma,
        tilt_deg=scenario_proto.tilt_deg,
        seed=scenario_proto.seed,
    )

    def observations():
        for frame, _ in play_scenario(scenario):
            yield frame.timestamp, detect(frame, detector_cfg)

    return run_calibration(
        observations(),
        targets=targets,
        pass_threshold=pass_threshold,
        screen_size=rig.screen_size,
        per_target_ms=per_target_ms,
    )


def _derived_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


@dataclass
class TrialRecord:
    time_ms: int | None
    detection_rate: float
    samples: list
    clicks: list


def run_trial(
    cfg: ExperimentConfig,
    rig: Rig,
    model: CalibrationModel,
    icon: TargetRegion,
    tilt_deg: float,
    sigma_scale: float,
    detector_cfg: DetectorConfig,
    filter_cfg: FilterConfig,
    dwell_cfg: DwellConfig,
    rng: np.random.Generator,
    scenario_seed: int,
) -> TrialRecord:
    gaze_at = plan_gaze_track(
        rng, cfg.agent, rig.screen_centre, icon, sigma_scale, cfg.max_trial_ms
    )
    scenario = SimScenario(
        width=cfg.eye_frame_size[0],
        height=cfg.eye_frame_size[1],
        frame_rate=cfg.frame_rate,
        duration=cfg.max_trial_ms,
        pupil_path=lambda t: rig.pupil_for_screen(gaze_at(t)),
        pupil_radius=cfg.pupil_radius,
        noise_sigma=cfg.noise_sigma,
        tilt_deg=tilt_deg,
        seed=scenario_seed,
    )
    samples, rate = pipeline_samples(scenario, model, detector_cfg, filter_cfg)
    clicks, _ = replay(samples, [icon], dwell_cfg)
    time_ms = clicks[0].at if clicks else None
    return TrialRecord(time_ms=time_ms, detection_rate=rate, samples=samples, clicks=clicks)


def _place_icon(rng: np.random.Generator, screen_size, icon_px: float) -> TargetRegion:
    w, h = screen_size
    pad = 24.0
    x = float(rng.uniform(pad, w - icon_px - pad))
    y = float(rng.uniform(pad, h - icon_px - pad))
    return TargetRegion(id="icon", rect=(x, y, icon_px, icon_px))


def _run_cell(
    cfg: ExperimentConfig,
    cell_name: str,
    parameter: float,
    gain: float,
    icon_px: float,
    tilt_deg: float,
    sigma_scale: float,
    detector_cfg: DetectorConfig,
    filter_cfg: FilterConfig,
    dwell_cfg: DwellConfig,
    pass_threshold: float,
    seed: int,
    cell_index: int,
    log_dir: str | None = None,
) -> TrialResult:
    rig = Rig(cfg.screen_size, cfg.eye_frame_size, gain)
    proto = SimScenario(
        width=cfg.eye_frame_size[0],
        height=cfg.eye_frame_size[1],
        frame_rate=cfg.frame_rate,
        duration=1000,
        pupil_radius=cfg.pupil_radius,
        noise_sigma=cfg.noise_sigma,
        tilt_deg=tilt_deg,
        seed=_derived_seed(seed, cell_index, 10_000),
    )
    model = calibrate_rig(rig, proto, detector_cfg, pass_threshold)
    if not model.passed:
        raise CalibrationRequiredError(
            f"cell {cell_name}: calibration rms {model.rms_error:.2f} px failed the "
            f"{pass_threshold} px gate; series aborted"
        )
    times_s: list[float] = []
    rates: list[float] = []
    clicked = 0
    for trial in range(cfg.trials_per_cell):
        rng = np.random.default_rng([seed, cell_index, trial])
        icon = _place_icon(rng, cfg.screen_size, icon_px)
        rec = run_trial(
            cfg, rig, model, icon, tilt_deg, sigma_scale,
            detector_cfg, filter_cfg, dwell_cfg, rng,
            scenario_seed=_derived_seed(seed, cell_index, trial),
        )
        rates.append(rec.detection_rate)
        if rec.time_ms is not None:
            clicked += 1
            times_s.append(rec.time_ms / 1000.0)
        if log_dir is not None:
            base = os.path.join(log_dir, f"{cell_name}_trial{trial}")
            events = detect_fixations(rec.samples, filter_cfg)
            write_gaze_csv(rec.samples, events, base + "_gaze.csv")
            write_click_csv(rec.clicks, base + "_clicks.csv")
    detection_rate = float(min(rates)) if rates else 0.0
    return TrialResult(
        cell=cell_name,
        parameter=parameter,
        trial_times_s=[round(t, 3) for t in times_s],
        average_s=average_trials([round(t, 3) for t in times_s]) if times_s else None,
        pupil_detected=detection_rate >= DETECTION_RATE_FLOOR,
        cursor_ok=clicked == cfg.trials_per_cell,
        detection_rate=detection_rate,
    )


def run_distance_series(
    cfg: ExperimentConfig,
    detector_cfg: DetectorConfig,
    filter_cfg: FilterConfig,
    dwell_cfg: DwellConfig,
    pass_threshold: float = 30.0,
    seed: int = 0,
    log_dir: str | None = None,
) -> list[TrialResult]:
    """Icons shrink and control noise grows with distance; the simulated
    user's time to reach and click an icon is recorded per trial."""
    results = []
    for i, d in enumerate(cfg.distances_in):
        results.append(
            _run_cell(
                cfg,
                cell_name=f"{d:g}in",
                parameter=float(d),
                gain=cfg.gain_base * (d / 12.0),
                icon_px=cfg.icon_base_px * (12.0 / d),
                tilt_deg=0.0,
                sigma_scale=d / 12.0,
                detector_cfg=detector_cfg,
                filter_cfg=filter_cfg,
                dwell_cfg=dwell_cfg,
                pass_threshold=pass_threshold,
                seed=seed,
                cell_index=i,
                log_dir=log_dir,
            )
        )
    return results


def run_angle_series(
    cfg: ExperimentConfig,
    detector_cfg: DetectorConfig,
    filter_cfg: FilterConfig,
    dwell_cfg: DwellConfig,
    pass_threshold: float = 30.0,
    seed: int = 0,
    log_dir: str | None = None,
) -> list[TrialResult]:
    """Face tilt applied as frame rotation; pupil detection and cursor
    control must survive every angle (90 means no tilt)."""
    if not cfg.face_angles_deg:
        raise InsufficientDataError("no face angles configured")
    results = []
    for i, angle in enumerate(cfg.face_angles_deg):
        results.append(
            _run_cell(
                cfg,
                cell_name=f"{angle:g}deg",
                parameter=float(angle),
                gain=cfg.angle_gain,
                icon_px=cfg.icon_base_px,
                tilt_deg=face_angle_to_tilt(angle),
                sigma_scale=1.0,
                detector_cfg=detector_cfg,
                filter_cfg=filter_cfg,
                dwell_cfg=dwell_cfg,
                pass_threshold=pass_threshold,
                seed=seed,
                cell_index=100 + i,
                log_dir=log_dir,
            )
        )
    return results


def build_report(kind: str, seed: int, results: list[TrialResult]) -> dict:
    reference: dict = {}
    if kind == DISTANCE_SERIES:
        for d, trials in REFERENCE_DISTANCE_TRIALS.items():
            reference[f"{d}in"] = {
                "trials_s": list(trials),
                "average_s": average_trials(trials),
            }
    else:
        for a, t in REFERENCE_ANGLE_TIMES.items():
            reference[f"{a}deg"] = {"time_s": t, "pupil_detected": True, "cursor_ok": True}
    return {
        "kind": kind,
        "seed": seed,
        "cells": [r.to_dict() for r in results],
        "reference": reference,
    }


def run_experiment(
    cfg: ExperimentConfig,
    detector_cfg: DetectorConfig,
    filter_cfg: FilterConfig,
    dwell_cfg: DwellConfig,
    pass_threshold: float = 30.0,
    seed: int = 0,
    log_dir: str | None = None,
) -> dict:
    if log_dir is not None:
        os.makedirs(log_dir, exist_ok=True)
    series = run_distance_series if cfg.kind == DISTANCE_SERIES else run_angle_series
    results = series(
        cfg, detector_cfg, filter_cfg, dwell_cfg, pass_threshold, seed, log_dir=log_dir
    )
    return build_report(cfg.kind, seed, results)


def audit_clicks(
    samples: list[GazeSample],
    clicks: list[ClickEvent],
    regions: Sequence[TargetRegion],
    dwell_cfg: DwellConfig,
) -> bool:
    """Post-hoc conservation check: every click must be preceded by at least
    dwell_time of uninterrupted valid in-region samples for its target."""
    by_id = {r.id: r for r in regions}
    for click in clicks:
        region = by_id[click.target_id]
        run_start = None
        last_in = None
        for s in samples:
            if s.timestamp > click.at:
                break
            if s.valid and region.contains(*s.screen):
                if run_start is None:
                    run_start = s.timestamp
                last_in = s.timestamp
            else:
                run_start = None
                last_in = None
        if run_start is None or last_in != click.at or click.at - run_start < dwell_cfg.dwell_time:
            return False
    return True
