"""Pupil-to-screen calibration with a quality gate.

A second-order bivariate polynomial per screen axis is fit to the median
pupil position observed while the user fixates each target. Mapping is
refused until a fit passes the rms gate, and a failing fit asks for a rerun.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AbortedCalibrationError,
    CalibrationRequiredError,
    DegenerateGeometryError,
    InsufficientDataError,
)
from .pupil import PupilObservation

PASSED = "passed"
FAILED = "failed"

MIN_POINTS = 6
MIN_VALID_SAMPLES = 5
SETTLE_MS = 300  # discard samples this long after a target appears (saccade settling)

DEFAULT_PASS_THRESHOLD = 30.0  # screen px on the default 1024x768 screen
DEFAULT_CONFIDENCE_FLOOR = 0.25


@dataclass
class CalibrationPoint:
    target: tuple[float, float]
    samples: list = field(default_factory=list)  # PupilObservation | None per frame

    def valid_samples(self) -> list[PupilObservation]:
        return [s for s in self.samples if s is not None and not s.occluded]


@dataclass(frozen=True)
class GazeSample:
    screen: tuple[float, float]
    valid: bool
    timestamp: int
    out_of_bounds: bool = False
    held: bool = False


@dataclass
class CalibrationModel:
    coeffs_x: np.ndarray  # 6 coefficients: 1, px, py, px*py, px^2, py^2
    coeffs_y: np.ndarray
    rms_error: float
    status: str
    screen_size: tuple[int, int]
    pass_threshold: float
    per_target_residuals: list[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == PASSED


def design_row(px: float, py: float) -> list[float]:
    return [1.0, px, py, px * py, px * px, py * py]


def default_targets(screen_size: tuple[int, int]) -> list[tuple[float, float]]:
    """3x3 grid at 10%/50%/90% of the screen extent, row-major."""
    w, h = screen_size
    fracs = (0.1, 0.5, 0.9)
    return [(fx * w, fy * h) for fy in fracs for fx in fracs]


def median_pupil(point: CalibrationPoint) -> tuple[float, float]:
    valid = point.valid_samples()
    if len(valid) < MIN_VALID_SAMPLES:
        raise InsufficientDataError(
            f"target {point.target}: {len(valid)} valid samples, need >= {MIN_VALID_SAMPLES}"
        )
    xs = np.median([s.centre[0] for s in valid])
    ys = np.median([s.centre[1] for s in valid])
    return float(xs), float(ys)


def fit(
    points: Sequence[CalibrationPoint],
    pass_threshold: float = DEFAULT_PASS_THRESHOLD,
    screen_size: tuple[int, int] = (1024, 768),
) -> CalibrationModel:
    """Least-squares polynomial fit over the median pupil position per target."""
    targets = {tuple(p.target) for p in points}
    if len(targets) < MIN_POINTS:
        raise InsufficientDataError(
            f"{len(targets)} distinct calibration targets, need >= {MIN_POINTS}"
        )
    pupils = [median_pupil(p) for p in points]
    X = np.array([design_row(px, py) for px, py in pupils])
    tx = np.array([p.target[0] for p in points], dtype=float)
    ty = np.array([p.target[1] for p in points], dtype=float)
    coeffs_x, _, rank, _ = np.linalg.lstsq(X, tx, rcond=None)
    if rank < X.shape[1]:
        raise DegenerateGeometryError(
            f"design matrix rank {rank} < {X.shape[1]}; calibration targets are degenerate"
        )
    coeffs_y, _, _, _ = np.linalg.lstsq(X, ty, rcond=None)
    pred_x = X @ coeffs_x
    pred_y = X @ coeffs_y
    residuals = np.hypot(pred_x - tx, pred_y - ty)
    rms = float(np.sqrt(np.mean(residuals**2)))
    status = PASSED if rms <= pass_threshold else FAILED
    return CalibrationModel(
        coeffs_x=coeffs_x,
        coeffs_y=coeffs_y,
        rms_error=rms,
        status=status,
        screen_size=tuple(screen_size),
        pass_threshold=float(pass_threshold),
        per_target_residuals=[float(r) for r in residuals],
    )


def evaluate(model: CalibrationModel, pupil_xy: tuple[float, float]) -> tuple[float, float]:
    row = np.array(design_row(pupil_xy[0], pupil_xy[1]))
    return float(row @ model.coeffs_x), float(row @ model.coeffs_y)


def map_gaze(
    model: CalibrationModel,
    obs: PupilObservation | None,
    timestamp: int | None = None,
    confidence_floor: float = DEFAULT_CONFIDENCE_FLOOR,
) -> GazeSample:
    """Map one observation to a screen sample; requires a passing model.

    timestamp is only needed when obs is None (no pupil this frame).
    """
    if not model.passed:
        raise CalibrationRequiredError(
            f"calibration status is {model.status!r}; recalibrate before mapping gaze"
        )
    if obs is None:
        if timestamp is None:
            raise ValueError("timestamp required for a no-pupil observation")
        return GazeSample(screen=(0.0, 0.0), valid=False, timestamp=int(timestamp))
    x, y = evaluate(model, obs.centre)
    w, h = model.screen_size
    cx = min(max(x, 0.0), float(w - 1))
    cy = min(max(y, 0.0), float(h - 1))
    oob = (cx != x) or (cy != y)
    valid = not (obs.occluded and obs.confidence < confidence_floor)
    return GazeSample(
        screen=(cx, cy),
        valid=valid,
        timestamp=obs.timestamp,
        out_of_bounds=oob,
    )


def run_calibration(
    observations: Iterable[tuple[int, PupilObservation | None]],
    targets: Sequence[tuple[float, float]] | None = None,
    pass_threshold: float = DEFAULT_PASS_THRESHOLD,
    screen_size: tuple[int, int] = (1024, 768),
    per_target_ms: int = 1000,
    settle_ms: int = SETTLE_MS,
) -> CalibrationModel:
    """Sequence targets over a timestamped observation stream and fit.

    Target i owns the window [i*per_target_ms, (i+1)*per_target_ms); samples
    in the first settle_ms of each window are discarded. The stream must
    last into the collectible part of the final window or the session is
    aborted.
    """
    if targets is None:
        targets = default_targets(screen_size)
    points = [CalibrationPoint(target=tuple(t)) for t in targets]
    n = len(points)
    last_window_start = (n - 1) * per_target_ms
    max_ts = -1
    for ts, obs in observations:
        max_ts = max(max_ts, ts)
        if ts >= n * per_target_ms:
            continue
        i = ts // per_target_ms
        if ts - i * per_target_ms < settle_ms:
            continue
        points[i].samples.append(obs)
    if max_ts < last_window_start + settle_ms:
        raise AbortedCalibrationError(
            f"stream ended at {max_ts} ms, before the final target window became collectible"
        )
    return fit(points, pass_threshold=pass_threshold, screen_size=screen_size)


def calibration_report(model: CalibrationModel, targets: Sequence[tuple[float, float]]) -> dict:
    return {
        "status": model.status,
        "rms_error_px": model.rms_error,
        "pass_threshold_px": model.pass_threshold,
        "screen_size": list(model.screen_size),
        "targets": [
            {"target": list(t), "residual_px": r}
            for t, r in zip(targets, model.per_target_residuals)
        ],
    }


def save_model(model: CalibrationModel, path: str):
    doc = {
        "coeffs_x": [float(c) for c in model.coeffs_x],
        "coeffs_y": [float(c) for c in model.coeffs_y],
        "rms_error": model.rms_error,
        "status": model.status,
        "screen_size": list(model.screen_size),
        "pass_threshold": model.pass_threshold,
        "per_target_residuals": model.per_target_residuals,
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def load_model(path: str) -> CalibrationModel:
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    return CalibrationModel(
        coeffs_x=np.array(doc["coeffs_x"]),
        coeffs_y=np.array(doc["coeffs_y"]),
        rms_error=float(doc["rms_error"]),
        status=doc["status"],
        screen_size=tuple(doc["screen_size"]),
        pass_threshold=float(doc["pass_threshold"]),
        per_target_residuals=[float(r) for r in doc.get("per_target_residuals", [])],
    )


def identity_model(screen_size: tuple[int, int] = (1024, 768)) -> CalibrationModel:
    """Model mapping pupil coordinates straight to screen coordinates (for tests/replay)."""
    cx = np.array([0.0, 1.0, 0.0, 0.0, 0.0, 0.0])
    cy = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
    return CalibrationModel(
        coeffs_x=cx, coeffs_y=cy, rms_error=0.0, status=PASSED,
        screen_size=tuple(screen_size), pass_threshold=DEFAULT_PASS_THRESHOLD,
    )
