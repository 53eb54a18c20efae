"""Synthetic eye-frame generator that stands in for the head-mounted camera.

Every frame carries a known ground-truth pupil position, so the whole
pipeline can be tested closed-loop without hardware.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Sequence, Union

import numpy as np

from .errors import ScenarioError

MIN_WIDTH = 32
MIN_HEIGHT = 24

# fixed (x, y) point | (t, x, y) waypoints | callable t -> (x, y)
PathSpec = Union[tuple, Sequence, Callable]


@dataclass(frozen=True)
class EyeFrame:
    """One grayscale eye image. pixels is a (height, width) uint8 array."""

    width: int
    height: int
    pixels: np.ndarray
    timestamp: int  # ms since stream start

    def __post_init__(self):
        if self.width < MIN_WIDTH or self.height < MIN_HEIGHT:
            raise ScenarioError(
                f"frame size {self.width}x{self.height} below minimum {MIN_WIDTH}x{MIN_HEIGHT}"
            )
        if self.pixels.shape != (self.height, self.width):
            raise ScenarioError(
                f"pixel buffer shape {self.pixels.shape} does not match {self.height}x{self.width}"
            )
        if self.pixels.dtype != np.uint8:
            raise ScenarioError("pixels must be uint8 grayscale")


@dataclass(frozen=True)
class GroundTruthEntry:
    """True pupil centre for one frame, or a blink marker (centre is None)."""

    timestamp: int
    centre: tuple[float, float] | None

    @property
    def blink(self) -> bool:
        return self.centre is None


@dataclass
class SimScenario:
    """Parameters of one synthetic eye recording.

    pupil_path may be a fixed (x, y) point, a list of (t_ms, x, y) waypoints
    (linearly interpolated, clamped at the ends), or a callable t_ms -> (x, y).
    tilt_deg rotates the trajectory about the frame centre, like a tilted
    camera. brightness_offset models a global illumination change and is
    added before noise.
    """

    width: int = 320
    height: int = 240
    frame_rate: float = 30.0
    duration: int = 1000  # ms
    pupil_path: PathSpec = (160.0, 120.0)
    pupil_radius: float = 12.0
    sclera_level: int = 200
    pupil_level: int = 30
    noise_sigma: float = 0.0
    eyelid_coverage: float = 0.0
    blink_intervals: list[tuple[int, int]] = field(default_factory=list)
    tilt_deg: float = 0.0
    brightness_offset: float = 0.0
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.width < MIN_WIDTH or self.height < MIN_HEIGHT:
            raise ScenarioError(
                f"scenario size {self.width}x{self.height} below minimum {MIN_WIDTH}x{MIN_HEIGHT}"
            )
        if not (0 <= self.pupil_level < self.sclera_level <= 255):
            raise ScenarioError(
                f"pupil_level {self.pupil_level} must be darker than sclera_level {self.sclera_level}"
            )
        if not (0.0 <= self.eyelid_coverage < 1.0):
            raise ScenarioError(f"eyelid_coverage {self.eyelid_coverage} outside [0, 1)")
        if self.duration < 0:
            raise ScenarioError("duration must be non-negative")
        if self.pupil_radius <= 0:
            raise ScenarioError("pupil_radius must be positive")
        if self.noise_sigma < 0:
            raise ScenarioError("noise_sigma must be non-negative")
        spans = sorted((int(a), int(b)) for a, b in self.blink_intervals)
        for a, b in spans:
            if a > b:
                raise ScenarioError(f"blink interval ({a}, {b}) reversed")
            if a < 0 or b > self.duration:
                raise ScenarioError(f"blink interval ({a}, {b}) outside scenario duration")
        for (_, b0), (a1, _) in zip(spans, spans[1:]):
            if a1 <= b0:
                raise ScenarioError("blink intervals overlap")

    def path_point(self, t: float) -> tuple[float, float]:
        """Trajectory point at time t, before any tilt is applied."""
        p = self.pupil_path
        if callable(p):
            x, y = p(t)
            return float(x), float(y)
        seq = list(p)
        if len(seq) == 2 and np.isscalar(seq[0]):
            return float(seq[0]), float(seq[1])
        pts = [(float(w[0]), float(w[1]), float(w[2])) for w in seq]
        pts.sort(key=lambda w: w[0])
        if t <= pts[0][0]:
            return pts[0][1], pts[0][2]
        if t >= pts[-1][0]:
            return pts[-1][1], pts[-1][2]
        for (t0, x0, y0), (t1, x1, y1) in zip(pts, pts[1:]):
            if t0 <= t <= t1:
                if t1 == t0:
                    return x1, y1
                a = (t - t0) / (t1 - t0)
                return x0 + a * (x1 - x0), y0 + a * (y1 - y0)
        return pts[-1][1], pts[-1][2]  # unreachable

    def true_centre(self, t: float) -> tuple[float, float]:
        """Ground-truth pupil centre: path point rotated by tilt_deg about the frame centre."""
        x, y = self.path_point(t)
        return rotate_about(
            (x, y), (self.width / 2.0, self.height / 2.0), self.tilt_deg
        )

    def is_blink(self, t: float) -> bool:
        return any(a <= t <= b for a, b in self.blink_intervals)

    def frame_count(self) -> int:
        if self.frame_rate <= 0:
            raise ScenarioError("frame_rate must be positive")
        return math.floor(self.duration * self.frame_rate / 1000.0) + 1

    def timestamps(self) -> list[int]:
        if self.frame_rate > 1000:
            raise ScenarioError("frame_rate above 1000 fps cannot keep ms timestamps strictly increasing")
        return [math.floor(k * 1000.0 / self.frame_rate) for k in range(self.frame_count())]


def rotate_about(point, centre, deg):
    """Rotate point about centre by deg (positive = x-axis toward y-axis, i.e. clockwise on screen)."""
    th = math.radians(deg)
    c, s = math.cos(th), math.sin(th)
    dx = point[0] - centre[0]
    dy = point[1] - centre[1]
    return (centre[0] + c * dx - s * dy, centre[1] + s * dx + c * dy)


def render_frame(scenario: SimScenario, t: int) -> tuple[EyeFrame, GroundTruthEntry]:
    """Render the frame at time t (ms) with its ground-truth entry.

    Deterministic in (scenario, scenario.seed, t): noise is drawn from a
    generator seeded per frame.
    """
    if not (0 <= t <= scenario.duration):
        raise ScenarioError(f"t={t} outside scenario duration [0, {scenario.duration}]")
    t = int(t)
    img = np.full((scenario.height, scenario.width), float(scenario.sclera_level))
    if scenario.is_blink(t):
        truth = GroundTruthEntry(timestamp=t, centre=None)
    else:
        cx, cy = scenario.true_centre(t)
        r = scenario.pupil_radius
        ys, xs = np.ogrid[: scenario.height, : scenario.width]
        disk = (xs - cx) ** 2 + (ys - cy) ** 2 <= r * r
        img[disk] = scenario.pupil_level
        if scenario.eyelid_coverage > 0:
            # eyelid: horizontal cut hiding the top fraction of the disk
            cut_y = cy - r + scenario.eyelid_coverage * 2.0 * r
            img[disk & (ys < cut_y)] = scenario.sclera_level
        truth = GroundTruthEntry(timestamp=t, centre=(cx, cy))
    img += scenario.brightness_offset
    if scenario.noise_sigma > 0:
        rng = np.random.default_rng([scenario.seed, t])
        img += rng.normal(0.0, scenario.noise_sigma, img.shape)
    pixels = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    return EyeFrame(scenario.width, scenario.height, pixels, t), truth


def play_scenario(scenario: SimScenario) -> Iterator[tuple[EyeFrame, GroundTruthEntry]]:
    """Yield floor(duration*fps/1000)+1 frames at uniform timestamps."""
    for t in scenario.timestamps():
        yield render_frame(scenario, t)


def with_seed(scenario: SimScenario, seed: int) -> SimScenario:
    return replace(scenario, seed=seed)


# --- PGM (binary P5) frame dumps ---------------------------------------


def frame_to_pgm(frame: EyeFrame) -> bytes:
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + frame.pixels.tobytes()


def write_pgm(frame: EyeFrame, directory: str) -> str:
    """Write one frame as frame_<timestamp>.pgm; returns the path."""
    path = os.path.join(directory, f"frame_{frame.timestamp}.pgm")
    with open(path, "wb") as f:
        f.write(frame_to_pgm(frame))
    return path


def read_pgm(path: str) -> np.ndarray:
    with open(path, "rb") as f:
        data = f.read()
    if not data.startswith(b"P5"):
        raise ValueError(f"{path} is not a binary PGM file")
    fields: list[bytes] = []
    i = 2
    while len(fields) < 3:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if data[i : i + 1] == b"#":  # comment line
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
            continue
        j = i
        while j < len(data) and not data[j : j + 1].isspace():
            j += 1
        fields.append(data[i:j])
        i = j
    i += 1  # single whitespace after maxval
    w, h, maxval = (int(x) for x in fields)
    if maxval != 255:
        raise ValueError("only maxval 255 PGM supported")
    return np.frombuffer(data[i : i + w * h], dtype=np.uint8).reshape(h, w)


# --- scenario (de)serialization -----------------------------------------

_SCENARIO_FIELDS = (
    "width", "height", "frame_rate", "duration", "pupil_radius",
    "sclera_level", "pupil_level", "noise_sigma", "eyelid_coverage",
    "tilt_deg", "brightness_offset", "seed",
)


def scenario_to_dict(scenario: SimScenario) -> dict:
    if callable(scenario.pupil_path):
        raise ScenarioError("a callable pupil_path cannot be serialized; use waypoints")
    d = {name: getattr(scenario, name) for name in _SCENARIO_FIELDS}
    path = list(scenario.pupil_path)
    if len(path) == 2 and np.isscalar(path[0]):
        d["pupil_path"] = [float(path[0]), float(path[1])]
    else:
        d["pupil_path"] = [[float(v) for v in w] for w in path]
    d["blink_intervals"] = [list(iv) for iv in scenario.blink_intervals]
    return d


def scenario_from_dict(d: dict) -> SimScenario:
    kwargs = {name: d[name] for name in _SCENARIO_FIELDS if name in d}
    if "pupil_path" in d:
        p = d["pupil_path"]
        if len(p) == 2 and np.isscalar(p[0]):
            kwargs["pupil_path"] = (float(p[0]), float(p[1]))
        else:
            kwargs["pupil_path"] = [tuple(float(v) for v in w) for w in p]
    if "blink_intervals" in d:
        kwargs["blink_intervals"] = [(int(a), int(b)) for a, b in d["blink_intervals"]]
    return SimScenario(**kwargs)


def load_scenario(path: str) -> SimScenario:
    with open(path, "r", encoding="utf-8") as f:
        return scenario_from_dict(json.load(f))


def save_scenario(scenario: SimScenario, path: str):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(scenario_to_dict(scenario), f, indent=2, sort_keys=True)
        f.write("\n")
