"""Dwell-to-click: sustained gaze over a target region emits one left click.

The machine is a pure transition function over explicit state; all timing
comes from sample timestamps, so any replay is fully deterministic.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .calibration import GazeSample
from .errors import LayoutError

IDLE = "idle"
HOVER = "hover"
REFRACTORY = "refractory"


@dataclass(frozen=True)
class DwellConfig:
    dwell_time: int = 1000  # ms of sustained hover before the click
    jitter_radius: float = 60.0  # px of tolerated spread around the rolling anchor
    refractory: int = 500  # ms after a click before the same target can rearm

    def __post_init__(self):
        if self.dwell_time <= 0:
            raise ValueError("dwell_time must be positive")
        if self.jitter_radius < 0:
            raise ValueError("jitter_radius must be non-negative")
        if self.refractory < 0:
            raise ValueError("refractory must be non-negative")


@dataclass(frozen=True)
class TargetRegion:
    id: str
    rect: tuple[float, float, float, float]  # x, y, w, h

    def contains(self, px: float, py: float) -> bool:
        x, y, w, h = self.rect
        return x <= px < x + w and y <= py < y + h


@dataclass(frozen=True)
class ClickEvent:
    target_id: str
    at: int  # ms
    gaze_anchor: tuple[float, float]


@dataclass(frozen=True)
class DwellState:
    phase: str = IDLE
    target_id: str | None = None
    entered_at: int | None = None
    anchor: tuple[float, float] | None = None
    sample_count: int = 0
    clicked_at: int | None = None


IDLE_STATE = DwellState()


def validate_layout(regions: Sequence[TargetRegion]):
    """Reject duplicate ids, empty rects and overlapping regions (install time)."""
    ids = [r.id for r in regions]
    if len(set(ids)) != len(ids):
        raise LayoutError("duplicate target region ids")
    for r in regions:
        _, _, w, h = r.rect
        if w <= 0 or h <= 0:
            raise LayoutError(f"region {r.id!r} has empty extent")
    for i, a in enumerate(regions):
        for b in regions[i + 1 :]:
            ax, ay, aw, ah = a.rect
            bx, by, bw, bh = b.rect
            if ax < bx + bw and bx < ax + aw and ay < by + bh and by < ay + ah:
                raise LayoutError(f"regions {a.id!r} and {b.id!r} overlap")


def region_at(layout: Sequence[TargetRegion], point: tuple[float, float]) -> TargetRegion | None:
    for r in layout:
        if r.contains(point[0], point[1]):
            return r
    return None


def _enter_hover(region: TargetRegion, sample: GazeSample) -> DwellState:
    return DwellState(
        phase=HOVER,
        target_id=region.id,
        entered_at=sample.timestamp,
        anchor=sample.screen,
        sample_count=1,
    )


def step(
    state: DwellState,
    sample: GazeSample,
    layout: Sequence[TargetRegion],
    cfg: DwellConfig,
) -> tuple[DwellState, ClickEvent | None]:
    """Advance the machine by one gaze sample.

    Held blink samples carry the last valid position and are processed like
    valid samples, so blinks do not break a hover. An invalid sample or any
    departure from the hovered region resets to idle (re-entering another
    region on the same sample starts its hover immediately).
    """
    if not sample.valid:
        return IDLE_STATE, None
    region = region_at(layout, sample.screen)

    if state.phase == HOVER and region is not None and region.id == state.target_id:
        dist = math.hypot(
            sample.screen[0] - state.anchor[0], sample.screen[1] - state.anchor[1]
        )
        if dist > cfg.jitter_radius:
            return _enter_hover(region, sample), None  # episode ends; a new one starts here
        n = state.sample_count + 1
        anchor = (
            state.anchor[0] + (sample.screen[0] - state.anchor[0]) / n,
            state.anchor[1] + (sample.screen[1] - state.anchor[1]) / n,
        )
        if sample.timestamp - state.entered_at >= cfg.dwell_time:
            click = ClickEvent(target_id=region.id, at=sample.timestamp, gaze_anchor=anchor)
            return (
                DwellState(phase=REFRACTORY, target_id=region.id, clicked_at=sample.timestamp),
                click,
            )
        return (
            DwellState(
                phase=HOVER,
                target_id=state.target_id,
                entered_at=state.entered_at,
                anchor=anchor,
                sample_count=n,
            ),
            None,
        )

    if state.phase == REFRACTORY and region is not None and region.id == state.target_id:
        if sample.timestamp - state.clicked_at >= cfg.refractory:
            return _enter_hover(region, sample), None
        return state, None

    # idle, or the sample left the previous target
    if region is not None:
        return _enter_hover(region, sample), None
    return IDLE_STATE, None


def replay(
    samples: Iterable[GazeSample],
    layout: Sequence[TargetRegion],
    cfg: DwellConfig,
    initial: DwellState = IDLE_STATE,
) -> tuple[list[ClickEvent], list[DwellState]]:
    """Run a whole sample stream; returns clicks and the state after each step."""
    state = initial
    clicks: list[ClickEvent] = []
    trace: list[DwellState] = []
    for s in samples:
        state, click = step(state, s, layout, cfg)
        if click is not None:
            clicks.append(click)
        trace.append(state)
    return clicks, trace


def write_click_csv(clicks: Iterable[ClickEvent], path: str):
    """Click log: timestamp,target_id,x,y."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["timestamp", "target_id", "x", "y"])
        for c in clicks:
            w.writerow([c.at, c.target_id, f"{c.gaze_anchor[0]:.3f}", f"{c.gaze_anchor[1]:.3f}"])
