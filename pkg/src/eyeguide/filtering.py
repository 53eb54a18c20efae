"""Gaze-stream denoising and fixation/saccade/blink event detection.

Raw mapped gaze is noisy; a moving median plus dispersion-threshold (I-DT)
fixation detection turns it into a stable event stream. Short signal losses
are treated as blinks and bridged so they do not break interaction state.
"""

from __future__ import annotations

import csv
import statistics
from collections import deque
from dataclasses import dataclass, replace

from .calibration import GazeSample
from .errors import StreamOrderError

FIXATION = "fixation"
SACCADE = "saccade"
BLINK = "blink"
SIGNAL_LOST = "signal_lost"


@dataclass(frozen=True)
class FilterConfig:
    smooth_window: int = 5  # samples, odd
    dispersion_threshold: float = 40.0  # px, (max_x-min_x)+(max_y-min_y)
    min_fixation_duration: int = 150  # ms
    blink_hold: int = 300  # ms

    def __post_init__(self):
        if self.smooth_window < 1 or self.smooth_window % 2 == 0:
            raise ValueError("smooth_window must be odd and >= 1")
        if self.dispersion_threshold <= 0:
            raise ValueError("dispersion_threshold must be positive")
        if self.min_fixation_duration <= 0:
            raise ValueError("min_fixation_duration must be positive")
        if self.blink_hold < 0:
            raise ValueError("blink_hold must be non-negative")


@dataclass(frozen=True)
class GazeEvent:
    kind: str
    start: int
    end: int
    centroid: tuple[float, float] | None = None  # fixation only


def smooth(samples: list[GazeSample], cfg: FilterConfig) -> list[GazeSample]:
    """Per-axis moving median over the last smooth_window valid samples.

    Invalid samples pass through untouched and do not enter the window.
    Timestamps are preserved.
    """
    out: list[GazeSample] = []
    window: deque[tuple[float, float]] = deque(maxlen=cfg.smooth_window)
    for s in samples:
        if not s.valid:
            out.append(s)
            continue
        window.append(s.screen)
        mx = statistics.median(p[0] for p in window)
        my = statistics.median(p[1] for p in window)
        out.append(replace(s, screen=(mx, my)))
    return out


def _invalid_runs(samples: list[GazeSample]) -> list[tuple[int, int]]:
    """Maximal runs of invalid samples, as (first_index, last_index)."""
    runs = []
    start = None
    for i, s in enumerate(samples):
        if not s.valid:
            if start is None:
                start = i
        elif start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(samples) - 1))
    return runs


def hold_through_blinks(samples: list[GazeSample], cfg: FilterConfig) -> list[GazeSample]:
    """Replace short invalid runs with the last valid position, flagged held.

    A run counts as short when the validity gap (next valid timestamp minus
    previous valid timestamp; stream end for trailing runs) is below
    blink_hold. A leading run has nothing to hold and stays invalid.
    """
    out = list(samples)
    for a, b in _invalid_runs(samples):
        if a == 0:
            continue
        prev = samples[a - 1]
        end_ts = samples[b + 1].timestamp if b + 1 < len(samples) else samples[-1].timestamp
        if end_ts - prev.timestamp >= cfg.blink_hold:
            continue
        for i in range(a, b + 1):
            out[i] = GazeSample(
                screen=prev.screen,
                valid=True,
                timestamp=samples[i].timestamp,
                out_of_bounds=prev.out_of_bounds,
                held=True,
            )
    return out


def streaming_hold(samples, cfg: FilterConfig):
    """Online variant of hold_through_blinks for live loops (no lookahead):
    an invalid sample is held while the time since the last valid sample is
    below blink_hold, then passes through invalid."""
    last_valid: GazeSample | None = None
    for s in samples:
        if s.valid:
            last_valid = s
            yield s
        elif last_valid is not None and s.timestamp - last_valid.timestamp < cfg.blink_hold:
            yield GazeSample(
                screen=last_valid.screen,
                valid=True,
                timestamp=s.timestamp,
                out_of_bounds=last_valid.out_of_bounds,
                held=True,
            )
        else:
            yield s


def _idt_windows(span: list[GazeSample], cfg: FilterConfig) -> list[tuple[int, int]]:
    """Eager I-DT: from each start, grow while dispersion stays inside the
    threshold; keep the window as a fixation when it lasts long enough."""
    wins = []
    n = len(span)
    i = 0
    while i < n:
        x, y = span[i].screen
        minx = maxx = x
        miny = maxy = y
        j = i
        while j + 1 < n:
            nx, ny = span[j + 1].screen
            lo_x, hi_x = min(minx, nx), max(maxx, nx)
            lo_y, hi_y = min(miny, ny), max(maxy, ny)
            if (hi_x - lo_x) + (hi_y - lo_y) > cfg.dispersion_threshold:
                break
            minx, maxx, miny, maxy = lo_x, hi_x, lo_y, hi_y
            j += 1
        if span[j].timestamp - span[i].timestamp >= cfg.min_fixation_duration:
            wins.append((i, j))
            i = j + 1
        else:
            i += 1
    return wins


def _span_events(span: list[GazeSample], cfg: FilterConfig) -> list[GazeEvent]:
    """Fixation and saccade events for one gap-free run of valid samples.

    Saccade intervals extend to the boundaries of neighbouring fixations, so
    consecutive fixations are always separated and every event has positive
    duration. The only exception is a single stray sample with no fixation
    on either side, which supports no event and is skipped.
    """
    wins = _idt_windows(span, cfg)
    events: list[GazeEvent] = []

    def fixation_event(a, b):
        xs = [s.screen[0] for s in span[a : b + 1]]
        ys = [s.screen[1] for s in span[a : b + 1]]
        return GazeEvent(
            kind=FIXATION,
            start=span[a].timestamp,
            end=span[b].timestamp,
            centroid=(sum(xs) / len(xs), sum(ys) / len(ys)),
        )

    def saccade_event(first_idx, last_idx, left_win, right_win):
        start = span[left_win[1]].timestamp if left_win else span[first_idx].timestamp
        end = span[right_win[0]].timestamp if right_win else span[last_idx].timestamp
        if start >= end:
            return None
        return GazeEvent(kind=SACCADE, start=start, end=end)

    prev_win = None
    for win in wins:
        gap_first, gap_last = (prev_win[1] + 1 if prev_win else 0), win[0] - 1
        if gap_first <= gap_last or prev_win is not None:
            ev = saccade_event(gap_first, gap_last, prev_win, win)
            if ev is not None:
                events.append(ev)
        events.append(fixation_event(*win))
        prev_win = win
    tail_first = prev_win[1] + 1 if prev_win else 0
    if tail_first < len(span):
        ev = saccade_event(tail_first, len(span) - 1, prev_win, None)
        if ev is not None:
            events.append(ev)
    return events


def detect_fixations(samples: list[GazeSample], cfg: FilterConfig) -> list[GazeEvent]:
    """Classify a smoothed gaze stream into fixation/saccade/blink/signal_lost events.

    Blink gaps (validity gaps shorter than blink_hold) are reported but do
    not interrupt fixation detection; signal_lost gaps split it. Blink
    events may lie inside a fixation's interval; fixations, saccades and
    signal_lost events partition the valid timeline.
    """
    for a, b in zip(samples, samples[1:]):
        if b.timestamp <= a.timestamp:
            raise StreamOrderError(
                f"timestamps not strictly increasing at {a.timestamp} -> {b.timestamp}"
            )
    events: list[GazeEvent] = []
    splits: set[int] = set()  # indices of the valid sample that follows a signal_lost gap
    for a, b in _invalid_runs(samples):
        span_start = samples[a - 1].timestamp if a > 0 else samples[a].timestamp
        span_end = samples[b + 1].timestamp if b + 1 < len(samples) else samples[b].timestamp
        if span_end <= span_start:
            continue  # degenerate (single-sample stream); nothing to report
        kind = BLINK if span_end - span_start < cfg.blink_hold else SIGNAL_LOST
        events.append(GazeEvent(kind=kind, start=span_start, end=span_end))
        if kind == SIGNAL_LOST and b + 1 < len(samples):
            splits.add(b + 1)

    valid_indices = [i for i, s in enumerate(samples) if s.valid]
    span: list[GazeSample] = []
    for i in valid_indices:
        if i in splits and span:
            events.extend(_span_events(span, cfg))
            span = []
        span.append(samples[i])
    if span:
        events.extend(_span_events(span, cfg))

    events.sort(key=lambda e: (e.start, e.end))
    return events


def event_kind_at(events: list[GazeEvent], sample: GazeSample) -> str:
    """Kind of the event covering a sample, for logs (fixations take precedence)."""
    ts = sample.timestamp
    order = {FIXATION: 0, SACCADE: 1, BLINK: 2, SIGNAL_LOST: 3}
    covering = [e for e in events if e.start <= ts <= e.end]
    if sample.valid:
        covering = [e for e in covering if e.kind in (FIXATION, SACCADE)]
    else:
        covering = [e for e in covering if e.kind in (BLINK, SIGNAL_LOST)]
    if not covering:
        return ""
    return min(covering, key=lambda e: order[e.kind]).kind


def write_gaze_csv(samples: list[GazeSample], events: list[GazeEvent], path: str):
    """Offline log: timestamp,x,y,valid,event_kind."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["timestamp", "x", "y", "valid", "event_kind"])
        for s in samples:
            w.writerow([
                s.timestamp,
                f"{s.screen[0]:.3f}",
                f"{s.screen[1]:.3f}",
                int(s.valid),
                event_kind_at(events, s),
            ])


def read_scanpath_csv(path: str) -> list[GazeSample]:
    """Read timestamp,x,y,valid rows (extra columns ignored) into gaze samples."""
    out = []
    with open(path, "r", newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            out.append(
                GazeSample(
                    screen=(float(row["x"]), float(row["y"])),
                    valid=bool(int(row["valid"])),
                    timestamp=int(row["timestamp"]),
                )
            )
    return out
