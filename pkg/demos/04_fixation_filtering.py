"""Denoising a gaze stream and extracting fixation/saccade/blink events.

A noisy scanpath visits three points; the moving median strips the noise,
short validity gaps are bridged as blinks, and dispersion-threshold
fixation detection turns the samples into an event stream.
"""

import os

import numpy as np

from eyeguide.calibration import GazeSample
from eyeguide.filtering import (
    FilterConfig,
    detect_fixations,
    hold_through_blinks,
    smooth,
    write_gaze_csv,
)

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

rng = np.random.default_rng(6)
cfg = FilterConfig()

stream = []
t = 0
for cx, cy, frames in ((200, 200, 25), (700, 300, 30), (350, 600, 25)):
    for _ in range(frames):
        stream.append(GazeSample(
            screen=(cx + float(rng.normal(0, 6)), cy + float(rng.normal(0, 6))),
            valid=True, timestamp=t,
        ))
        t += 33
    # a short blink between stops
    for _ in range(3):
        stream.append(GazeSample(screen=(0.0, 0.0), valid=False, timestamp=t))
        t += 33

smoothed = smooth(stream, cfg)
events = detect_fixations(smoothed, cfg)
held = hold_through_blinks(smoothed, cfg)

print(f"{len(stream)} samples -> {len(events)} events")
for ev in events:
    if ev.kind == "fixation":
        print(f"  fixation  {ev.start:5d}..{ev.end:5d} ms  "
              f"centroid ({ev.centroid[0]:.0f}, {ev.centroid[1]:.0f})")
    else:
        print(f"  {ev.kind:9s} {ev.start:5d}..{ev.end:5d} ms")

held_count = sum(1 for s in held if s.held)
print(f"\nblink holding kept the cursor alive through {held_count} invalid samples")

path = os.path.join(OUT, "gaze_events.csv")
write_gaze_csv(smoothed, events, path)
print(f"gaze/event log written to {path}")
