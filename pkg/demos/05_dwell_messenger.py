"""Dwell clicking into the messenger: templates, typing, speak and alarm.

Gaze held over a button for the dwell time produces exactly one click;
clicks drive the messenger reducer, whose speak events go to the configured
speaker sink (a recording null sink here).
"""

from eyeguide.calibration import GazeSample
from eyeguide.dwell import DwellConfig
from eyeguide.messenger import build_layout
from eyeguide.server import MessengerSession

session = MessengerSession(
    build_layout((1024, 768)),
    dwell_cfg=DwellConfig(dwell_time=600, jitter_radius=50.0, refractory=300),
)

t = 0


def dwell_on(target_id, ms):
    """Hold simulated gaze on a region's centre for ms milliseconds."""
    global t
    region = next(r for r in session.layout.all_regions() if r.id == target_id)
    cx = region.rect[0] + region.rect[2] / 2
    cy = region.rect[1] + region.rect[3] / 2
    for _ in range(ms // 33):
        session.on_gaze_sample(GazeSample(screen=(cx, cy), valid=True, timestamp=t))
        t += 33


# Speak a template, type a word, speak it, raise and clear the alarm.
dwell_on("template_0", 900)
for ch in "HI":
    dwell_on(f"key_{ch}", 900)
dwell_on("speak", 900)
dwell_on("alarm", 900)
dwell_on("alarm", 900)

print(f"clicks: {[c.target_id for c in session.clicks]}")
print(f"composed text: {session.state.composed_text!r}")
print(f"alarm active:  {session.state.alarm_active}")
print(f"spoken:        {[r.text for r in session.sink.records]}")
print(f"revision:      {session.state.revision}")
