"""Dark-pupil detection against the simulator's ground truth.

The detector thresholds the frame at a low intensity percentile, keeps the
largest compact dark component and reports a darkness-weighted centroid,
radius, circularity confidence and an occlusion flag.
"""

import math

from eyeguide.pupil import DetectorConfig, detect
from eyeguide.simulator import SimScenario, render_frame

cfg = DetectorConfig()

# Clean frame: sub-pixel agreement with ground truth.
sc = SimScenario(pupil_path=(100.0, 80.0))
obs = detect(render_frame(sc, 0)[0], cfg)
print(f"clean frame:   centre=({obs.centre[0]:.2f}, {obs.centre[1]:.2f})  "
      f"radius={obs.radius_estimate:.1f}  confidence={obs.confidence:.2f}")

# Noise barely moves the centroid.
for sigma in (2.0, 5.0):
    sc = SimScenario(pupil_path=(100.0, 80.0), noise_sigma=sigma, seed=9)
    obs = detect(render_frame(sc, 0)[0], cfg)
    err = math.hypot(obs.centre[0] - 100.0, obs.centre[1] - 80.0)
    print(f"noise s={sigma}:    error={err:.3f} px")

# The eyelid hides the top of the disk: the x estimate stays good while the
# y estimate drifts down, and the occlusion flag trips.
for coverage in (0.2, 0.4):
    sc = SimScenario(pupil_path=(100.0, 80.0), eyelid_coverage=coverage)
    obs = detect(render_frame(sc, 0)[0], cfg)
    print(f"eyelid {coverage:.0%}:    x err={abs(obs.centre[0] - 100):.2f}  "
          f"y err={abs(obs.centre[1] - 80):.2f}  occluded={obs.occluded}")

# Global illumination changes do not move the adaptive threshold's answer.
base = detect(render_frame(SimScenario(pupil_path=(140.0, 100.0)), 0)[0], cfg).centre
for offset in (-40, 40):
    sc = SimScenario(pupil_path=(140.0, 100.0), brightness_offset=float(offset))
    obs = detect(render_frame(sc, 0)[0], cfg)
    shift = math.hypot(obs.centre[0] - base[0], obs.centre[1] - base[1])
    print(f"brightness {offset:+d}: centre shift={shift:.3f} px")

# A closed eye produces no dark component at all.
blink = SimScenario(blink_intervals=[(0, 100)])
print(f"blink frame:   detection={detect(render_frame(blink, 50)[0], cfg)}")
