"""The distance and angle experiment series, end to end.

A simulated user calibrates and then reaches for randomly placed icons.
Farther screens shrink the icons and amplify control noise, so time to
click grows with distance; face tilt is absorbed by calibration, so
detection and clicking survive every angle.
"""

from eyeguide.dwell import DwellConfig
from eyeguide.filtering import FilterConfig
from eyeguide.harness import ExperimentConfig, build_report, run_angle_series, run_distance_series
from eyeguide.pupil import DetectorConfig

DET, FLT, DWL = DetectorConfig(), FilterConfig(), DwellConfig()

print("distance series (seed 7):")
cfg = ExperimentConfig(trials_per_cell=3)
distance = run_distance_series(cfg, DET, FLT, DWL, seed=7)
for r in distance:
    print(f"  {r.cell:>5}: trials {r.trial_times_s} -> average {r.average_s} s")

print("\nangle series (seed 7):")
acfg = ExperimentConfig(kind="angle-series", noise_sigma=5.0)
angle = run_angle_series(acfg, DET, FLT, DWL, seed=7)
for r in angle:
    print(f"  {r.cell:>5}: pupil={'Y' if r.pupil_detected else 'N'} "
          f"cursor={'Y' if r.cursor_ok else 'N'} average {r.average_s} s")

report = build_report("distance-series", 7, distance)
print("\nbenchmark averages from the original prototype evaluation:")
for cell, ref in report["reference"].items():
    print(f"  {cell:>5}: trials {ref['trials_s']} -> average {ref['average_s']} s")
print("\n(simulated times assert orderings and lower bounds, not the human values)")
