"""Camera-free gaze-interaction pipeline for assistive communication.

Synthetic eye frames with known ground truth feed a dark-pupil detector,
polynomial calibration, fixation filtering and dwell clicking, driving a
template/keyboard messenger with text-to-voice events and an alarm.
"""

__version__ = "0.1.0"

from .calibration import CalibrationModel, GazeSample, fit, map_gaze, run_calibration
from .dwell import ClickEvent, DwellConfig, TargetRegion, step
from .filtering import FilterConfig, GazeEvent, detect_fixations, hold_through_blinks, smooth
from .harness import ExperimentConfig, average_trials, run_angle_series, run_distance_series
from .messenger import MessengerLayout, MessengerState, apply_click, build_layout
from .pupil import DetectorConfig, PupilObservation, detect
from .simulator import EyeFrame, SimScenario, play_scenario, render_frame

__all__ = [
    "CalibrationModel", "GazeSample", "fit", "map_gaze", "run_calibration",
    "ClickEvent", "DwellConfig", "TargetRegion", "step",
    "FilterConfig", "GazeEvent", "detect_fixations", "hold_through_blinks", "smooth",
    "ExperimentConfig", "average_trials", "run_angle_series", "run_distance_series",
    "MessengerLayout", "MessengerState", "apply_click", "build_layout",
    "DetectorConfig", "PupilObservation", "detect",
    "EyeFrame", "SimScenario", "play_scenario", "render_frame",
]
