"""Global JSON configuration with per-module sections and env overrides.

Precedence: built-in defaults < config file < EYEGUIDE_* environment
variables (EYEGUIDE_PORT, EYEGUIDE_SPEAKER_COMMAND, EYEGUIDE_SEED).
"""

from __future__ import annotations

import copy
import json
import os
import shlex

from .dwell import DwellConfig
from .filtering import FilterConfig
from .pupil import DetectorConfig

DEFAULTS: dict = {
    "seed": 0,
    "screen_size": [1024, 768],
    "detector": {
        "threshold_mode": "adaptive-percentile",
        "fixed_threshold": 80.0,
        "percentile": 0.05,
        "min_area": 20.0,
        "max_area": 8000.0,
        "circularity_floor": 0.3,
    },
    "calibration": {
        "pass_threshold_px": 30.0,
        "per_target_ms": 1000,
        "settle_ms": 300,
        "confidence_floor": 0.25,
        # synthetic misbehaviour for gate testing: shift the simulated user's
        # fixation on the first N diagonal targets
        "offset_px": 0.0,
        "offset_targets": 0,
    },
    "filter": {
        "smooth_window": 5,
        "dispersion_threshold": 40.0,
        "min_fixation_duration": 150,
        "blink_hold": 300,
    },
    "dwell": {
        "dwell_time": 1000,
        "jitter_radius": 60.0,
        "refractory": 500,
    },
    "messenger": {
        "host": "127.0.0.1",
        "port": 8750,
        "templates_file": None,
        "speaker_command": None,
        "static_dir": None,
    },
    "experiment": {
        "kind": "distance-series",
        "distances_in": [12.0, 24.0, 36.0],
        "face_angles_deg": [30.0, 45.0, 90.0],
        "trials_per_cell": 3,
        "icon_base_px": 120.0,
        "gain_base": 9.0,
        "angle_gain": 14.0,
        "eye_frame_size": [160, 120],
        "pupil_radius": 8.0,
        "frame_rate": 30.0,
        "noise_sigma": 3.0,
        "max_trial_ms": 15000,
        "agent": {
            "reaction_ms": 200,
            "landing_sigma_px": 12.0,
            "refine_factor": 0.5,
            "margin_px": 8.0,
        },
    },
}


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path: str | None = None, env: dict | None = None) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        with open(path, "r", encoding="utf-8") as f:
            cfg = _deep_merge(cfg, json.load(f))
    env = os.environ if env is None else env
    if "EYEGUIDE_PORT" in env:
        cfg["messenger"]["port"] = int(env["EYEGUIDE_PORT"])
    if "EYEGUIDE_SPEAKER_COMMAND" in env:
        cmd = env["EYEGUIDE_SPEAKER_COMMAND"]
        cfg["messenger"]["speaker_command"] = shlex.split(cmd) if cmd else None
    if "EYEGUIDE_SEED" in env:
        cfg["seed"] = int(env["EYEGUIDE_SEED"])
    return cfg


def detector_config(cfg: dict) -> DetectorConfig:
    return DetectorConfig(**cfg["detector"])


def filter_config(cfg: dict) -> FilterConfig:
    return FilterConfig(**cfg["filter"])


def dwell_config(cfg: dict) -> DwellConfig:
    return DwellConfig(**cfg["dwell"])
