"""Dark-pupil detection: threshold, largest dark component, weighted centroid.

The eye image has strong contrast between bright sclera and dark pupil, so
the pupil is found as the largest compact dark connected component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .simulator import EyeFrame

FIXED = "fixed"
ADAPTIVE = "adaptive-percentile"

# 4-connectivity; diagonal contact does not join components
_STRUCTURE = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)

# bounding-box height more than 20% short of the disk diameter flags occlusion
OCCLUSION_HEIGHT_DEFICIT = 0.20


@dataclass(frozen=True)
class DetectorConfig:
    threshold_mode: str = ADAPTIVE
    fixed_threshold: float = 80.0
    percentile: float = 0.05  # adaptive mode: dark pixels sit below this quantile
    min_area: float = 20.0
    max_area: float = 8000.0
    circularity_floor: float = 0.3

    def __post_init__(self):
        if self.threshold_mode not in (FIXED, ADAPTIVE):
            raise ValueError(f"unknown threshold_mode {self.threshold_mode!r}")
        if not (0.0 < self.percentile <= 0.5):
            raise ValueError(f"percentile {self.percentile} outside (0, 0.5]")
        if not (0 < self.min_area < self.max_area):
            raise ValueError("need 0 < min_area < max_area")
        if not (0.0 <= self.circularity_floor <= 1.0):
            raise ValueError("circularity_floor outside [0, 1]")


@dataclass(frozen=True)
class PupilObservation:
    centre: tuple[float, float]
    radius_estimate: float
    confidence: float
    occluded: bool
    timestamp: int


def threshold_for(frame: EyeFrame, cfg: DetectorConfig) -> float:
    if cfg.threshold_mode == FIXED:
        return float(cfg.fixed_threshold)
    return float(np.quantile(frame.pixels, cfg.percentile))


def binarize(frame: EyeFrame, cfg: DetectorConfig) -> np.ndarray:
    """Boolean mask of dark (candidate pupil) pixels."""
    return frame.pixels < threshold_for(frame, cfg)


def _perimeter_estimate(component: np.ndarray) -> float:
    """Perimeter from 4-neighbour boundary edges, scaled so an ideal disk scores ~2*pi*r.

    The axis-aligned edge count of a convex raster shape is 2*(w+h) in outer
    pixel edges; measured between pixel centres that is 4 less, and for a
    circle it equals 8r, so the pi/4 factor calibrates disks to their true
    circumference (and their circularity to ~1).
    """
    m = np.pad(component, 1).astype(np.int8)
    edges = 0
    for shift in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        edges += int(np.sum((m - np.roll(m, shift, axis=(0, 1))) == 1))
    return max(0, edges - 4) * math.pi / 4.0


def _circularity(area: float, perimeter: float) -> float:
    if perimeter <= 0:
        return 0.0
    return min(1.0, 4.0 * math.pi * area / (perimeter * perimeter))


def detect(frame: EyeFrame, cfg: DetectorConfig) -> PupilObservation | None:
    """Locate the pupil in one frame; None when no component qualifies."""
    mask = binarize(frame, cfg)
    labels, n = ndimage.label(mask, structure=_STRUCTURE)
    if n == 0:
        return None
    areas = np.bincount(labels.ravel())
    areas[0] = 0
    order = np.argsort(areas)[::-1]
    for label in order:
        area = float(areas[label])
        if area < cfg.min_area:
            break  # sorted descending; nothing bigger remains
        if area > cfg.max_area:
            continue
        component = labels == label
        circ = _circularity(area, _perimeter_estimate(component))
        if circ < cfg.circularity_floor:
            continue
        ys, xs = np.nonzero(component)
        weights = 255.0 - frame.pixels[ys, xs].astype(float)
        wsum = float(weights.sum())
        if wsum <= 0:
            weights = np.ones_like(weights)
            wsum = float(weights.sum())
        cx = float((weights * xs).sum() / wsum)
        cy = float((weights * ys).sum() / wsum)
        radius = math.sqrt(area / math.pi)
        bbox_height = float(ys.max() - ys.min() + 1)
        occluded = (2.0 * radius - bbox_height) > OCCLUSION_HEIGHT_DEFICIT * 2.0 * radius
        return PupilObservation(
            centre=(cx, cy),
            radius_estimate=radius,
            confidence=circ,
            occluded=occluded,
            timestamp=frame.timestamp,
        )
    return None
