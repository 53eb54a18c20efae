"""Exception types shared across the pipeline."""


class EyeGuideError(Exception):
    """Base class for pipeline errors."""


class ScenarioError(EyeGuideError, ValueError):
    """A simulation scenario violates its invariants."""


class InsufficientDataError(EyeGuideError):
    """Not enough points/samples/trials to compute a result."""


class DegenerateGeometryError(EyeGuideError):
    """Calibration targets are collinear or otherwise rank-deficient."""


class CalibrationRequiredError(EyeGuideError):
    """Gaze mapping was requested before a passing calibration exists."""


class AbortedCalibrationError(EyeGuideError):
    """The observation stream ended before the calibration sequence finished."""


class StreamOrderError(EyeGuideError):
    """Sample timestamps are not strictly increasing."""


class LayoutError(EyeGuideError, ValueError):
    """A screen layout violates its invariants (overlap, bounds, counts)."""


class UnknownTargetError(EyeGuideError, KeyError):
    """A click referenced a target id that is not in the layout."""
