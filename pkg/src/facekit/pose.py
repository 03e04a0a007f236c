"""Head pose from 3D landmarks and the five-way pose bucketing."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

from .errors import CoincidentPoints
from .geometry import ALL_COMPONENTS, ComponentKind
from .landmarks import FacePointId as F, LandmarkSet

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 25.0


class PoseBucket(str, Enum):
    FRONTAL = "frontal"
    LEFT = "left"
    RIGHT = "right"
    UP = "up"
    DOWN = "down"

    def __str__(self):
        return self.value


ALL_BUCKETS = tuple(PoseBucket)

_AXIS = {"X": 0, "Y": 1, "Z": 2}


@dataclass(frozen=True)
class PoseAngles:
    pitch: float
    yaw: float
    roll: float

    def __post_init__(self):
        for name in ("pitch", "yaw", "roll"):
            v = getattr(self, name)
            if not (math.isfinite(v) and -90.0 <= v <= 90.0):
                raise ValueError(f"{name}={v} outside [-90, 90]")

    def as_dict(self, ndigits=None):
        d = {"pitch": self.pitch, "yaw": self.yaw, "roll": self.roll}
        if ndigits is not None:
            d = {k: round(v, ndigits) for k, v in d.items()}
        return d


def signed_axis_angle(p1, p2, axis="Z") -> float:
    """Signed elevation (degrees) of the line p1-p2 out of the plane normal to ``axis``.

    This is ``arcsin((a1 - a2) / |p1 - p2|)``, i.e. 90 degrees minus the
    angle between the line and the axis, with the sign taken from the
    ordered coordinate difference.
    """
    i = _AXIS[axis.upper()] if isinstance(axis, str) else int(axis)
    d = [a - b for a, b in zip(p1, p2)]
    norm = math.sqrt(sum(c * c for c in d))
    if norm == 0.0:
        raise CoincidentPoints(f"{tuple(p1)} == {tuple(p2)}")
    ratio = max(-1.0, min(1.0, d[i] / norm))
    return math.degrees(math.asin(ratio))


def _pair_angle(ls, a, b, axis):
    try:
        return signed_axis_angle(ls[a].xyz, ls[b].xyz, axis)
    except CoincidentPoints:
        raise CoincidentPoints(f"{a.value} and {b.value} coincide in 3D") from None


def estimate_pose(ls: LandmarkSet, flip_yaw=False, flip_pitch=False) -> PoseAngles:
    pitch = _pair_angle(ls, F.MIDDLE_FOREHEAD, F.BOTTOM_CHIN, "Z")
    roll = _pair_angle(ls, F.MIDDLE_FOREHEAD, F.BOTTOM_CHIN, "X")
    yaw = _pair_angle(ls, F.MID_RIGHT_CHEEK, F.MID_LEFT_CHEEK, "Z")
    if flip_yaw:
        yaw = -yaw
    if flip_pitch:
        pitch = -pitch
    return PoseAngles(pitch=pitch + 0.0, yaw=yaw + 0.0, roll=roll + 0.0)


def bucket_pose(angles: PoseAngles, threshold: float = DEFAULT_THRESHOLD) -> PoseBucket:
    # strict comparisons; yaw takes precedence over pitch
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if angles.yaw > threshold:
        return PoseBucket.RIGHT
    if angles.yaw < -threshold:
        return PoseBucket.LEFT
    if angles.pitch > threshold:
        return PoseBucket.UP
    if angles.pitch < -threshold:
        return PoseBucket.DOWN
    if abs(angles.roll) > threshold:
        log.warning("roll %.1f exceeds +/-%g; classified frontal (no roll partition)",
                    angles.roll, threshold)
    return PoseBucket.FRONTAL


_EXCLUDED = {
    PoseBucket.FRONTAL: None,
    PoseBucket.LEFT: ComponentKind.RIGHT_EYE,
    PoseBucket.RIGHT: ComponentKind.LEFT_EYE,
    PoseBucket.UP: ComponentKind.FOREHEAD_EYEBROW,
    PoseBucket.DOWN: ComponentKind.MOUTH_CHIN,
}


def active_components(bucket: PoseBucket) -> frozenset[ComponentKind]:
    dropped = _EXCLUDED[PoseBucket(bucket)]
    return frozenset(k for k in ALL_COMPONENTS if k is not dropped)
