"""The 21 facial feature points and their JSON file format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Mapping

from .errors import (
    DuplicatePoint,
    IoFailure,
    MalformedJson,
    MissingPoint,
    OutOfRange,
    UnknownPoint,
)


class FacePointId(str, Enum):
    """Feature points in the conventional table order (1-based ``number``)."""

    MID_TOP_LEFT_EYEBROW = "mid_top_left_eyebrow"
    UNDER_MID_BOTTOM_LEFT_EYELID = "under_mid_bottom_left_eyelid"
    RIGHT_OF_LEFT_EYEBROW = "right_of_left_eyebrow"
    LEFT_OF_LEFT_EYEBROW = "left_of_left_eyebrow"
    MID_TOP_RIGHT_EYEBROW = "mid_top_right_eyebrow"
    UNDER_MID_BOTTOM_RIGHT_EYELID = "under_mid_bottom_right_eyelid"
    RIGHT_OF_RIGHT_EYEBROW = "right_of_right_eyebrow"
    LEFT_OF_RIGHT_EYEBROW = "left_of_right_eyebrow"
    NOSE_TIP = "nose_tip"
    MIDPOINT_BETWEEN_EYEBROWS = "midpoint_between_eyebrows"
    LEFT_CORNER_MOUTH = "left_corner_mouth"
    RIGHT_CORNER_MOUTH = "right_corner_mouth"
    OUTSIDE_LEFT_CORNER_MOUTH = "outside_left_corner_mouth"
    OUTSIDE_RIGHT_CORNER_MOUTH = "outside_right_corner_mouth"
    TOP_DIP_UPPER_LIP = "top_dip_upper_lip"
    BOTTOM_CHIN = "bottom_chin"
    TOP_SKULL = "top_skull"
    TOP_RIGHT_FOREHEAD = "top_right_forehead"
    MIDDLE_FOREHEAD = "middle_forehead"
    MID_RIGHT_CHEEK = "mid_right_cheek"
    MID_LEFT_CHEEK = "mid_left_cheek"

    @property
    def number(self) -> int:
        return _ORDER[self] + 1

    def __str__(self):
        return self.value


_ORDER = {p: i for i, p in enumerate(FacePointId)}
POINT_NAMES = tuple(p.value for p in FacePointId)


@dataclass(frozen=True)
class Landmark:
    px: float
    py: float
    x: float
    y: float
    z: float

    @property
    def pixel(self):
        return (self.px, self.py)

    @property
    def xyz(self):
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class LandmarkSet:
    image_ref: str
    width: int
    height: int
    points: Mapping[FacePointId, Landmark]

    def __post_init__(self):
        object.__setattr__(self, "points", MappingProxyType(dict(self.points)))

    def __getitem__(self, pid) -> Landmark:
        return self.points[FacePointId(pid)]

    def __eq__(self, other):
        if not isinstance(other, LandmarkSet):
            return NotImplemented
        return (self.image_ref, self.width, self.height, dict(self.points)) == (
            other.image_ref, other.width, other.height, dict(other.points))

    def __hash__(self):
        return hash((self.image_ref, self.width, self.height))

    def replace_points(self, **changes: Landmark) -> "LandmarkSet":
        pts = dict(self.points)
        for name, lm in changes.items():
            pts[FacePointId(name)] = lm
        return LandmarkSet(self.image_ref, self.width, self.height, pts)


@dataclass(frozen=True)
class Violation:
    point: str
    rule: str

    def __str__(self):
        return f"{self.point}: {self.rule}"


def validate(ls: LandmarkSet) -> list[Violation]:
    """Check every landmark invariant; an empty list means the set is valid."""
    out = []
    if not (isinstance(ls.width, int) and ls.width > 0):
        out.append(Violation("<image>", "width > 0"))
    if not (isinstance(ls.height, int) and ls.height > 0):
        out.append(Violation("<image>", "height > 0"))
    for pid in FacePointId:
        lm = ls.points.get(pid)
        if lm is None:
            out.append(Violation(pid.value, "present"))
            continue
        vals = (lm.px, lm.py, lm.x, lm.y, lm.z)
        if not all(math.isfinite(v) for v in vals):
            out.append(Violation(pid.value, "finite"))
            continue
        if lm.px < 0:
            out.append(Violation(pid.value, "px >= 0"))
        if lm.px >= ls.width:
            out.append(Violation(pid.value, "px < width"))
        if lm.py < 0:
            out.append(Violation(pid.value, "py >= 0"))
        if lm.py >= ls.height:
            out.append(Violation(pid.value, "py < height"))
        if lm.z <= 0:
            out.append(Violation(pid.value, "z > 0"))
    return out


def _reject_duplicates(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise DuplicatePoint(k)
        seen[k] = v
    return seen


def _number(obj, key, where):
    v = obj.get(key) if isinstance(obj, dict) else None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise MalformedJson(f"{where}.{key} must be a number")
    return float(v)


def parse_landmark_file(data: bytes | str) -> LandmarkSet:
    """Parse a landmark JSON document and enforce all invariants.

    Raises the specific error for the first problem found: ``MalformedJson``
    for syntax or schema problems, ``UnknownPoint``/``MissingPoint``/
    ``DuplicatePoint`` for naming problems and ``OutOfRange`` for bad
    coordinates.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedJson(f"not UTF-8: {exc}") from None
    try:
        # duplicate keys only matter inside "points"; top-level duplicates
        # are reported the same way, which is harmless
        doc = json.loads(data, object_pairs_hook=_reject_duplicates)
    except DuplicatePoint:
        raise
    except json.JSONDecodeError as exc:
        raise MalformedJson(str(exc)) from None

    if not isinstance(doc, dict):
        raise MalformedJson("top level must be an object")
    image = doc.get("image")
    if not isinstance(image, str):
        raise MalformedJson("'image' must be a string")
    width, height = doc.get("width"), doc.get("height")
    for key, v in (("width", width), ("height", height)):
        if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
            raise MalformedJson(f"'{key}' must be a positive integer")
    raw = doc.get("points")
    if not isinstance(raw, dict):
        raise MalformedJson("'points' must be an object")

    for name in raw:
        if name not in POINT_NAMES:
            raise UnknownPoint(name)
    points = {}
    for pid in FacePointId:
        if pid.value not in raw:
            raise MissingPoint(pid.value)
        entry = raw[pid.value]
        where = f"points.{pid.value}"
        if not isinstance(entry, dict):
            raise MalformedJson(f"{where} must be an object")
        points[pid] = Landmark(*(_number(entry, k, where) for k in ("px", "py", "x", "y", "z")))

    ls = LandmarkSet(image, width, height, points)
    problems = validate(ls)
    if problems:
        raise OutOfRange(problems[0].point, problems[0].rule)
    return ls


def to_dict(ls: LandmarkSet) -> dict:
    return {
        "image": ls.image_ref,
        "width": ls.width,
        "height": ls.height,
        "points": {
            pid.value: {"px": lm.px, "py": lm.py, "x": lm.x, "y": lm.y, "z": lm.z}
            for pid, lm in ((p, ls.points[p]) for p in FacePointId)
        },
    }


def serialize(ls: LandmarkSet) -> bytes:
    return json.dumps(to_dict(ls), indent=2).encode("utf-8")


def load_landmarks(path) -> LandmarkSet:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read landmarks {path}: {exc.strerror}") from None
    return parse_landmark_file(data)


def save_landmarks(ls: LandmarkSet, path):
    with open(path, "wb") as fh:
        fh.write(serialize(ls))
