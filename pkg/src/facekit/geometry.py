"""Component bounding boxes from landmark pairs, and ROI cropping."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateBox, EmptyIntersection
from .landmarks import FacePointId as F, LandmarkSet


class ComponentKind(str, Enum):
    FACE = "face"
    LEFT_EYE = "left_eye"
    RIGHT_EYE = "right_eye"
    NOSE = "nose"
    MOUTH_CHIN = "mouth_chin"
    FOREHEAD_EYEBROW = "forehead_eyebrow"

    def __str__(self):
        return self.value


ALL_COMPONENTS = tuple(ComponentKind)


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box anchored at its top-right vertex ``P = (p_x, p_y)``.

    ``l`` is the horizontal extent and ``b`` the vertical one, so the box
    spans ``[p_x - l, p_x] x [p_y, p_y + b]`` in pixel coordinates.
    """

    p_x: float
    p_y: float
    l: float
    b: float

    def __post_init__(self):
        if not (self.l > 0 and self.b > 0):
            raise DegenerateBox(f"l={self.l}, b={self.b}")

    @property
    def vertices(self):
        return (
            (self.p_x, self.p_y),
            (self.p_x - self.l, self.p_y),
            (self.p_x - self.l, self.p_y + self.b),
            (self.p_x, self.p_y + self.b),
        )

    @property
    def x0(self):
        return self.p_x - self.l

    @property
    def y1(self):
        return self.p_y + self.b


@dataclass(frozen=True)
class Margins:
    """Scale factors for the landmark-derived component boxes."""

    eye_breadth: float = 1.5
    nose_length: float = 0.5
    nose_breadth: float = 1.4
    forehead_breadth: float = 2.0
    face_pad: float = 0.05
    mouth_length: float = 1.0
    mouth_breadth: float = 1.0

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


DEFAULT_MARGINS = Margins()


def euclidean_2d(p1, p2) -> float:
    return math.hypot(p1[0] - p2[0], p1[1] - p2[1])


def _dist(ls, a, b):
    return euclidean_2d(ls[a].pixel, ls[b].pixel)


def _box(kind, p_x, p_y, l, b):
    try:
        return BoundingBox(p_x, p_y, l, b)
    except DegenerateBox:
        raise DegenerateBox(f"{kind.value}: l={l:g}, b={b:g}") from None


def component_box(ls: LandmarkSet, kind: ComponentKind, margins: Margins = DEFAULT_MARGINS) -> BoundingBox:
    kind = ComponentKind(kind)
    m = margins
    if kind is ComponentKind.MOUTH_CHIN:
        l = m.mouth_length * _dist(ls, F.OUTSIDE_LEFT_CORNER_MOUTH, F.OUTSIDE_RIGHT_CORNER_MOUTH)
        b = m.mouth_breadth * _dist(ls, F.TOP_DIP_UPPER_LIP, F.BOTTOM_CHIN)
        return _box(kind, ls[F.OUTSIDE_RIGHT_CORNER_MOUTH].px, ls[F.TOP_DIP_UPPER_LIP].py, l, b)

    if kind in (ComponentKind.LEFT_EYE, ComponentKind.RIGHT_EYE):
        if kind is ComponentKind.LEFT_EYE:
            outer, inner, top, lid = (F.LEFT_OF_LEFT_EYEBROW, F.RIGHT_OF_LEFT_EYEBROW,
                                      F.MID_TOP_LEFT_EYEBROW, F.UNDER_MID_BOTTOM_LEFT_EYELID)
        else:
            outer, inner, top, lid = (F.LEFT_OF_RIGHT_EYEBROW, F.RIGHT_OF_RIGHT_EYEBROW,
                                      F.MID_TOP_RIGHT_EYEBROW, F.UNDER_MID_BOTTOM_RIGHT_EYELID)
        l = _dist(ls, outer, inner)
        b = m.eye_breadth * _dist(ls, top, lid)
        return _box(kind, ls[inner].px, ls[top].py, l, b)

    if kind is ComponentKind.NOSE:
        l = m.nose_length * _dist(ls, F.MID_LEFT_CHEEK, F.MID_RIGHT_CHEEK)
        b = m.nose_breadth * _dist(ls, F.MIDPOINT_BETWEEN_EYEBROWS, F.NOSE_TIP)
        return _box(kind, ls[F.NOSE_TIP].px + l / 2, ls[F.MIDPOINT_BETWEEN_EYEBROWS].py, l, b)

    if kind is ComponentKind.FOREHEAD_EYEBROW:
        l = _dist(ls, F.LEFT_OF_LEFT_EYEBROW, F.RIGHT_OF_RIGHT_EYEBROW)
        b = m.forehead_breadth * _dist(ls, F.MIDDLE_FOREHEAD, F.MIDPOINT_BETWEEN_EYEBROWS)
        return _box(kind, ls[F.RIGHT_OF_RIGHT_EYEBROW].px, ls[F.MIDDLE_FOREHEAD].py, l, b)

    # FACE: hull of all points horizontally, skull-to-chin vertically
    xs = [lm.px for lm in ls.points.values()]
    left, right = min(xs), max(xs)
    top, bottom = ls[F.TOP_SKULL].py, ls[F.BOTTOM_CHIN].py
    w, h = right - left, bottom - top
    pad_x, pad_y = m.face_pad * w, m.face_pad * h
    return _box(kind, right + pad_x, top - pad_y, w + 2 * pad_x, h + 2 * pad_y)


def _nearest(v):
    return int(math.floor(v + 0.5))


def roi_bounds(shape, box: BoundingBox):
    """Integer ``(x0, x1, y0, y1)`` half-open crop window clipped to ``shape``."""
    height, width = shape[:2]
    if box.x0 >= width or box.p_x <= 0 or box.p_y >= height or box.y1 <= 0:
        raise EmptyIntersection(f"box {box} outside {width}x{height} image")
    x0 = min(max(_nearest(box.x0), 0), width - 1)
    y0 = min(max(_nearest(box.p_y), 0), height - 1)
    x1 = min(max(_nearest(box.p_x), x0 + 1), width)
    y1 = min(max(_nearest(box.y1), y0 + 1), height)
    return x0, x1, y0, y1


def extract_roi(img: np.ndarray, box: BoundingBox) -> np.ndarray:
    """Copy the pixels of ``img`` covered by ``box`` (clipped, at least 1x1)."""
    if img.size == 0:
        raise EmptyIntersection("empty image")
    x0, x1, y0, y1 = roi_bounds(img.shape, box)
    return img[y0:y1, x0:x1].copy()
