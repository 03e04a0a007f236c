"""Image loading and the capture -> descriptors pipeline shared by enrol and identify."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .config import DEFAULT_CONFIG, Config
from .errors import ImageMismatch, IoFailure
from .geometry import ComponentKind, component_box, extract_roi
from .landmarks import LandmarkSet
from .lbp import LbpDescriptor, descriptor, lbp_image
from .pose import PoseAngles, PoseBucket, active_components, bucket_pose, estimate_pose
from .preprocess import preprocess_component


def load_image(path) -> np.ndarray:
    """Read an image as 8-bit intensity; colour is reduced with ITU-R 601 luma."""
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("I;16", "I;16B", "I", "F"):
                a = np.asarray(im, dtype=np.float64)
                top = a.max() if a.size and a.max() > 255 else 255.0
                return np.clip(np.floor(a * 255.0 / top + 0.5), 0, 255).astype(np.uint8)
            if im.mode != "L":
                # Pillow's L conversion uses 299/587/114 weights
                im = im.convert("RGB").convert("L")
            return np.asarray(im, dtype=np.uint8).copy()
    except (OSError, UnidentifiedImageError) as exc:
        raise IoFailure(f"cannot read image {path}: {exc}") from None


def save_image(img, path):
    Image.fromarray(np.asarray(img, dtype=np.uint8), mode="L").save(path)


def occlude(img, region="none", fraction=0.5) -> np.ndarray:
    """Zero the top or bottom ``fraction`` of the image rows (sunglasses / scarf)."""
    out = np.array(img, copy=True)
    if region in (None, "none"):
        return out
    rows = int(round(out.shape[0] * fraction))
    if region == "top":
        out[:rows] = 0
    elif region == "bottom":
        out[out.shape[0] - rows:] = 0
    else:
        raise ValueError(f"unknown occlusion region {region!r}")
    return out


@dataclass(frozen=True)
class Capture:
    angles: PoseAngles
    bucket: PoseBucket
    descriptors: dict


def component_descriptor(img, ls: LandmarkSet, kind: ComponentKind, cfg: Config = DEFAULT_CONFIG) -> LbpDescriptor:
    box = component_box(ls, kind, cfg.margins)
    roi = extract_roi(img, box)
    norm = preprocess_component(roi, kind, cfg.normalize)
    return descriptor(lbp_image(norm), kind, cfg.grids[kind])


def describe_capture(img, ls: LandmarkSet, cfg: Config = DEFAULT_CONFIG, kinds=None) -> Capture:
    """Estimate pose and compute descriptors for every component active in that pose."""
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError("expected a 2D intensity image")
    if img.shape != (ls.height, ls.width):
        raise ImageMismatch(
            f"landmarks are for {ls.width}x{ls.height}, image is {img.shape[1]}x{img.shape[0]}")
    angles = estimate_pose(ls, cfg.flip_yaw, cfg.flip_pitch)
    bucket = bucket_pose(angles, cfg.threshold_degrees)
    wanted = active_components(bucket) if kinds is None else set(kinds) & active_components(bucket)
    descs = {k: component_descriptor(img, ls, k, cfg) for k in ComponentKind if k in wanted}
    return Capture(angles, bucket, descs)
