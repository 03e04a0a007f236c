"""Synthetic subjects: a rigid 3D landmark template plus per-subject face textures.

Captures are rendered by intersecting camera rays with the (rotated) face
plane, so landmarks and pixels move together under pose and translation.
Camera frame: X to the image right, Y up, Z increasing away from the camera.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from .landmarks import FacePointId as F, Landmark, LandmarkSet, save_landmarks
from .preprocess import gaussian_blur

# face-local coordinates in metres; negative z sticks out toward the camera
TEMPLATE = {
    F.MID_TOP_LEFT_EYEBROW: (-0.042, 0.042, 0.0),
    F.UNDER_MID_BOTTOM_LEFT_EYELID: (-0.042, 0.012, 0.005),
    F.RIGHT_OF_LEFT_EYEBROW: (-0.020, 0.035, 0.0),
    F.LEFT_OF_LEFT_EYEBROW: (-0.065, 0.035, 0.01),
    F.MID_TOP_RIGHT_EYEBROW: (0.042, 0.042, 0.0),
    F.UNDER_MID_BOTTOM_RIGHT_EYELID: (0.042, 0.012, 0.005),
    F.RIGHT_OF_RIGHT_EYEBROW: (0.065, 0.035, 0.01),
    F.LEFT_OF_RIGHT_EYEBROW: (0.020, 0.035, 0.0),
    F.NOSE_TIP: (0.0, -0.020, -0.03),
    F.MIDPOINT_BETWEEN_EYEBROWS: (0.0, 0.035, 0.0),
    F.LEFT_CORNER_MOUTH: (-0.022, -0.060, -0.005),
    F.RIGHT_CORNER_MOUTH: (0.022, -0.060, -0.005),
    F.OUTSIDE_LEFT_CORNER_MOUTH: (-0.026, -0.060, -0.004),
    F.OUTSIDE_RIGHT_CORNER_MOUTH: (0.026, -0.060, -0.004),
    F.TOP_DIP_UPPER_LIP: (0.0, -0.050, -0.01),
    F.BOTTOM_CHIN: (0.0, -0.100, 0.0),
    F.TOP_SKULL: (0.0, 0.130, 0.03),
    F.TOP_RIGHT_FOREHEAD: (0.050, 0.090, 0.01),
    F.MIDDLE_FOREHEAD: (0.0, 0.080, 0.0),
    F.MID_RIGHT_CHEEK: (0.060, -0.020, 0.0),
    F.MID_LEFT_CHEEK: (-0.060, -0.020, 0.0),
}

WIDTH, HEIGHT = 160, 200
FOCAL = 600.0
DISTANCE = 1.0

# texture sheet covering the face plane
_U = (-0.09, 0.09)
_V = (-0.14, 0.15)
_TEXEL = 0.0015


def rotation(yaw=0.0, pitch=0.0, roll=0.0) -> np.ndarray:
    """Head rotation: +yaw pushes the right cheek (+x) away, +pitch the forehead (+y)."""
    ty, tp, tr = (math.radians(a) for a in (yaw, pitch, roll))
    cy, sy = math.cos(ty), math.sin(ty)
    cp, sp = math.cos(tp), math.sin(tp)
    cr, sr = math.cos(tr), math.sin(tr)
    r_yaw = np.array([[cy, 0, -sy], [0, 1, 0], [sy, 0, cy]])
    r_pitch = np.array([[1, 0, 0], [0, cp, -sp], [0, sp, cp]])
    r_roll = np.array([[cr, -sr, 0], [sr, cr, 0], [0, 0, 1]])
    return r_roll @ r_pitch @ r_yaw


def pose_landmarks(yaw=0.0, pitch=0.0, roll=0.0, translation=(0.0, 0.0, 0.0), scale=1.0,
                   width=WIDTH, height=HEIGHT, focal=FOCAL, image_ref="synthetic") -> LandmarkSet:
    """Landmarks of the template rotated, translated and projected by a pinhole camera."""
    rot = rotation(yaw, pitch, roll)
    origin = np.array([0.0, 0.0, DISTANCE]) + np.asarray(translation, dtype=float)
    cx, cy = width / 2.0, height / 2.0
    pts = {}
    for pid, local in TEMPLATE.items():
        x, y, z = rot @ (scale * np.asarray(local)) + origin
        pts[pid] = Landmark(float(cx + focal * x / z), float(cy - focal * y / z), float(x), float(y), float(z))
    return LandmarkSet(image_ref, width, height, pts)


def _blob(uu, vv, u0, v0, ru, rv):
    return np.exp(-(((uu - u0) / ru) ** 2 + ((vv - v0) / rv) ** 2))


@dataclass
class SyntheticSubject:
    """A face texture with subject-specific fine structure and feature shapes."""

    seed: int

    def __post_init__(self):
        rng = np.random.default_rng(self.seed)
        self.scale = float(rng.uniform(0.95, 1.05))
        nu = int(round((_U[1] - _U[0]) / _TEXEL))
        nv = int(round((_V[1] - _V[0]) / _TEXEL))
        u = np.linspace(_U[0], _U[1], nu)
        v = np.linspace(_V[1], _V[0], nv)
        uu, vv = np.meshgrid(u, v)

        tex = np.full((nv, nu), rng.uniform(130, 170))
        tex += 40 * gaussian_blur(rng.standard_normal((nv, nu)), 1.0) / 0.28
        tex += 25 * gaussian_blur(rng.standard_normal((nv, nu)), 5.0) / 0.056
        brow = rng.uniform(50, 90)
        eye = rng.uniform(50, 90)
        for sx in (-1, 1):
            tex -= brow * _blob(uu, vv, sx * 0.042, 0.038, 0.024 * rng.uniform(0.8, 1.2), 0.005)
            tex -= eye * _blob(uu, vv, sx * 0.042, 0.022, 0.012 * rng.uniform(0.8, 1.2), 0.006)
        tex -= rng.uniform(20, 50) * _blob(uu, vv, 0.0, -0.025, 0.012, 0.008)
        tex -= rng.uniform(40, 80) * _blob(uu, vv, 0.0, -0.062, 0.024 * rng.uniform(0.8, 1.2), 0.007)
        self.texture = tex

    def sample(self, u, v):
        """Bilinear lookup in face-plane metres (template scale)."""
        tu = (u / self.scale - _U[0]) / _TEXEL
        tv = (_V[1] - v / self.scale) / _TEXEL
        nv, nu = self.texture.shape
        tu = np.clip(tu, 0, nu - 1.000001)
        tv = np.clip(tv, 0, nv - 1.000001)
        i0, j0 = np.floor(tv).astype(int), np.floor(tu).astype(int)
        fi, fj = tv - i0, tu - j0
        t = self.texture
        return ((t[i0, j0] * (1 - fj) + t[i0, j0 + 1] * fj) * (1 - fi)
                + (t[i0 + 1, j0] * (1 - fj) + t[i0 + 1, j0 + 1] * fj) * fi)

    def render(self, yaw=0.0, pitch=0.0, roll=0.0, translation=(0.0, 0.0, 0.0),
               gain=1.0, offset=0.0, gradient=0.0, noise=0.0, expression=0.0,
               rng=None, image_ref="synthetic"):
        """Render one capture; returns ``(uint8 image, LandmarkSet)``."""
        rng = np.random.default_rng(0) if rng is None else rng
        ls = pose_landmarks(yaw, pitch, roll, translation, self.scale, image_ref=image_ref)
        rot = rotation(yaw, pitch, roll)
        origin = np.array([0.0, 0.0, DISTANCE]) + np.asarray(translation, dtype=float)
        normal = rot @ np.array([0.0, 0.0, 1.0])

        cols, rows = np.meshgrid(np.arange(WIDTH), np.arange(HEIGHT))
        d = np.stack([(cols - WIDTH / 2.0) / FOCAL, -(rows - HEIGHT / 2.0) / FOCAL,
                      np.ones_like(cols, dtype=float)], axis=-1)
        t = (normal @ origin) / (d @ normal)
        local = (t[..., None] * d - origin) @ rot
        u, v = local[..., 0], local[..., 1]
        if expression:
            s = self.scale
            v = v + expression * 0.006 * s * _blob(u, v, 0.0, -0.06 * s, 0.03 * s, 0.02 * s)
        face = self.sample(u, v)

        inside = ((u / (0.08 * self.scale)) ** 2 + ((v - 0.01 * self.scale) / (0.135 * self.scale)) ** 2) <= 1
        background = 60 + 20 * (cols / WIDTH)
        img = np.where(inside, face, background)
        img = gain * img + offset + gradient * 100 * (cols / WIDTH - 0.5)
        if noise:
            img = img + rng.normal(0.0, noise, img.shape)
        return np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8), ls


def random_capture(subject: SyntheticSubject, rng, yaw=0.0, pitch=0.0, image_ref="synthetic",
                   noise=3.0, jitter=3.0, expression=None):
    """A capture with random head motion (+/- ``jitter`` degrees), lighting change and noise."""
    return subject.render(
        yaw=yaw + rng.uniform(-jitter, jitter), pitch=pitch + rng.uniform(-jitter, jitter),
        roll=rng.uniform(-jitter, jitter),
        translation=(rng.uniform(-0.006, 0.006), rng.uniform(-0.006, 0.006), rng.uniform(-0.05, 0.05)),
        gain=rng.uniform(0.6, 1.4), offset=rng.uniform(-30, 30), gradient=rng.uniform(-0.4, 0.4),
        noise=noise, expression=rng.uniform(-2, 2) if expression is None else expression,
        rng=rng, image_ref=image_ref,
    )


POSE_OFFSETS = {
    "frontal": (0.0, 0.0),
    "left": (-40.0, 0.0),
    "right": (40.0, 0.0),
    "up": (0.0, 40.0),
    "down": (0.0, -40.0),
}


def make_dataset(out_dir, n_subjects=10, captures=2, probes=1, poses=("frontal",), seed=0,
                 noise=3.0, jitter=3.0):
    """Write a desk-scale dataset: images, landmark files, and two manifests.

    ``enroll.csv`` lists gallery captures and ``probes.csv`` held-out captures,
    both with header ``image,landmarks,subject``. Returns the two paths.
    """
    from .pipeline import save_image

    rng = np.random.default_rng(seed)
    img_dir = os.path.join(out_dir, "images")
    os.makedirs(img_dir, exist_ok=True)
    rows = {"enroll": [], "probes": []}
    for s in range(n_subjects):
        subject = SyntheticSubject(seed * 1000 + s)
        sid = f"s{s:03d}"
        for pose in poses:
            yaw, pitch = POSE_OFFSETS[pose]
            for split, count in (("enroll", captures), ("probes", probes)):
                for c in range(count):
                    stem = f"{sid}_{pose}_{split}{c}"
                    img, ls = random_capture(subject, rng, yaw, pitch, image_ref=f"{stem}.png",
                                             noise=noise, jitter=jitter)
                    img_path = os.path.join(img_dir, f"{stem}.png")
                    lm_path = os.path.join(img_dir, f"{stem}.json")
                    save_image(img, img_path)
                    save_landmarks(ls, lm_path)
                    rows[split].append((os.path.relpath(img_path, out_dir),
                                        os.path.relpath(lm_path, out_dir), sid))
    paths = []
    for split in ("enroll", "probes"):
        path = os.path.join(out_dir, f"{split}.csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["image", "landmarks", "subject"])
            w.writerows(rows[split])
        paths.append(path)
    return tuple(paths)
