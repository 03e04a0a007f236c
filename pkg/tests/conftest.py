import numpy as np
import pytest

from facekit.gallery import Gallery, enroll
from facekit.landmarks import FacePointId, Landmark, LandmarkSet, to_dict
from facekit.synthetic import SyntheticSubject, pose_landmarks, random_capture


def flat_landmarks(pixels=None, width=200, height=240, depth=1.0, image_ref="t.png"):
    """Landmark set with every point at (100, 120) unless overridden, all at equal depth."""
    pixels = pixels or {}
    pts = {}
    for i, pid in enumerate(FacePointId):
        px, py = pixels.get(pid.value, (100.0, 120.0))
        # distinct 3D points so pose pairs never coincide
        pts[pid] = Landmark(float(px), float(py), 0.001 * i, -0.001 * i, depth)
    return LandmarkSet(image_ref, width, height, pts)


@pytest.fixture
def frontal_ls():
    return pose_landmarks()


@pytest.fixture
def landmark_doc(frontal_ls):
    return to_dict(frontal_ls)


@pytest.fixture(scope="session")
def desk_gallery():
    """Ten synthetic subjects with two frontal captures each, plus the raw captures."""
    rng = np.random.default_rng(7)
    g = Gallery.empty()
    captures = []
    for s in range(10):
        subject = SyntheticSubject(100 + s)
        for c in range(2):
            img, ls = random_capture(subject, rng, image_ref=f"s{s}_{c}.png")
            g = enroll(g, f"s{s:02d}", img, ls)
            captures.append((f"s{s:02d}", img, ls))
    return g, captures
