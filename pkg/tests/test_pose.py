import math

import pytest
from hypothesis import assume, given, strategies as st

from facekit.errors import CoincidentPoints
from facekit.geometry import ALL_COMPONENTS, ComponentKind as K
from facekit.landmarks import Landmark
from facekit.pose import (
    PoseAngles,
    PoseBucket as B,
    active_components,
    bucket_pose,
    estimate_pose,
    signed_axis_angle,
)
from facekit.synthetic import pose_landmarks


def test_axis_angle_zero():
    assert signed_axis_angle((0, 0.1, 1.0), (0, -0.1, 1.0), "Z") == 0.0


def test_axis_angle_minus_45():
    # arcsin(-0.1 / sqrt(0.02)) by hand
    got = signed_axis_angle((0.05, 0, 1.0), (-0.05, 0, 1.1), "Z")
    assert got == pytest.approx(-45.0, abs=1e-9)


def test_axis_angle_coincident():
    with pytest.raises(CoincidentPoints):
        signed_axis_angle((1, 2, 3), (1, 2, 3), "Z")


def test_axis_angle_is_complement_of_axis_angle():
    # magnitude equals |90 - angle(line, axis)| for the unsigned formula
    p1, p2 = (0.03, -0.02, 1.2), (-0.01, 0.05, 1.0)
    d = [a - b for a, b in zip(p1, p2)]
    cos_to_z = abs(d[2]) / math.sqrt(sum(c * c for c in d))
    unsigned = abs(math.degrees(math.acos(cos_to_z)) - 90.0)
    assert abs(signed_axis_angle(p1, p2, "Z")) == pytest.approx(unsigned, abs=1e-9)


xyz = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.1, 3))


@given(xyz, xyz, st.sampled_from(["X", "Y", "Z"]))
def test_axis_angle_antisymmetric_and_bounded(p1, p2, axis):
    assume(math.dist(p1, p2) > 1e-9)
    a = signed_axis_angle(p1, p2, axis)
    assert a == -signed_axis_angle(p2, p1, axis)
    assert -90.0 <= a <= 90.0


def test_axis_angle_parallel_is_90():
    assert signed_axis_angle((0, 0, 2), (0, 0, 1), "Z") == 90.0
    assert signed_axis_angle((0.5, 0, 1), (0.1, 0, 1), "X") == 90.0


def _with_depths(ls, **points):
    return ls.replace_points(**{k: Landmark(ls[k].px, ls[k].py, *v) for k, v in points.items()})


def test_estimate_frontal(frontal_ls):
    a = estimate_pose(frontal_ls)
    assert (a.pitch, a.yaw, a.roll) == (0.0, 0.0, 0.0)


def test_estimate_yaw_45(frontal_ls):
    # cheeks 0.1 apart across, right cheek 0.1 deeper: arcsin(1 / sqrt(2))
    ls = _with_depths(frontal_ls, mid_right_cheek=(0.05, 0.0, 1.1), mid_left_cheek=(-0.05, 0.0, 1.0))
    assert estimate_pose(ls).yaw == pytest.approx(45.0, abs=1e-9)


def test_estimate_pitch_30(frontal_ls):
    # forehead 0.05 deeper than chin, 0.1 apart: arcsin(0.5)
    h = math.sqrt(0.1 ** 2 - 0.05 ** 2)
    ls = _with_depths(frontal_ls, middle_forehead=(0.0, h, 1.05), bottom_chin=(0.0, 0.0, 1.0))
    assert estimate_pose(ls).pitch == pytest.approx(30.0, abs=1e-9)


def test_estimate_flip_flags():
    a = estimate_pose(pose_landmarks(yaw=40), flip_yaw=True)
    assert a.yaw == pytest.approx(-40)
    a = estimate_pose(pose_landmarks(pitch=-30), flip_pitch=True)
    assert a.pitch == pytest.approx(30)


def test_estimate_coincident_names_pair(frontal_ls):
    ls = frontal_ls.replace_points(bottom_chin=frontal_ls["middle_forehead"])
    with pytest.raises(CoincidentPoints, match="middle_forehead"):
        estimate_pose(ls)


def test_roll_measured_from_x(frontal_ls):
    ls = pose_landmarks(roll=10)
    assert estimate_pose(ls).roll == pytest.approx(-10.0, abs=1e-9)


@pytest.mark.parametrize("pitch, yaw, roll, expected", [
    (0, 0, 0, B.FRONTAL),
    (0, 30, 0, B.RIGHT),
    (0, -30, 0, B.LEFT),
    (30, 0, 0, B.UP),
    (-30, 0, 0, B.DOWN),
    (30, 30, 0, B.RIGHT),
    (-40, -26, 0, B.LEFT),
    (0, 25, 0, B.FRONTAL),
    (-25, 0, 0, B.FRONTAL),
])
def test_bucket_examples(pitch, yaw, roll, expected):
    assert bucket_pose(PoseAngles(pitch, yaw, roll)) is expected


def test_large_roll_warns_and_stays_frontal(caplog):
    with caplog.at_level("WARNING", logger="facekit.pose"):
        assert bucket_pose(PoseAngles(0, 0, 40)) is B.FRONTAL
    assert "roll" in caplog.text


def test_bucket_rejects_nonpositive_threshold():
    with pytest.raises(ValueError):
        bucket_pose(PoseAngles(0, 0, 0), 0)


angle = st.floats(-90, 90)


@given(angle, angle, angle, st.floats(1, 60), st.floats(0, 30))
def test_threshold_monotone(p, y, r, t, dt):
    if bucket_pose(PoseAngles(p, y, r), t) is B.FRONTAL:
        assert bucket_pose(PoseAngles(p, y, r), t + dt) is B.FRONTAL


def test_active_components():
    assert active_components(B.FRONTAL) == set(ALL_COMPONENTS)
    assert active_components(B.LEFT) == set(ALL_COMPONENTS) - {K.RIGHT_EYE}
    assert active_components(B.RIGHT) == set(ALL_COMPONENTS) - {K.LEFT_EYE}
    assert active_components(B.UP) == set(ALL_COMPONENTS) - {K.FOREHEAD_EYEBROW}
    assert active_components(B.DOWN) == set(ALL_COMPONENTS) - {K.MOUTH_CHIN}


@pytest.mark.parametrize("yaw", [-60, -45, -27, 27, 45, 60])
def test_rotated_template_yaw(yaw):
    got = bucket_pose(estimate_pose(pose_landmarks(yaw=yaw)))
    assert got is (B.RIGHT if yaw > 0 else B.LEFT)


@pytest.mark.parametrize("pitch", [-60, -27, 27, 60])
def test_rotated_template_pitch(pitch):
    got = bucket_pose(estimate_pose(pose_landmarks(pitch=pitch)))
    assert got is (B.UP if pitch > 0 else B.DOWN)
