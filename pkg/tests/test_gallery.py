import json
import os

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from facekit.config import DEFAULT_CONFIG
from facekit.errors import ConfigMismatch, CorruptGallery, IoFailure, UnsupportedVersion
from facekit.gallery import (
    Gallery,
    GalleryEntry,
    enroll,
    gallery_from_dict,
    gallery_to_dict,
    load_gallery,
    partition_for,
    save_gallery,
)
from facekit.geometry import ComponentKind as K
from facekit.lbp import descriptor
from facekit.pose import ALL_BUCKETS, PoseBucket as B, active_components
from facekit.synthetic import SyntheticSubject, random_capture


def random_gallery(rng, n):
    g = Gallery.empty()
    for i in range(n):
        bucket = ALL_BUCKETS[int(rng.integers(0, 5))]
        descs = {k: descriptor(rng.integers(0, 256, (6, 6)).astype(np.uint8), k, (2, 2))
                 for k in active_components(bucket)}
        g = g.add(GalleryEntry(f"subj{int(rng.integers(0, 5))}", bucket, descs, f"img{i}.png"))
    return g


def test_enroll_frontal_and_left():
    rng = np.random.default_rng(0)
    subject = SyntheticSubject(1)
    img, ls = random_capture(subject, rng)
    g = enroll(Gallery.empty(), "alice", img, ls)
    (entry,) = g.partition(B.FRONTAL)
    assert len(entry.descriptors) == 6
    img, ls = random_capture(subject, rng, yaw=-40)
    g = enroll(g, "alice", img, ls)
    (left,) = g.partition(B.LEFT)
    assert len(left.descriptors) == 5 and K.RIGHT_EYE not in left.descriptors


def test_enroll_config_mismatch():
    rng = np.random.default_rng(1)
    img, ls = random_capture(SyntheticSubject(2), rng)
    with pytest.raises(ConfigMismatch):
        enroll(Gallery.empty(), "bob", img, ls, cfg=DEFAULT_CONFIG.with_sigmas(1, 4))


def test_enroll_leaves_other_partitions_alone():
    rng = np.random.default_rng(2)
    g = random_gallery(rng, 8)
    img, ls = random_capture(SyntheticSubject(3), rng)
    g2 = enroll(g, "carol", img, ls)
    for b in ALL_BUCKETS:
        if b is not B.FRONTAL:
            assert g2.partition(b) == g.partition(b)
    assert g2.partition(B.FRONTAL)[:-1] == g.partition(B.FRONTAL)
    assert len(g) == 8  # original unchanged


def test_partition_for():
    rng = np.random.default_rng(3)
    g = random_gallery(rng, 10)
    for b in ALL_BUCKETS:
        assert all(e.pose is b for e in partition_for(g, b))
    assert sum(len(partition_for(g, b)) for b in ALL_BUCKETS) == 10
    assert partition_for(Gallery.empty(), B.UP) == ()


def test_entry_component_set_checked():
    d = descriptor(np.zeros((4, 4), dtype=np.uint8), K.FACE, (1, 1))
    with pytest.raises(CorruptGallery):
        GalleryEntry("x", B.LEFT, {K.FACE: d})


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 12))
def test_save_load_round_trip(tmp_path_factory, seed, n):
    g = random_gallery(np.random.default_rng(seed), n)
    path = tmp_path_factory.mktemp("g") / "gallery.json"
    save_gallery(g, path)
    assert load_gallery(path) == g


def test_truncated_file(tmp_path):
    path = tmp_path / "g.json"
    save_gallery(random_gallery(np.random.default_rng(4), 3), path)
    raw = path.read_bytes()
    path.write_bytes(raw[: len(raw) // 2])
    with pytest.raises(CorruptGallery):
        load_gallery(path)


def test_unsupported_version():
    doc = gallery_to_dict(Gallery.empty())
    doc["format_version"] = 99
    with pytest.raises(UnsupportedVersion):
        gallery_from_dict(doc)


def test_bad_histogram_rejected():
    doc = gallery_to_dict(random_gallery(np.random.default_rng(5), 1))
    entry = next(e for es in doc["partitions"].values() for e in es)
    entry["descriptors"]["face"]["values"][0] += 0.5
    with pytest.raises(CorruptGallery):
        gallery_from_dict(doc)


def test_missing_file(tmp_path):
    with pytest.raises(IoFailure):
        load_gallery(tmp_path / "nope.json")


def test_save_is_atomic_and_cleans_up(tmp_path):
    path = tmp_path / "g.json"
    save_gallery(Gallery.empty(), path)
    assert json.loads(path.read_text())["format_version"] == 1
    assert os.listdir(tmp_path) == ["g.json"]
