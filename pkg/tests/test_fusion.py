import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from facekit.config import DEFAULT_CONFIG
from facekit.errors import (
    ConfigMismatch,
    DescriptorMismatch,
    InvalidWeights,
    LengthMismatch,
    MissingScore,
    NoCandidates,
)
from facekit.fusion import (
    FusionWeights,
    chi_square,
    component_score,
    default_weights,
    fuse,
    identify,
)
from facekit.gallery import Gallery, GalleryEntry
from facekit.geometry import ALL_COMPONENTS, ComponentKind as K
from facekit.lbp import LbpDescriptor, descriptor
from facekit.pose import ALL_BUCKETS, PoseBucket as B, active_components

from oracles import brute_chi_square


def random_desc(rng, kind, grid=(2, 2)):
    codes = rng.integers(0, 256, (8, 8)).astype(np.uint8)
    return descriptor(codes, kind, grid)


def random_entry(rng, subject, bucket=B.FRONTAL, ref=""):
    return GalleryEntry(subject, bucket, {k: random_desc(rng, k) for k in active_components(bucket)}, ref)


def build_gallery(entries):
    g = Gallery.empty()
    for e in entries:
        g = g.add(e)
    return g


# --- chi-square and component scores -----------------------------------------

def test_chi_square_identical_is_zero():
    h = np.array([0.5, 0.5, 0.0])
    assert chi_square(h, h) == 0.0


def test_chi_square_disjoint():
    assert chi_square([1, 0], [0, 1]) == pytest.approx(2.0, abs=1e-9)


def test_chi_square_matches_direct_sum():
    rng = np.random.default_rng(0)
    a, b = rng.random(256), rng.random(256)
    assert chi_square(a, b) == pytest.approx(brute_chi_square(a, b), rel=1e-12)
    assert chi_square(a, b) == chi_square(b, a)


def test_chi_square_length_mismatch():
    with pytest.raises(LengthMismatch):
        chi_square([1, 0], [1, 0, 0])


def test_component_score_values():
    d1 = LbpDescriptor(K.NOSE, (1, 1), np.eye(256)[0])
    d2 = LbpDescriptor(K.NOSE, (1, 1), np.eye(256)[1])
    assert component_score(d1, d1) == 1.0
    assert component_score(d1, d2) == pytest.approx(1 / 3)
    half = LbpDescriptor(K.NOSE, (1, 1), (np.eye(256)[0] + np.eye(256)[1]) / 2)
    # chi2 = 0.25 / 1.5 + 0.25 / 0.5 = 2/3 -> score 0.6
    assert component_score(d1, half) == pytest.approx(0.6)


def test_component_score_mismatch():
    rng = np.random.default_rng(1)
    with pytest.raises(DescriptorMismatch):
        component_score(random_desc(rng, K.NOSE), random_desc(rng, K.FACE))
    with pytest.raises(DescriptorMismatch):
        component_score(random_desc(rng, K.NOSE, (1, 1)), random_desc(rng, K.NOSE, (2, 2)))


# --- weights and fusion ------------------------------------------------------

def test_default_frontal_weights():
    w = default_weights(B.FRONTAL)
    rates = dict(zip(ALL_COMPONENTS, (85, 60, 61, 65, 70, 72)))
    for k, r in rates.items():
        assert w[k] == pytest.approx(r / 413, abs=1e-12)


def test_default_left_weights():
    w = default_weights(B.LEFT)
    assert w[K.RIGHT_EYE] == 0.0
    assert w[K.FACE] == pytest.approx(85 / 352, abs=1e-12)
    assert w[K.LEFT_EYE] == pytest.approx(60 / 352, abs=1e-12)


@pytest.mark.parametrize("bucket", ALL_BUCKETS)
def test_default_weights_valid(bucket):
    w = default_weights(bucket)
    assert sum(w.weights.values()) == pytest.approx(1.0, abs=1e-9)
    for k in set(ALL_COMPONENTS) - active_components(bucket):
        assert w[k] == 0.0


@pytest.mark.parametrize("weights", [
    {K.FACE: 0.5, K.NOSE: 0.4},
    {K.FACE: 1.2, K.NOSE: -0.2},
    {K.FACE: 0.5, K.RIGHT_EYE: 0.5},
])
def test_invalid_weights(weights):
    with pytest.raises(InvalidWeights):
        FusionWeights(B.LEFT, weights)


def test_fuse_examples():
    w = FusionWeights(B.FRONTAL, {K.FACE: 0.5, K.NOSE: 0.5})
    assert fuse({K.FACE: 0.9, K.NOSE: 0.7}, w) == pytest.approx(0.8)
    w = FusionWeights(B.FRONTAL, {K.FACE: 0.6, K.NOSE: 0.4})
    assert fuse({K.FACE: 0.9, K.NOSE: 0.6, K.LEFT_EYE: 0.0}, w) == pytest.approx(0.78)


def test_fuse_missing_score():
    w = FusionWeights(B.FRONTAL, {K.FACE: 0.5, K.NOSE: 0.5})
    with pytest.raises(MissingScore):
        fuse({K.FACE: 0.9}, w)


@given(st.lists(st.floats(0, 1), min_size=6, max_size=6))
def test_fuse_is_convex(scores):
    s = dict(zip(ALL_COMPONENTS, scores))
    f = fuse(s, default_weights(B.FRONTAL))
    assert min(scores) - 1e-12 <= f <= max(scores) + 1e-12


# --- identification ---------------------------------------------------------

def test_self_match_is_top_with_score_one():
    rng = np.random.default_rng(2)
    entries = [random_entry(rng, f"id{i}") for i in range(6)]
    g = build_gallery(entries)
    res = identify(entries[3].descriptors, B.FRONTAL, g)
    assert res[0].subject_id == "id3"
    assert res[0].score == pytest.approx(1.0, abs=1e-9)


def test_empty_partition_raises():
    rng = np.random.default_rng(3)
    g = build_gallery([random_entry(rng, "a")])
    with pytest.raises(NoCandidates):
        identify(random_entry(rng, "p", B.LEFT).descriptors, B.LEFT, g)


def brute_rank(probe, entries, weights):
    best = {}
    for e in entries:
        s = 0.0
        for k in ALL_COMPONENTS:
            if weights[k] > 0:
                d = brute_chi_square(probe[k].values, e.descriptors[k].values)
                s += weights[k] / (1 + d)
        best[e.subject_id] = max(best.get(e.subject_id, -1.0), s)
    return sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 10))
def test_ranking_matches_exhaustive_oracle(seed, n):
    rng = np.random.default_rng(seed)
    entries = [random_entry(rng, f"s{int(rng.integers(0, 4))}") for _ in range(n)]
    probe = random_entry(rng, "probe").descriptors
    got = identify(probe, B.FRONTAL, build_gallery(entries), top_k=None)
    want = brute_rank(probe, entries, default_weights(B.FRONTAL))
    assert [m.subject_id for m in got] == [s for s, _ in want]
    for m, (_, s) in zip(got, want):
        assert m.score == pytest.approx(s, abs=1e-9)


def test_insertion_order_does_not_matter():
    rng = np.random.default_rng(4)
    entries = [random_entry(rng, f"s{i}") for i in range(8)]
    probe = random_entry(rng, "p").descriptors
    a = identify(probe, B.FRONTAL, build_gallery(entries), top_k=None)
    b = identify(probe, B.FRONTAL, build_gallery(entries[::-1]), top_k=None)
    assert [(m.subject_id, m.score) for m in a] == [(m.subject_id, m.score) for m in b]


def test_zero_weight_component_is_ignored():
    rng = np.random.default_rng(5)
    entries = [random_entry(rng, f"s{i}") for i in range(5)]
    probe = dict(random_entry(rng, "p").descriptors)
    w = FusionWeights(B.FRONTAL, {K.FACE: 0.5, K.NOSE: 0.5})
    before = identify(probe, B.FRONTAL, build_gallery(entries), weights=w, top_k=None)
    probe[K.LEFT_EYE] = random_desc(rng, K.LEFT_EYE)
    after = identify(probe, B.FRONTAL, build_gallery(entries), weights=w, top_k=None)
    assert [(m.subject_id, m.score) for m in before] == [(m.subject_id, m.score) for m in after]
    assert set(after[0].component_scores) == {K.FACE, K.NOSE}


def test_better_component_never_lowers_score():
    rng = np.random.default_rng(6)
    target = random_entry(rng, "t")
    g = build_gallery([target])
    probe = dict(random_entry(rng, "p").descriptors)
    s0 = identify(probe, B.FRONTAL, g)[0].score
    probe[K.NOSE] = target.descriptors[K.NOSE]  # nose now matches exactly
    assert identify(probe, B.FRONTAL, g)[0].score >= s0


def test_ties_break_by_subject_id():
    rng = np.random.default_rng(7)
    e = random_entry(rng, "zed")
    twin = GalleryEntry("amy", B.FRONTAL, e.descriptors)
    res = identify(e.descriptors, B.FRONTAL, build_gallery([e, twin]))
    assert [m.subject_id for m in res] == ["amy", "zed"]


def test_top_k_and_best_entry_per_subject():
    rng = np.random.default_rng(8)
    entries = [random_entry(rng, f"s{i % 4}", ref=f"e{i}") for i in range(12)]
    g = build_gallery(entries)
    res = identify(entries[5].descriptors, B.FRONTAL, g, top_k=3)
    assert len(res) == 3
    assert res[0].subject_id == "s1" and res[0].entry_ref == "e5"
    assert len({m.subject_id for m in identify(entries[0].descriptors, B.FRONTAL, g, top_k=None)}) == 4


def test_reject_threshold_flags_low_scores():
    rng = np.random.default_rng(9)
    entries = [random_entry(rng, f"s{i}") for i in range(4)]
    res = identify(entries[0].descriptors, B.FRONTAL, build_gallery(entries), reject_tau=0.999)
    assert not res[0].rejected
    assert all(m.rejected for m in res[1:])


def test_fingerprint_mismatch():
    rng = np.random.default_rng(10)
    g = build_gallery([random_entry(rng, "a")])
    other = DEFAULT_CONFIG.with_sigmas(1.0, 4.0).fingerprint
    with pytest.raises(ConfigMismatch):
        identify(random_entry(rng, "p").descriptors, B.FRONTAL, g, fingerprint=other)
