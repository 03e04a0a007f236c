import json

import pytest

from facekit.config import DEFAULT_CONFIG, config_from_dict, load_config
from facekit.errors import BadConfig, IoFailure
from facekit.geometry import ComponentKind as K
from facekit.pose import PoseBucket as B


def test_defaults():
    c = DEFAULT_CONFIG
    assert c.threshold_degrees == 25.0
    assert (c.normalize.sigma1, c.normalize.sigma2, c.normalize.eps) == (2.0, 8.0, 1e-6)
    assert c.grids[K.FACE] == (8, 8) and c.grids[K.NOSE] == (3, 3)
    assert load_config(None) == c
    assert config_from_dict({}) == c


def test_round_trip_through_dict():
    assert config_from_dict(DEFAULT_CONFIG.to_dict()) == DEFAULT_CONFIG


def test_sigma_order_enforced():
    with pytest.raises(BadConfig, match="sigma"):
        config_from_dict({"preprocess": {"sigma1": 8, "sigma2": 8}})


def test_weights_must_sum_to_one():
    doc = {"fusion": {"weights": {"left": {"face": 0.5, "nose": 0.4}}}}
    with pytest.raises(BadConfig, match="fusion.weights.left"):
        config_from_dict(doc)


def test_custom_weights_accepted():
    cfg = config_from_dict({"fusion": {"weights": {"up": {"face": 0.25, "nose": 0.75}}}})
    assert cfg.weights[B.UP][K.NOSE] == 0.75
    assert cfg.weights[B.FRONTAL] == DEFAULT_CONFIG.weights[B.FRONTAL]


@pytest.mark.parametrize("doc", [
    {"bogus": {}},
    {"pose": {"threshold": 20}},
    {"features": {"grid": {"face": [200, 2]}}},
    {"features": {"grid": {"ear": [2, 2]}}},
    {"geometry": {"margins": {"eye_breadth": -1}}},
    {"matcher": {"reject_tau": 2}},
    {"pose": {"flip_yaw": "yes"}},
])
def test_rejects_bad_docs(doc):
    with pytest.raises(BadConfig):
        config_from_dict(doc)


def test_fingerprint_tracks_descriptor_settings():
    fp = DEFAULT_CONFIG.fingerprint
    assert fp.startswith("sha256:")
    assert DEFAULT_CONFIG.with_sigmas(1.0, 8.0).fingerprint != fp
    assert config_from_dict({"features": {"grid": {"nose": [2, 2]}}}).fingerprint != fp
    # matcher and pose settings do not touch descriptors
    assert config_from_dict({"matcher": {"reject_tau": 0.5}, "pose": {"flip_yaw": True}}).fingerprint == fp


def test_load_config_files(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"pose": {"threshold_degrees": 30}}))
    assert load_config(p).threshold_degrees == 30.0
    p.write_text("{")
    with pytest.raises(BadConfig):
        load_config(p)
    with pytest.raises(IoFailure):
        load_config(tmp_path / "missing.json")
