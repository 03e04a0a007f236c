"""Toolkit configuration: defaults, JSON loading, validation and fingerprint."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping

from .errors import BadConfig, InvalidSigmas, InvalidWeights, IoFailure
from .fusion import FusionWeights, default_weights
from .geometry import ALL_COMPONENTS, ComponentKind, Margins
from .lbp import DEFAULT_GRIDS, NEIGHBOR_ORDER_TAG
from .pose import ALL_BUCKETS, DEFAULT_THRESHOLD, PoseBucket
from .preprocess import COMPONENT_SIZES, NormalizeParams


def _default_weights():
    return MappingProxyType({b: default_weights(b) for b in ALL_BUCKETS})


@dataclass(frozen=True)
class Config:
    threshold_degrees: float = DEFAULT_THRESHOLD
    flip_yaw: bool = False
    flip_pitch: bool = False
    normalize: NormalizeParams = NormalizeParams()
    grids: Mapping[ComponentKind, tuple] = field(default_factory=lambda: MappingProxyType(dict(DEFAULT_GRIDS)))
    margins: Margins = Margins()
    weights: Mapping[PoseBucket, FusionWeights] = field(default_factory=_default_weights)
    reject_tau: float = 0.0

    @property
    def fingerprint(self) -> str:
        """Stable hash of every setting that changes descriptor values."""
        payload = {
            "grids": {k.value: list(self.grids[k]) for k in ALL_COMPONENTS},
            "sizes": {k.value: list(COMPONENT_SIZES[k]) for k in ALL_COMPONENTS},
            "sigma1": self.normalize.sigma1,
            "sigma2": self.normalize.sigma2,
            "eps": self.normalize.eps,
            "margins": self.margins.as_dict(),
            "lbp": NEIGHBOR_ORDER_TAG,
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return "sha256:" + hashlib.sha256(blob).hexdigest()[:32]

    def to_dict(self):
        return {
            "pose": {"threshold_degrees": self.threshold_degrees,
                     "flip_yaw": self.flip_yaw, "flip_pitch": self.flip_pitch},
            "preprocess": {"sigma1": self.normalize.sigma1, "sigma2": self.normalize.sigma2,
                           "eps": self.normalize.eps},
            "features": {"grid": {k.value: list(self.grids[k]) for k in ALL_COMPONENTS}},
            "geometry": {"margins": self.margins.as_dict()},
            "fusion": {"weights": {b.value: self.weights[b].as_dict() for b in ALL_BUCKETS}},
            "matcher": {"reject_tau": self.reject_tau},
        }

    def with_sigmas(self, sigma1, sigma2, eps=None):
        eps = self.normalize.eps if eps is None else eps
        return replace(self, normalize=NormalizeParams(sigma1, sigma2, eps))


DEFAULT_CONFIG = Config()

_SECTIONS = {
    "pose": {"threshold_degrees", "flip_yaw", "flip_pitch"},
    "preprocess": {"sigma1", "sigma2", "eps"},
    "features": {"grid"},
    "geometry": {"margins"},
    "fusion": {"weights"},
    "matcher": {"reject_tau"},
}


def _num(key, v, positive=False, lo=None):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise BadConfig(key, "must be a finite number")
    if positive and v <= 0:
        raise BadConfig(key, "must be positive")
    if lo is not None and v < lo:
        raise BadConfig(key, f"must be >= {lo}")
    return float(v)


def _bool(key, v):
    if not isinstance(v, bool):
        raise BadConfig(key, "must be true or false")
    return v


def _section(doc, name):
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        raise BadConfig(name, "must be an object")
    for k in sec:
        if k not in _SECTIONS[name]:
            raise BadConfig(f"{name}.{k}", "unknown key")
    return sec


def config_from_dict(doc: dict) -> Config:
    if not isinstance(doc, dict):
        raise BadConfig("<root>", "must be an object")
    for k in doc:
        if k not in _SECTIONS:
            raise BadConfig(k, "unknown section")
    base = DEFAULT_CONFIG

    pose = _section(doc, "pose")
    threshold = _num("pose.threshold_degrees", pose.get("threshold_degrees", base.threshold_degrees), positive=True)
    if threshold >= 90:
        raise BadConfig("pose.threshold_degrees", "must be below 90")
    flip_yaw = _bool("pose.flip_yaw", pose.get("flip_yaw", base.flip_yaw))
    flip_pitch = _bool("pose.flip_pitch", pose.get("flip_pitch", base.flip_pitch))

    pre = _section(doc, "preprocess")
    s1 = _num("preprocess.sigma1", pre.get("sigma1", base.normalize.sigma1), positive=True)
    s2 = _num("preprocess.sigma2", pre.get("sigma2", base.normalize.sigma2), positive=True)
    eps = _num("preprocess.eps", pre.get("eps", base.normalize.eps), lo=0.0)
    try:
        normalize = NormalizeParams(s1, s2, eps)
    except InvalidSigmas as exc:
        raise BadConfig("preprocess.sigma1", str(exc)) from None

    feats = _section(doc, "features")
    grid_doc = feats.get("grid", {})
    if not isinstance(grid_doc, dict):
        raise BadConfig("features.grid", "must be an object")
    grids = dict(base.grids)
    for name, g in grid_doc.items():
        key = f"features.grid.{name}"
        try:
            kind = ComponentKind(name)
        except ValueError:
            raise BadConfig(key, "unknown component") from None
        if (not isinstance(g, list) or len(g) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in g)):
            raise BadConfig(key, "must be [rows, cols] integers")
        w, h = COMPONENT_SIZES[kind]
        # codes image loses a one-pixel border on each side
        if not (1 <= g[0] <= h - 2 and 1 <= g[1] <= w - 2):
            raise BadConfig(key, f"grid must fit the {w - 2}x{h - 2} code image")
        grids[kind] = (g[0], g[1])

    geo = _section(doc, "geometry")
    margin_doc = geo.get("margins", {})
    if not isinstance(margin_doc, dict):
        raise BadConfig("geometry.margins", "must be an object")
    known = Margins.__dataclass_fields__
    mvals = {}
    for name, v in margin_doc.items():
        if name not in known:
            raise BadConfig(f"geometry.margins.{name}", "unknown key")
        if name == "face_pad":
            mvals[name] = _num(f"geometry.margins.{name}", v, lo=0.0)
        else:
            mvals[name] = _num(f"geometry.margins.{name}", v, positive=True)
    margins = replace(base.margins, **mvals)

    fus = _section(doc, "fusion")
    wdoc = fus.get("weights", {})
    if not isinstance(wdoc, dict):
        raise BadConfig("fusion.weights", "must be an object")
    weights = dict(base.weights)
    for bname, per_kind in wdoc.items():
        key = f"fusion.weights.{bname}"
        try:
            bucket = PoseBucket(bname)
        except ValueError:
            raise BadConfig(key, "unknown pose bucket") from None
        if not isinstance(per_kind, dict):
            raise BadConfig(key, "must be an object")
        parsed = {}
        for kname, v in per_kind.items():
            try:
                kind = ComponentKind(kname)
            except ValueError:
                raise BadConfig(f"{key}.{kname}", "unknown component") from None
            parsed[kind] = _num(f"{key}.{kname}", v)
        try:
            weights[bucket] = FusionWeights(bucket, parsed)
        except InvalidWeights as exc:
            raise BadConfig(key, str(exc)) from None

    match = _section(doc, "matcher")
    tau = _num("matcher.reject_tau", match.get("reject_tau", base.reject_tau), lo=0.0)
    if tau > 1:
        raise BadConfig("matcher.reject_tau", "must be in [0, 1]")

    return Config(
        threshold_degrees=threshold, flip_yaw=flip_yaw, flip_pitch=flip_pitch,
        normalize=normalize, grids=MappingProxyType(grids), margins=margins,
        weights=MappingProxyType(weights), reject_tau=tau,
    )


def load_config(path=None) -> Config:
    """Load a JSON config file; ``None`` yields the documented defaults."""
    if path is None:
        return DEFAULT_CONFIG
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc.strerror}") from None
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise BadConfig("<file>", f"invalid JSON: {exc}") from None
    return config_from_dict(doc)
