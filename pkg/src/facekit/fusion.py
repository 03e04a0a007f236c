"""Component similarity scores, weighted-sum fusion and ranked identification."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .errors import (
    ConfigMismatch,
    DescriptorMismatch,
    InvalidWeights,
    LengthMismatch,
    MissingScore,
    NoCandidates,
)
from .geometry import ALL_COMPONENTS, ComponentKind
from .lbp import LbpDescriptor
from .pose import PoseBucket, active_components

CHI_EPS = 1e-12
WEIGHT_TOL = 1e-9

# single-component rank-1 rates used as default fusion priors (face = holistic row)
COMPONENT_RATES = {
    ComponentKind.FACE: 85.0,
    ComponentKind.LEFT_EYE: 60.0,
    ComponentKind.RIGHT_EYE: 61.0,
    ComponentKind.NOSE: 65.0,
    ComponentKind.MOUTH_CHIN: 70.0,
    ComponentKind.FOREHEAD_EYEBROW: 72.0,
}


def chi_square(h1, h2) -> float:
    a = np.asarray(h1, dtype=np.float64).ravel()
    b = np.asarray(h2, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise LengthMismatch(f"{a.size} vs {b.size}")
    diff = a - b
    return float(np.sum(diff * diff / (a + b + CHI_EPS)))


def component_score(probe: LbpDescriptor, ref: LbpDescriptor) -> float:
    """Similarity ``1 / (1 + chi2)`` in (0, 1]; exactly 1 for identical descriptors."""
    if probe.kind != ref.kind or probe.grid != ref.grid:
        raise DescriptorMismatch(
            f"{probe.kind.value}{probe.grid} vs {ref.kind.value}{ref.grid}")
    return 1.0 / (1.0 + chi_square(probe.values, ref.values))


@dataclass(frozen=True)
class FusionWeights:
    """Per-component weights for one pose bucket.

    Weights lie in [0, 1], sum to one over the bucket's active components,
    and are zero for the inactive ones. Kinds left out default to zero.
    """

    bucket: PoseBucket
    weights: Mapping[ComponentKind, float]

    def __post_init__(self):
        bucket = PoseBucket(self.bucket)
        w = {k: 0.0 for k in ALL_COMPONENTS}
        for k, v in dict(self.weights).items():
            w[ComponentKind(k)] = float(v)
        active = active_components(bucket)
        for k, v in w.items():
            if not (0.0 <= v <= 1.0):
                raise InvalidWeights(f"{bucket.value}.{k.value}={v} outside [0, 1]")
            if k not in active and v != 0.0:
                raise InvalidWeights(f"{bucket.value}.{k.value} is inactive for this pose but has weight {v}")
        total = sum(w[k] for k in active)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise InvalidWeights(f"{bucket.value} weights sum to {total!r}, expected 1")
        object.__setattr__(self, "bucket", bucket)
        object.__setattr__(self, "weights", MappingProxyType(w))

    def __getitem__(self, kind) -> float:
        return self.weights[ComponentKind(kind)]

    def used(self) -> list[ComponentKind]:
        """Kinds with positive weight, in canonical order."""
        return [k for k in ALL_COMPONENTS if self.weights[k] > 0.0]

    def as_dict(self):
        return {k.value: v for k, v in self.weights.items()}


def default_weights(bucket: PoseBucket) -> FusionWeights:
    active = active_components(bucket)
    total = sum(COMPONENT_RATES[k] for k in active)
    return FusionWeights(bucket, {k: COMPONENT_RATES[k] / total for k in active})


def single_weights(bucket: PoseBucket, kind: ComponentKind) -> FusionWeights:
    return FusionWeights(bucket, {kind: 1.0})


def holistic_weights(bucket: PoseBucket) -> FusionWeights:
    return single_weights(bucket, ComponentKind.FACE)


def fuse(scores: Mapping[ComponentKind, float], weights: FusionWeights) -> float:
    total = 0.0
    for k in weights.used():
        if k not in scores:
            raise MissingScore(k.value)
        total += weights[k] * scores[k]
    return total


@dataclass(frozen=True)
class MatchResult:
    subject_id: str
    score: float
    component_scores: Mapping[ComponentKind, float]
    entry_ref: str
    rejected: bool = False

    def as_dict(self):
        return {
            "subject": self.subject_id,
            "score": self.score,
            "components": {k.value: v for k, v in self.component_scores.items()},
            "entry": self.entry_ref,
            "rejected": self.rejected,
        }


def score_entry(probe: Mapping[ComponentKind, LbpDescriptor], entry, weights: FusionWeights):
    comp = {}
    for k in weights.used():
        if k not in probe:
            raise MissingScore(k.value)
        comp[k] = component_score(probe[k], entry.descriptors[k])
    return fuse(comp, weights), comp


def identify(
    probe_descriptors: Mapping[ComponentKind, LbpDescriptor],
    bucket: PoseBucket,
    gallery,
    weights: FusionWeights | None = None,
    top_k: int | None = 5,
    reject_tau: float = 0.0,
    fingerprint: str | None = None,
    on_visit: Callable | None = None,
) -> list[MatchResult]:
    """Rank enrolled subjects against a probe using only the probe's pose partition.

    Each subject is represented by its best-scoring entry. Results are
    ordered by descending fused score, ties by ascending subject id, and
    flagged ``rejected`` when the score falls below ``reject_tau``.
    ``on_visit`` is called with every gallery entry that gets scored.
    """
    bucket = PoseBucket(bucket)
    if fingerprint is not None and fingerprint != gallery.config_fingerprint:
        raise ConfigMismatch("probe configuration differs from the gallery's")
    if weights is None:
        weights = default_weights(bucket)
    elif weights.bucket is not bucket:
        weights = FusionWeights(bucket, weights.weights)

    entries = gallery.partition(bucket)
    if not entries:
        raise NoCandidates(f"no enrolled entries in the {bucket.value} partition")

    best = {}
    for entry in entries:
        if on_visit is not None:
            on_visit(entry)
        s, comp = score_entry(probe_descriptors, entry, weights)
        cur = best.get(entry.subject_id)
        if cur is None or s > cur.score:
            best[entry.subject_id] = MatchResult(
                entry.subject_id, s, MappingProxyType(comp), entry.source_ref)

    ranked = sorted(best.values(), key=lambda m: (-m.score, m.subject_id))
    if top_k is not None:
        ranked = ranked[:top_k]
    return [
        MatchResult(m.subject_id, m.score, m.component_scores, m.entry_ref, m.score < reject_tau)
        for m in ranked
    ]
