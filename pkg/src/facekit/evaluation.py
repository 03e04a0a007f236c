"""Rank-1 evaluation over a probe manifest, with occlusion and per-component ablation."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field

from .config import DEFAULT_CONFIG, Config
from .errors import FacekitError, IoFailure, NoCandidates
from .fusion import holistic_weights, identify, single_weights
from .geometry import ALL_COMPONENTS
from .landmarks import load_landmarks
from .pipeline import describe_capture, load_image, occlude
from .pose import ALL_BUCKETS, active_components


class ManifestError(FacekitError):
    pass


@dataclass(frozen=True)
class ProbeRow:
    image: str
    landmarks: str
    subject: str


def read_manifest(path) -> list[ProbeRow]:
    """Read ``image,landmarks,subject`` rows; relative paths resolve against the manifest."""
    base = os.path.dirname(os.path.abspath(path))
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["image", "landmarks", "subject"]:
                raise ManifestError(f"{path}: header must be image,landmarks,subject")
            rows = []
            for n, rec in enumerate(reader, start=2):
                img, lm, sid = (rec.get(k) or "" for k in ("image", "landmarks", "subject"))
                img, lm, sid = img.strip(), lm.strip(), sid.strip()
                if not (img and lm and sid):
                    raise ManifestError(f"{path}:{n}: empty field")
                rows.append(ProbeRow(os.path.join(base, img), os.path.join(base, lm), sid))
    except OSError as exc:
        raise IoFailure(f"cannot read manifest {path}: {exc.strerror}") from None
    return rows


@dataclass
class EvalRow:
    condition: str
    probes: int = 0
    correct: int = 0

    @property
    def rate(self):
        return None if self.probes == 0 else round(100.0 * self.correct / self.probes, 1)

    def as_dict(self):
        return {"condition": self.condition, "probes": self.probes,
                "correct": self.correct, "rate": self.rate}


@dataclass
class EvalReport:
    method: str
    occlusion: str
    rows: list = field(default_factory=list)

    def row(self, condition) -> EvalRow:
        for r in self.rows:
            if r.condition == condition:
                return r
        r = EvalRow(condition)
        self.rows.append(r)
        return r

    def as_dict(self):
        return {"method": self.method, "occlusion": self.occlusion,
                "rows": [r.as_dict() for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    def to_table(self) -> str:
        head = ("condition", "probes", "correct", "rate")
        body = [(r.condition, str(r.probes), str(r.correct),
                 "-" if r.rate is None else f"{r.rate:.1f}%") for r in self.rows]
        widths = [max(len(x) for x in col) for col in zip(head, *body)]
        lines = [f"method: {self.method}   occlusion: {self.occlusion}"]
        fmt = lambda cells: "  ".join(
            c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(cells, widths)))
        lines.append(fmt(head))
        lines.append("  ".join("-" * w for w in widths))
        lines.extend(fmt(b) for b in body)
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["condition", "probes", "correct", "rate"])
        for r in self.rows:
            w.writerow([r.condition, r.probes, r.correct, "" if r.rate is None else f"{r.rate:.1f}"])
        return buf.getvalue()


def _rank1(descs, bucket, gallery, weights, reject_tau):
    try:
        top = identify(descs, bucket, gallery, weights, top_k=1, reject_tau=reject_tau)
    except NoCandidates:
        return None
    return None if top[0].rejected else top[0].subject_id


def evaluate(gallery, probes, cfg: Config = DEFAULT_CONFIG, occlusion="none", fraction=0.5,
             ablate=False, holistic=False) -> EvalReport:
    """Identify every probe and tally rank-1 hits.

    Rows: the chosen method over all probes, the same per pose bucket and,
    with ``ablate``, one row per single component (scored only on probes
    whose pose keeps that component). Probes whose partition is empty or
    whose best match is rejected count as misses.
    """
    method = "holistic" if holistic else "fused"
    report = EvalReport(method, occlusion if occlusion else "none")
    overall = report.row(method)
    per_pose = {b: EvalRow(f"{method}@{b.value}") for b in ALL_BUCKETS}
    per_kind = {k: EvalRow(f"component:{k.value}") for k in ALL_COMPONENTS} if ablate else {}

    for p in probes:
        img = occlude(load_image(p.image), occlusion, fraction)
        cap = describe_capture(img, load_landmarks(p.landmarks), cfg)
        weights = holistic_weights(cap.bucket) if holistic else cfg.weights[cap.bucket]
        hit = _rank1(cap.descriptors, cap.bucket, gallery, weights, cfg.reject_tau) == p.subject
        for row in (overall, per_pose[cap.bucket]):
            row.probes += 1
            row.correct += hit
        for k, row in per_kind.items():
            if k in active_components(cap.bucket):
                got = _rank1(cap.descriptors, cap.bucket, gallery, single_weights(cap.bucket, k), cfg.reject_tau)
                row.probes += 1
                row.correct += got == p.subject

    report.rows.extend(r for r in per_pose.values() if r.probes)
    report.rows.extend(per_kind.values())
    return report
