"""Pose-partitioned gallery of enrolled descriptors and its JSON file format."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .config import DEFAULT_CONFIG, Config
from .errors import BadGrid, ConfigMismatch, CorruptGallery, IoFailure, UnsupportedVersion
from .geometry import ALL_COMPONENTS, ComponentKind
from .landmarks import LandmarkSet
from .lbp import BINS, LbpDescriptor
from .pipeline import describe_capture
from .pose import ALL_BUCKETS, PoseBucket, active_components

FORMAT_VERSION = 1
SLICE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GalleryEntry:
    subject_id: str
    pose: PoseBucket
    descriptors: Mapping[ComponentKind, LbpDescriptor]
    source_ref: str = ""

    def __post_init__(self):
        pose = PoseBucket(self.pose)
        object.__setattr__(self, "pose", pose)
        descs = {ComponentKind(k): v for k, v in dict(self.descriptors).items()}
        if set(descs) != set(active_components(pose)):
            got = sorted(k.value for k in descs)
            raise CorruptGallery(f"{self.subject_id}: {pose.value} entry has components {got}")
        for k, d in descs.items():
            if d.kind is not k:
                raise CorruptGallery(f"{self.subject_id}: descriptor {d.kind.value} stored under {k.value}")
        object.__setattr__(self, "descriptors", MappingProxyType(descs))

    def __eq__(self, other):
        if not isinstance(other, GalleryEntry):
            return NotImplemented
        return (self.subject_id == other.subject_id and self.pose is other.pose
                and self.source_ref == other.source_ref
                and dict(self.descriptors) == dict(other.descriptors))

    __hash__ = None


@dataclass(frozen=True)
class Gallery:
    config_fingerprint: str
    partitions: Mapping[PoseBucket, tuple] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        parts = {b: tuple(dict(self.partitions).get(b, ())) for b in ALL_BUCKETS}
        for b, entries in parts.items():
            for e in entries:
                if e.pose is not b:
                    raise CorruptGallery(f"{e.subject_id}: {e.pose.value} entry in {b.value} partition")
        object.__setattr__(self, "partitions", MappingProxyType(parts))

    @classmethod
    def empty(cls, cfg: Config = DEFAULT_CONFIG) -> "Gallery":
        return cls(cfg.fingerprint)

    def partition(self, bucket: PoseBucket) -> tuple:
        return self.partitions[PoseBucket(bucket)]

    def __len__(self):
        return sum(len(v) for v in self.partitions.values())

    def subjects(self) -> set[str]:
        return {e.subject_id for es in self.partitions.values() for e in es}

    def add(self, entry: GalleryEntry) -> "Gallery":
        parts = dict(self.partitions)
        parts[entry.pose] = parts[entry.pose] + (entry,)
        return Gallery(self.config_fingerprint, parts, self.format_version)


def partition_for(gallery: Gallery, bucket: PoseBucket) -> tuple:
    return gallery.partition(bucket)


def enroll(gallery: Gallery, subject_id: str, img, ls: LandmarkSet, cfg: Config = DEFAULT_CONFIG,
           source_ref: str | None = None, capture=None) -> Gallery:
    """Describe one capture and append it to the partition of its estimated pose.

    ``capture`` may carry an already computed :func:`describe_capture` result
    for the same image and landmarks.
    """
    if cfg.fingerprint != gallery.config_fingerprint:
        raise ConfigMismatch("configuration fingerprint differs from the gallery's")
    if not subject_id:
        raise ValueError("subject_id must be non-empty")
    cap = describe_capture(img, ls, cfg) if capture is None else capture
    ref = ls.image_ref if source_ref is None else source_ref
    return gallery.add(GalleryEntry(subject_id, cap.bucket, cap.descriptors, ref))


# --- serialization ----------------------------------------------------------

def gallery_to_dict(gallery: Gallery) -> dict:
    def entry_doc(e):
        return {
            "subject_id": e.subject_id,
            "source_ref": e.source_ref,
            "descriptors": {
                k.value: {"grid": list(e.descriptors[k].grid),
                          "values": e.descriptors[k].values.tolist()}
                for k in ALL_COMPONENTS if k in e.descriptors
            },
        }

    return {
        "format_version": gallery.format_version,
        "config_fingerprint": gallery.config_fingerprint,
        "partitions": {b.value: [entry_doc(e) for e in gallery.partition(b)] for b in ALL_BUCKETS},
    }


def _check_values(where, values, grid):
    v = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(v)) or np.any(v < 0):
        raise CorruptGallery(f"{where}: negative or non-finite histogram values")
    sums = v.reshape(grid[0] * grid[1], BINS).sum(axis=1)
    ok = (np.abs(sums - 1.0) <= SLICE_TOL) | (sums == 0.0)
    if not np.all(ok):
        raise CorruptGallery(f"{where}: histogram slice does not sum to 1")
    return v


def _parse_descriptor(where, kind, doc):
    if not isinstance(doc, dict) or set(doc) != {"grid", "values"}:
        raise CorruptGallery(f"{where}: descriptor must have 'grid' and 'values'")
    grid, values = doc["grid"], doc["values"]
    if (not isinstance(grid, list) or len(grid) != 2
            or not all(isinstance(g, int) and not isinstance(g, bool) and g > 0 for g in grid)):
        raise CorruptGallery(f"{where}: bad grid {grid!r}")
    if not isinstance(values, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in values):
        raise CorruptGallery(f"{where}: values must be a list of numbers")
    if len(values) != grid[0] * grid[1] * BINS:
        raise CorruptGallery(f"{where}: {len(values)} values for grid {grid}")
    try:
        return LbpDescriptor(kind, tuple(grid), _check_values(where, values, grid))
    except BadGrid as exc:
        raise CorruptGallery(f"{where}: {exc}") from None


def gallery_from_dict(doc) -> Gallery:
    if not isinstance(doc, dict):
        raise CorruptGallery("top level must be an object")
    version = doc.get("format_version")
    if isinstance(version, bool) or not isinstance(version, int):
        raise CorruptGallery("missing integer format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"format_version {version} (supported: {FORMAT_VERSION})")
    fp = doc.get("config_fingerprint")
    if not isinstance(fp, str) or not fp:
        raise CorruptGallery("missing config_fingerprint")
    parts_doc = doc.get("partitions")
    if not isinstance(parts_doc, dict):
        raise CorruptGallery("missing partitions")

    grids = {}
    parts = {}
    for name, entries in parts_doc.items():
        try:
            bucket = PoseBucket(name)
        except ValueError:
            raise CorruptGallery(f"unknown partition {name!r}") from None
        if not isinstance(entries, list):
            raise CorruptGallery(f"partition {name} must be a list")
        out = []
        for i, e in enumerate(entries):
            where = f"{name}[{i}]"
            if not isinstance(e, dict):
                raise CorruptGallery(f"{where}: entry must be an object")
            sid, ref, descs = e.get("subject_id"), e.get("source_ref", ""), e.get("descriptors")
            if not isinstance(sid, str) or not sid:
                raise CorruptGallery(f"{where}: subject_id must be a non-empty string")
            if not isinstance(ref, str):
                raise CorruptGallery(f"{where}: source_ref must be a string")
            if not isinstance(descs, dict):
                raise CorruptGallery(f"{where}: descriptors must be an object")
            parsed = {}
            for kname, ddoc in descs.items():
                try:
                    kind = ComponentKind(kname)
                except ValueError:
                    raise CorruptGallery(f"{where}: unknown component {kname!r}") from None
                d = _parse_descriptor(f"{where}.{kname}", kind, ddoc)
                if grids.setdefault(kind, d.grid) != d.grid:
                    raise CorruptGallery(f"{where}.{kname}: grid {d.grid} differs from {grids[kind]}")
                parsed[kind] = d
            out.append(GalleryEntry(sid, bucket, parsed, ref))
        parts[bucket] = tuple(out)
    return Gallery(fp, parts, version)


def save_gallery(gallery: Gallery, path):
    """Write the gallery atomically (temp file + rename)."""
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gallery-", suffix=".tmp")
    except OSError as exc:
        raise IoFailure(f"cannot write gallery {path}: {exc.strerror}") from None
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(gallery_to_dict(gallery), fh, separators=(",", ":"))
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise IoFailure(f"cannot write gallery {path}: {exc.strerror}") from None


def load_gallery(path) -> Gallery:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read gallery {path}: {exc.strerror}") from None
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptGallery(f"not valid JSON: {exc}") from None
    return gallery_from_dict(doc)
