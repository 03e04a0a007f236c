"""``facekit`` command line: enroll, identify, pose, evaluate, demo-data.

Exit codes: 0 ok, 2 validation error, 3 I/O error, 4 no candidates.
Errors are reported on stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import __version__
from .config import load_config
from .errors import ConfigMismatch, FacekitError, IoFailure
from .evaluation import evaluate, read_manifest
from .fusion import identify
from .gallery import Gallery, enroll, load_gallery, save_gallery
from .landmarks import load_landmarks
from .pipeline import describe_capture, load_image, occlude
from .pose import bucket_pose, estimate_pose

EXIT_USAGE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _emit_error("UsageError", message)
        sys.exit(EXIT_USAGE)


def _emit_error(kind, message):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def _print_json(obj):
    sys.stdout.write(json.dumps(obj) + "\n")


def _fmt2(v):
    # "-0.00" reads oddly next to bucket names
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _load_or_create_gallery(path, cfg):
    if os.path.exists(path):
        return load_gallery(path)
    return Gallery.empty(cfg)


def cmd_enroll(args, cfg):
    if args.manifest:
        rows = [(r.image, r.landmarks, r.subject) for r in read_manifest(args.manifest)]
    else:
        missing = [f"--{n}" for n in ("image", "landmarks", "subject") if not getattr(args, n)]
        if missing:
            args.parser.error(f"missing {', '.join(missing)} (or use --manifest)")
        rows = [(args.image, args.landmarks, args.subject)]

    gallery = _load_or_create_gallery(args.gallery, cfg)
    for image, landmarks, subject in rows:
        img = load_image(image)
        ls = load_landmarks(landmarks)
        cap = describe_capture(img, ls, cfg)
        gallery = enroll(gallery, subject, img, ls, cfg, source_ref=os.path.basename(image), capture=cap)
        _print_json({
            "subject": subject,
            "pose": cap.bucket.value,
            "angles": {k: float(_fmt2(v)) for k, v in cap.angles.as_dict().items()},
            "components": [k.value for k in cap.descriptors],
        })
    save_gallery(gallery, args.gallery)
    return 0


def cmd_identify(args, cfg):
    gallery = load_gallery(args.gallery)
    img = occlude(load_image(args.image), args.occlude, args.occlude_fraction)
    cap = describe_capture(img, load_landmarks(args.landmarks), cfg)
    tau = cfg.reject_tau if args.tau is None else args.tau
    results = identify(cap.descriptors, cap.bucket, gallery, cfg.weights[cap.bucket],
                       top_k=args.topk, reject_tau=tau, fingerprint=cfg.fingerprint)
    for rank, m in enumerate(results, start=1):
        _print_json({
            "rank": rank,
            "subject": m.subject_id,
            "score": m.score,
            "pose": cap.bucket.value,
            "components": {k.value: v for k, v in m.component_scores.items()},
            "entry": m.entry_ref,
            "rejected": m.rejected,
        })
    return 0


def cmd_pose(args, cfg):
    ls = load_landmarks(args.landmarks)
    angles = estimate_pose(ls, cfg.flip_yaw, cfg.flip_pitch)
    bucket = bucket_pose(angles, cfg.threshold_degrees)
    sys.stdout.write(
        '{"pitch": %s, "yaw": %s, "roll": %s, "bucket": "%s"}\n'
        % (_fmt2(angles.pitch), _fmt2(angles.yaw), _fmt2(angles.roll), bucket.value))
    if args.figure:
        if not args.image:
            args.parser.error("--figure needs --image")
        from .plotting import plot_components

        plot_components(load_image(args.image), ls, args.figure, cfg.margins)
    return 0


def cmd_evaluate(args, cfg):
    gallery = load_gallery(args.gallery)
    if gallery.config_fingerprint != cfg.fingerprint:
        raise ConfigMismatch("configuration fingerprint differs from the gallery's")
    probes = read_manifest(args.probes)
    report = evaluate(gallery, probes, cfg, occlusion=args.occlude, fraction=args.occlude_fraction,
                      ablate=args.ablate, holistic=args.holistic)
    table, as_json = report.to_table(), report.to_json()
    sys.stdout.write(table + "\n")
    if args.out:
        try:
            os.makedirs(args.out, exist_ok=True)
            stem = os.path.join(args.out, "report")
            with open(stem + ".txt", "w") as fh:
                fh.write(table + "\n")
            with open(stem + ".json", "w") as fh:
                fh.write(as_json + "\n")
            with open(stem + ".csv", "w") as fh:
                fh.write(report.to_csv())
        except OSError as exc:
            raise IoFailure(f"cannot write report to {args.out}: {exc.strerror}") from None
        from .plotting import plot_report

        plot_report(report, stem + ".png")
        sys.stdout.write(f"wrote {stem}.{{txt,json,csv,png}}\n")
    else:
        sys.stdout.write(as_json + "\n")
    return 0


def cmd_demo_data(args, cfg):
    from .synthetic import make_dataset

    try:
        enroll_csv, probes_csv = make_dataset(
            args.out, n_subjects=args.subjects, captures=args.captures, probes=args.probes,
            poses=tuple(args.poses.split(",")), seed=args.seed, noise=args.noise, jitter=args.jitter)
    except OSError as exc:
        raise IoFailure(f"cannot write demo data to {args.out}: {exc.strerror}") from None
    _print_json({"enroll": enroll_csv, "probes": probes_csv})
    return 0


def _occlusion_flags(p):
    p.add_argument("--occlude", choices=("none", "top", "bottom"), default="none",
                   help="zero the top (sunglasses) or bottom (scarf) of the probe image")
    p.add_argument("--occlude-fraction", type=float, default=0.5, metavar="F",
                   help="fraction of image rows masked by --occlude (default 0.5)")


def build_parser():
    parser = _Parser(prog="facekit", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--version", action="version", version=f"facekit {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enroll", help="add a capture to the gallery")
    p.add_argument("--gallery", required=True)
    p.add_argument("--image")
    p.add_argument("--landmarks")
    p.add_argument("--subject")
    p.add_argument("--manifest", help="CSV (image,landmarks,subject) to enroll in one go")
    p.set_defaults(func=cmd_enroll, parser=p)

    p = sub.add_parser("identify", help="rank gallery subjects against a probe")
    p.add_argument("--gallery", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--landmarks", required=True)
    p.add_argument("--topk", type=int, default=5)
    p.add_argument("--tau", type=float, default=None, help="reject threshold on the fused score")
    _occlusion_flags(p)
    p.set_defaults(func=cmd_identify, parser=p)

    p = sub.add_parser("pose", help="print head pose angles and bucket")
    p.add_argument("--landmarks", required=True)
    p.add_argument("--image", help="image for --figure")
    p.add_argument("--figure", help="write a PNG with landmarks and component boxes")
    p.set_defaults(func=cmd_pose, parser=p)

    p = sub.add_parser("evaluate", help="rank-1 evaluation over a probe manifest")
    p.add_argument("--gallery", required=True)
    p.add_argument("--probes", required=True)
    _occlusion_flags(p)
    p.add_argument("--ablate", action="store_true", help="add one row per single component")
    p.add_argument("--holistic", action="store_true", help="face-only matching")
    p.add_argument("--out", help="directory for report.{txt,json,csv,png}")
    p.set_defaults(func=cmd_evaluate, parser=p)

    p = sub.add_parser("demo-data", help="write a synthetic desk-scale dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--subjects", type=int, default=10)
    p.add_argument("--captures", type=int, default=2)
    p.add_argument("--probes", type=int, default=1)
    p.add_argument("--poses", default="frontal", help="comma list of frontal,left,right,up,down")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=3.0)
    p.add_argument("--jitter", type=float, default=3.0)
    p.set_defaults(func=cmd_demo_data, parser=p)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "topk", 1) is not None and getattr(args, "topk", 1) < 1:
        parser.error("--topk must be >= 1")
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except FacekitError as exc:
        _emit_error(exc.kind, str(exc))
        return exc.exit_code
    except ValueError as exc:
        _emit_error("ValueError", str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
