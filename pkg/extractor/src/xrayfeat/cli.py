"""Command line: batch feature extraction and Grad-CAM rendering.

Exit codes: 0 success, 2 usage error, 3 data/weights error.
"""
from __future__ import annotations

import argparse
import sys

from .extract import extract_features
from .gradcam import gradcam_files
from .manifest import ManifestError, load_manifest
from .networks import DEFAULT_IMAGE_SIZE, NETWORKS, WeightsUnavailableError


def cmd_extract(args) -> int:
    rows = load_manifest(args.manifest)
    result = extract_features(
        rows,
        args.output,
        image_size=args.image_size,
        batch_size=args.batch_size,
        weights=args.weights,
    )
    print(f"extracted {result.written} rows -> {args.output}")
    if result.skipped:
        print(f"skipped {len(result.skipped)} unreadable image(s); see {args.output}.skips.csv")
    return 0


def cmd_gradcam(args) -> int:
    heat, overlay = gradcam_files(
        args.image,
        args.network,
        args.target_class,
        args.outdir,
        image_size=args.image_size,
        weights=args.weights,
    )
    print(f"wrote {heat} and {overlay}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xrayfeat",
        description="DenseNet169+MobileNet feature extraction and Grad-CAM for chest X-rays",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="write the 2688-column feature CSV for a manifest")
    p.add_argument("--manifest", required=True, help="CSV with header path,label")
    p.add_argument("--output", required=True, help="feature CSV path")
    p.add_argument("--image-size", type=int, default=DEFAULT_IMAGE_SIZE)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument(
        "--weights",
        default="imagenet",
        help="imagenet (default), random (untrained smoke runs), or a local weights file",
    )
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("gradcam", help="render heatmap + overlay for one image")
    p.add_argument("--image", required=True)
    p.add_argument("--network", required=True, choices=NETWORKS)
    p.add_argument("--target-class", type=int, default=0)
    p.add_argument("--outdir", required=True)
    p.add_argument("--image-size", type=int, default=DEFAULT_IMAGE_SIZE)
    p.add_argument("--weights", default="imagenet")
    p.set_defaults(func=cmd_gradcam)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except WeightsUnavailableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
