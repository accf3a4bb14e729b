"""Batch feature extraction into the classifier toolkit's CSV format.

Output rows follow manifest order regardless of batching: columns 0-1663
are the DenseNet169 features, 1664-2687 the MobileNet features. Images
that cannot be read are skipped with a warning and recorded in a skip
manifest next to the output; they are never zero-filled, since silent
zero rows would poison downstream chi-squared scores.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .manifest import ManifestRow, load_image
from .networks import DEFAULT_IMAGE_SIZE, FEATURE_WIDTHS, build_feature_model, preprocess_batch

logger = logging.getLogger(__name__)

FEATURE_ORDER = ("densenet169", "mobilenet")
TOTAL_FEATURES = sum(FEATURE_WIDTHS[n] for n in FEATURE_ORDER)


def feature_names() -> list[str]:
    names = []
    for network in FEATURE_ORDER:
        names.extend(f"{network}_{i:04d}" for i in range(FEATURE_WIDTHS[network]))
    return names


@dataclass
class ExtractResult:
    written: int
    skipped: list[tuple[str, str]] = field(default_factory=list)


def extract_features(
    rows: list[ManifestRow],
    output_csv,
    image_size: int = DEFAULT_IMAGE_SIZE,
    batch_size: int = 16,
    weights="imagenet",
    models=None,
) -> ExtractResult:
    """Run both trunks over every manifest image and write the feature CSV.

    ``models`` may supply prebuilt (densenet169, mobilenet) feature models
    to skip construction (tests use randomly initialized ones).
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    if models is None:
        models = tuple(build_feature_model(n, weights, image_size) for n in FEATURE_ORDER)

    loaded: list[tuple[str, np.ndarray]] = []
    skipped: list[tuple[str, str]] = []
    for row in rows:
        try:
            loaded.append((row.label, load_image(row.path, image_size)))
        except Exception as exc:  # unreadable or undecodable image
            logger.warning("skipping %s: %s", row.path, exc)
            skipped.append((row.path, str(exc)))

    names = feature_names()
    with open(output_csv, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("label," + ",".join(names) + "\n")
        for start in range(0, len(loaded), batch_size):
            chunk = loaded[start : start + batch_size]
            batch = np.stack([img for _, img in chunk])
            parts = []
            for network, model in zip(FEATURE_ORDER, models):
                out = np.asarray(model(preprocess_batch(network, batch), training=False))
                if out.shape != (len(chunk), FEATURE_WIDTHS[network]):
                    raise RuntimeError(
                        f"{network} produced shape {out.shape}, expected "
                        f"({len(chunk)}, {FEATURE_WIDTHS[network]})"
                    )
                parts.append(out.astype(np.float64))
            features = np.concatenate(parts, axis=1)
            if features.min() < 0:
                raise RuntimeError(
                    "negative feature values out of the pooled trunks; "
                    "downstream chi-squared selection requires non-negative inputs"
                )
            for (label, _), vec in zip(chunk, features):
                fh.write(label + "," + ",".join(repr(v) for v in vec.tolist()) + "\n")

    if skipped:
        skip_path = str(output_csv) + ".skips.csv"
        with open(skip_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("path,reason\n")
            for path, reason in skipped:
                fh.write(f"{path},{reason.replace(',', ';')}\n")
        logger.warning("%d image(s) skipped; see %s", len(skipped), skip_path)
    return ExtractResult(written=len(loaded), skipped=skipped)
