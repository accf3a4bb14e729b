"""Image manifests: one ``path,label`` row per image, order preserved."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from PIL import Image


class ManifestError(ValueError):
    pass


@dataclass
class ManifestRow:
    path: str
    label: str


def load_manifest(path) -> list[ManifestRow]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ManifestError(f"{path}: empty manifest")
        if header != ["path", "label"]:
            raise ManifestError(f"{path}: header must be 'path,label', got {header}")
        rows = []
        for lineno, cells in enumerate(reader, start=2):
            if len(cells) != 2:
                raise ManifestError(f"{path}: line {lineno}: expected 2 cells, got {len(cells)}")
            if not cells[0] or not cells[1]:
                raise ManifestError(f"{path}: line {lineno}: empty path or label")
            rows.append(ManifestRow(cells[0], cells[1]))
    if not rows:
        raise ManifestError(f"{path}: no image rows")
    return rows


def load_image(path, size: int) -> np.ndarray:
    """Decode, convert to RGB, and resize; float32 in [0, 255]."""
    with Image.open(path) as img:
        resized = img.convert("RGB").resize((size, size), Image.BILINEAR)
    return np.asarray(resized, dtype=np.float32)
