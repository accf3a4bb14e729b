import os

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "3")

import numpy as np
import pytest
from PIL import Image

# small input side keeps the randomly initialized trunks fast; the
# pooled feature widths do not depend on it
IMAGE_SIZE = 96


@pytest.fixture(scope="session")
def feature_models():
    from xrayfeat import build_feature_model

    return tuple(
        build_feature_model(name, weights=None, image_size=IMAGE_SIZE)
        for name in ("densenet169", "mobilenet")
    )


@pytest.fixture(scope="session")
def mobilenet_classifier():
    from xrayfeat import build_classifier_model

    return build_classifier_model("mobilenet", weights=None, image_size=IMAGE_SIZE)


@pytest.fixture(scope="session")
def sample_images(tmp_path_factory):
    """Three grayscale PNGs with different sizes, as X-ray stand-ins."""
    root = tmp_path_factory.mktemp("imgs")
    rng = np.random.default_rng(7)
    paths = []
    for i, (w, h) in enumerate([(64, 48), (80, 80), (50, 70)]):
        gradient = np.linspace(0, 200, w, dtype=np.float64)[None, :]
        noise = rng.random((h, w)) * 55
        img = Image.fromarray((gradient + noise).astype(np.uint8), mode="L")
        path = root / f"xray{i}.png"
        img.save(path)
        paths.append(str(path))
    return paths


def write_manifest(path, rows):
    lines = ["path,label"] + [f"{p},{label}" for p, label in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)
