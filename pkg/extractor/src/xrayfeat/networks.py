"""Wrappers around the two backbone networks.

DenseNet169's pooled trunk yields 1664 features per image and MobileNet's
yields 1024; concatenated they form the 2688-column feature vector the
downstream classifier consumes. Each network gets its own published input
preprocessing.
"""
from __future__ import annotations

import os

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "3")

import numpy as np

NETWORKS = ("densenet169", "mobilenet")
FEATURE_WIDTHS = {"densenet169": 1664, "mobilenet": 1024}
LAST_CONV_LAYER = {"densenet169": "relu", "mobilenet": "conv_pw_13_relu"}
DEFAULT_IMAGE_SIZE = 224


class WeightsUnavailableError(RuntimeError):
    """Pretrained weights could not be loaded (typically: no network access)."""


def _check_network(network: str) -> None:
    if network not in NETWORKS:
        raise ValueError(f"unknown network {network!r}; expected one of {NETWORKS}")


def resolve_weights(weights: str | None):
    """Map the CLI spelling to the Keras ``weights`` argument."""
    if weights in (None, "random", "none"):
        return None
    return weights  # "imagenet" or a local weights file


def _application(network: str):
    from tensorflow.keras import applications

    return {"densenet169": applications.DenseNet169, "mobilenet": applications.MobileNet}[network]


def build_feature_model(network: str, weights="imagenet", image_size: int = DEFAULT_IMAGE_SIZE):
    """Convolutional trunk with global average pooling on top."""
    _check_network(network)
    try:
        return _application(network)(
            include_top=False,
            weights=resolve_weights(weights),
            input_shape=(image_size, image_size, 3),
            pooling="avg",
        )
    except Exception as exc:  # weight download/read failures
        raise WeightsUnavailableError(
            f"could not build {network} with weights={weights!r}: {exc}. "
            "Pass --weights random for untrained smoke runs or --weights "
            "/path/to/file.h5 for locally stored weights."
        ) from exc


def build_classifier_model(network: str, weights="imagenet", image_size: int = DEFAULT_IMAGE_SIZE):
    """Full network including the classification head (used by Grad-CAM)."""
    _check_network(network)
    try:
        return _application(network)(
            include_top=True,
            weights=resolve_weights(weights),
            input_shape=(image_size, image_size, 3),
        )
    except Exception as exc:
        raise WeightsUnavailableError(
            f"could not build {network} with weights={weights!r}: {exc}. "
            "Pass --weights random for untrained smoke runs or --weights "
            "/path/to/file.h5 for locally stored weights."
        ) from exc


def preprocess_batch(network: str, batch: np.ndarray) -> np.ndarray:
    """Apply the network's published input normalization.

    ``batch`` is float32 RGB in [0, 255], shape (n, h, w, 3); a copy is
    normalized so the caller's buffer survives for the other network.
    """
    _check_network(network)
    from tensorflow.keras.applications import densenet, mobilenet

    fn = {"densenet169": densenet.preprocess_input, "mobilenet": mobilenet.preprocess_input}
    return fn[network](batch.astype(np.float32, copy=True))
