"""Gradient-weighted class activation maps.

The heatmap is the ReLU of the gradient-weighted sum of the last
convolutional layer's activations, normalized to [0, 1] (an all-zero map
stays all-zero) and upsampled to the source image's dimensions. The
overlay blends a jet-colored heatmap over the original image.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .networks import (
    DEFAULT_IMAGE_SIZE,
    LAST_CONV_LAYER,
    build_classifier_model,
    preprocess_batch,
)

HEAT_ALPHA = 0.4


def normalize_cam(cam: np.ndarray) -> np.ndarray:
    """Clamp negatives and scale the peak to 1; a zero map stays zero."""
    cam = np.maximum(np.asarray(cam, dtype=np.float64), 0.0)
    peak = cam.max()
    if peak > 0:
        cam = cam / peak
    return cam


def compute_gradcam(model, network: str, batch: np.ndarray, target_class: int) -> np.ndarray:
    """Raw conv-resolution heatmap in [0, 1] for one preprocessed image."""
    import tensorflow as tf
    from tensorflow import keras

    conv_layer = model.get_layer(LAST_CONV_LAYER[network])
    grad_model = keras.Model(model.inputs, [conv_layer.output, model.output])
    inputs = tf.convert_to_tensor(batch)
    with tf.GradientTape() as tape:
        conv_out, preds = grad_model(inputs, training=False)
        score = preds[:, target_class]
    grads = tape.gradient(score, conv_out)
    weights = tf.reduce_mean(grads, axis=(1, 2))  # pooled gradient per channel
    cam = tf.einsum("bhwc,bc->bhw", conv_out, weights)
    return normalize_cam(np.asarray(cam)[0])


def upsample(cam: np.ndarray, size: tuple[int, int]) -> np.ndarray:
    """Bilinear upsampling to (width, height), staying in float."""
    img = Image.fromarray(cam.astype(np.float32), mode="F")
    return np.asarray(img.resize(size, Image.BILINEAR), dtype=np.float64)


def gradcam_array(
    model,
    network: str,
    image: Image.Image,
    target_class: int,
    image_size: int = DEFAULT_IMAGE_SIZE,
) -> np.ndarray:
    """Heatmap in [0, 1] with the same dimensions as ``image``."""
    rgb = image.convert("RGB")
    net_in = np.asarray(rgb.resize((image_size, image_size), Image.BILINEAR), dtype=np.float32)
    cam = compute_gradcam(model, network, preprocess_batch(network, net_in[None]), target_class)
    out = upsample(cam, rgb.size)
    # bilinear interpolation cannot overshoot the [0, 1] hull, but guard
    # against float dust anyway
    return np.clip(out, 0.0, 1.0)


def _jet_rgb(cam: np.ndarray) -> np.ndarray:
    from matplotlib import colormaps

    return (colormaps["jet"](cam)[..., :3] * 255).astype(np.uint8)


def gradcam_files(
    image_path,
    network: str,
    target_class: int,
    outdir,
    image_size: int = DEFAULT_IMAGE_SIZE,
    weights="imagenet",
    model=None,
) -> tuple[str, str]:
    """Write ``<stem>.heatmap.png`` and ``<stem>.overlay.png``; return paths."""
    if model is None:
        model = build_classifier_model(network, weights, image_size)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with Image.open(image_path) as img:
        original = img.convert("RGB")
        cam = gradcam_array(model, network, original, target_class, image_size)
        heat_rgb = _jet_rgb(cam)
        blended = (
            HEAT_ALPHA * heat_rgb.astype(np.float64)
            + (1.0 - HEAT_ALPHA) * np.asarray(original, dtype=np.float64)
        ).astype(np.uint8)
    stem = Path(image_path).stem
    heat_path = outdir / f"{stem}.heatmap.png"
    overlay_path = outdir / f"{stem}.overlay.png"
    Image.fromarray(heat_rgb).save(heat_path)
    Image.fromarray(blended).save(overlay_path)
    return str(heat_path), str(overlay_path)
