"""xrayfeat: pretrained-CNN feature extraction and Grad-CAM heatmaps for
chest X-ray images, feeding the gbmkit classifier's feature CSV format."""

from .extract import ExtractResult, TOTAL_FEATURES, extract_features, feature_names
from .gradcam import compute_gradcam, gradcam_array, gradcam_files, normalize_cam
from .manifest import ManifestError, ManifestRow, load_image, load_manifest
from .networks import (
    DEFAULT_IMAGE_SIZE,
    FEATURE_WIDTHS,
    LAST_CONV_LAYER,
    NETWORKS,
    WeightsUnavailableError,
    build_classifier_model,
    build_feature_model,
    preprocess_batch,
)

__version__ = "0.1.0"
