"""gbmkit: chi-squared feature selection, a GOSS/EFB gradient-boosting
classifier, and a stratified cross-validation harness for labeled
feature-matrix CSVs."""

from .binning import BinnedFeature, BinnedMatrix, bin_features
from .booster import (
    BoosterModel,
    BoosterParams,
    load_model,
    predict,
    predict_labels,
    save_model,
    train,
)
from .crossval import CvReport, FoldResult, cross_validate, fold_seed
from .dataset import (
    Dataset,
    FoldSplit,
    load_feature_csv,
    save_feature_csv,
    stratified_holdout,
    stratified_kfold,
    take_rows,
)
from .efb import BoostingDesign, FeatureBundle, efb_bundle, singleton_bundles
from .errors import ConfigError, DataError, GbmkitError, ModelFormatError, StratificationError
from .goss import GossConfig, GossSample, SplitPartition, goss_sample, variance_gain
from .metrics import (
    ConfusionMatrix,
    MetricSet,
    binary_metrics,
    confusion_matrix,
    multiclass_metrics,
)
from .selection import ChiSquareScores, FeatureMask, apply_mask, chi2_scores, select_k_best
from .tree import LEAF_REG, Tree, grow_tree

__version__ = "0.1.0"

__all__ = [
    "BinnedFeature",
    "BinnedMatrix",
    "BoosterModel",
    "BoosterParams",
    "BoostingDesign",
    "ChiSquareScores",
    "ConfigError",
    "ConfusionMatrix",
    "CvReport",
    "DataError",
    "Dataset",
    "FeatureBundle",
    "FeatureMask",
    "FoldResult",
    "FoldSplit",
    "GbmkitError",
    "GossConfig",
    "GossSample",
    "LEAF_REG",
    "MetricSet",
    "ModelFormatError",
    "SplitPartition",
    "StratificationError",
    "Tree",
    "apply_mask",
    "bin_features",
    "binary_metrics",
    "chi2_scores",
    "confusion_matrix",
    "cross_validate",
    "efb_bundle",
    "fold_seed",
    "goss_sample",
    "grow_tree",
    "load_feature_csv",
    "load_model",
    "multiclass_metrics",
    "predict",
    "predict_labels",
    "save_feature_csv",
    "save_model",
    "select_k_best",
    "singleton_bundles",
    "stratified_holdout",
    "stratified_kfold",
    "take_rows",
    "train",
    "variance_gain",
]
