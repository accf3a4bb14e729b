"""Cross-validation harness: per-fold selection + training + scoring.

Feature selection is re-fit on each fold's training rows only, so no
information from the held-out rows leaks into the mask. Every fold gets
its own seed derived from (run seed, fold id), which keeps folds
independent and the whole run reproducible.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .booster import BoosterParams, predict, train
from .dataset import Dataset, FoldSplit, stratified_holdout, stratified_kfold, take_rows
from .errors import ConfigError
from .metrics import ConfusionMatrix, MetricSet, binary_metrics, confusion_matrix, multiclass_metrics
from .selection import apply_mask, chi2_scores, select_k_best

METRIC_NAMES = ("sensitivity", "specificity", "precision", "f1", "accuracy")


@dataclass
class FoldResult:
    fold_id: int
    metrics: MetricSet
    confusion: ConfusionMatrix


@dataclass
class CvReport:
    """Per-fold and aggregate results plus the configuration echo."""

    mode: str
    folds: list[FoldResult]
    average: MetricSet
    pooled: ConfusionMatrix
    config: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "config": self.config,
            "label_names": list(self.pooled.label_names),
            "folds": [
                {
                    "fold": fr.fold_id,
                    "metrics": fr.metrics.as_dict(),
                    "degenerate": list(fr.metrics.degenerate),
                    "confusion": fr.confusion.counts.tolist(),
                }
                for fr in self.folds
            ],
            "average": self.average.as_dict(),
            "average_degenerate": list(self.average.degenerate),
            "pooled_confusion": self.pooled.counts.tolist(),
        }

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    def write_csv(self, path) -> None:
        """Flat per-fold table with a trailing average row."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("fold," + ",".join(METRIC_NAMES) + "\n")
            for i, fr in enumerate(self.folds, start=1):
                row = fr.metrics.as_dict()
                fh.write(str(i) + "," + ",".join(repr(row[k]) for k in METRIC_NAMES) + "\n")
            avg = self.average.as_dict()
            fh.write("average," + ",".join(repr(avg[k]) for k in METRIC_NAMES) + "\n")


def fold_seed(seed: int, fold_id: int) -> int:
    """Stable per-fold seed derived from the run seed."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(fold_id),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _default_fit_predict(
    train_ds: Dataset,
    test_ds: Dataset,
    params: BoosterParams,
    seed: int,
    selection_k: int | None,
    n_threads: int,
) -> np.ndarray:
    if selection_k is not None:
        mask = select_k_best(chi2_scores(train_ds), selection_k)
        train_ds = apply_mask(train_ds, mask)
        test_ds = apply_mask(test_ds, mask)
    model = train(train_ds, replace(params, seed=seed), n_threads=n_threads)
    return np.argmax(predict(model, test_ds.features), axis=1)


def cross_validate(
    dataset: Dataset,
    params: BoosterParams,
    selection_k: int | None = None,
    folds: int = 5,
    seed: int = 0,
    positive_class: int = 0,
    holdout: float | None = None,
    n_threads: int = 1,
    fit_predict=None,
) -> CvReport:
    """Evaluate the select-train-predict pipeline fold by fold.

    ``holdout`` switches to a single stratified split with that test
    fraction; the report's ``mode`` records which protocol ran.
    ``fit_predict(train_ds, test_ds, params, seed)`` can be swapped out
    to test the harness with a stub classifier.
    """
    if holdout is not None:
        splits: list[FoldSplit] = [stratified_holdout(dataset, holdout, seed)]
        mode = "holdout"
    else:
        splits = stratified_kfold(dataset, folds, seed)
        mode = "cv"
    k_classes = len(dataset.label_names)
    if k_classes == 2 and positive_class not in (0, 1):
        raise ConfigError(f"positive class must be 0 or 1, got {positive_class}")

    if fit_predict is None:
        def fit_predict(tr, te, p, s):
            return _default_fit_predict(tr, te, p, s, selection_k, n_threads)

    results: list[FoldResult] = []
    for split in splits:
        tr = take_rows(dataset, split.train_indices)
        te = take_rows(dataset, split.test_indices)
        y_pred = np.asarray(fit_predict(tr, te, params, fold_seed(seed, split.fold_id)))
        cm = confusion_matrix(te.labels, y_pred, k_classes, dataset.label_names)
        if k_classes == 2:
            ms = binary_metrics(cm, positive=positive_class)
        else:
            ms = multiclass_metrics(cm)
        results.append(FoldResult(split.fold_id, ms, cm))

    averages = {
        name: sum(getattr(fr.metrics, name) for fr in results) / len(results)
        for name in METRIC_NAMES
    }
    degenerate = tuple(sorted({name for fr in results for name in fr.metrics.degenerate}))
    average = MetricSet(degenerate=degenerate, **averages)
    pooled_counts = np.sum([fr.confusion.counts for fr in results], axis=0)
    pooled = ConfusionMatrix(pooled_counts, dataset.label_names)
    config = {
        "mode": mode,
        "folds": len(splits),
        "seed": seed,
        "selection_k": selection_k,
        "positive_class": positive_class if k_classes == 2 else None,
        "holdout": holdout,
        "params": params.to_dict(),
    }
    return CvReport(mode, results, average, pooled, config)
