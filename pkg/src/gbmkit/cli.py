"""Command-line pipeline: select, train, cv, predict.

Exit codes: 0 success, 2 usage or configuration error, 3 data error,
4 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .booster import BoosterParams, load_model, predict, save_model, train
from .crossval import cross_validate
from .dataset import load_feature_csv, save_feature_csv
from .errors import ConfigError, DataError, GbmkitError
from .goss import GossConfig
from .selection import apply_mask, chi2_scores, select_k_best, write_scores_csv

CONFIG_KEYS = frozenset(
    {
        "learning_rate",
        "num_iterations",
        "max_leaves",
        "max_depth",
        "min_data_in_leaf",
        "goss_top_rate",
        "goss_other_rate",
        "max_bins",
        "efb_enabled",
        "efb_max_conflict",
        "objective",
        "selection_k",
        "folds",
        "seed",
    }
)


@dataclass
class PipelineConfig:
    """Run configuration; the defaults are the reference settings."""

    learning_rate: float = 0.24
    num_iterations: int = 250
    max_leaves: int = 105
    max_depth: int = 7
    min_data_in_leaf: int = 40
    goss_top_rate: float = 0.2
    goss_other_rate: float = 0.1
    max_bins: int = 255
    efb_enabled: bool = True
    efb_max_conflict: int = 0
    objective: str | None = None
    selection_k: int | None = 2000
    folds: int = 5
    seed: int = 0

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineConfig":
        unknown = sorted(set(doc) - CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(f"bad config document: {exc}") from None

    def booster_params(self, n_classes: int) -> BoosterParams:
        objective = self.objective
        if objective is None:
            objective = "binary_logistic" if n_classes == 2 else "multiclass_softmax"
        return BoosterParams(
            learning_rate=self.learning_rate,
            num_iterations=self.num_iterations,
            max_leaves=self.max_leaves,
            max_depth=self.max_depth,
            min_data_in_leaf=self.min_data_in_leaf,
            goss=GossConfig(self.goss_top_rate, self.goss_other_rate),
            max_bins=self.max_bins,
            efb_enabled=self.efb_enabled,
            efb_max_conflict=self.efb_max_conflict,
            seed=self.seed,
            objective=objective,
        )


def load_config(path) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return PipelineConfig.from_dict(doc)


def cmd_select(args) -> int:
    if args.k < 1:
        raise ConfigError(f"--k must be >= 1, got {args.k}")
    dataset = load_feature_csv(args.input)
    scores = chi2_scores(dataset)
    mask = select_k_best(scores, args.k)
    save_feature_csv(apply_mask(dataset, mask), args.output)
    if args.scores:
        write_scores_csv(scores, dataset.feature_names, args.scores)
    print(f"selected {mask.k} of {dataset.n_features} features -> {args.output}")
    return 0


def cmd_train(args) -> int:
    dataset = load_feature_csv(args.input)
    config = load_config(args.config)
    params = config.booster_params(len(dataset.label_names))
    model = train(dataset, params, n_threads=args.threads)
    save_model(model, args.model_out)
    print(
        f"trained {len(model.trees)} trees "
        f"({params.num_iterations} iterations x {model.trees_per_iteration} per iteration) "
        f"on {dataset.n_samples} rows, {len(model.label_names)} classes"
    )
    print("effective config: " + json.dumps(params.to_dict(), sort_keys=True))
    return 0


def cmd_cv(args) -> int:
    dataset = load_feature_csv(args.input)
    config = load_config(args.config)
    folds = args.folds if args.folds is not None else config.folds
    seed = args.seed if args.seed is not None else config.seed
    params = config.booster_params(len(dataset.label_names))
    positive = 0
    if args.positive_class is not None:
        if args.positive_class not in dataset.label_names:
            raise ConfigError(
                f"--positive-class {args.positive_class!r} not among labels {dataset.label_names}"
            )
        positive = dataset.label_names.index(args.positive_class)
    report = cross_validate(
        dataset,
        params,
        selection_k=config.selection_k,
        folds=folds,
        seed=seed,
        positive_class=positive,
        holdout=args.holdout,
        n_threads=args.threads,
    )
    report.write_json(args.report)
    csv_path = args.report_csv or str(Path(args.report).with_suffix(".csv"))
    report.write_csv(csv_path)
    print(
        f"{report.mode} over {len(report.folds)} fold(s): "
        f"average accuracy {report.average.accuracy:.4f} -> {args.report}"
    )
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    dataset = load_feature_csv(args.input)
    probs = predict(model, dataset.features)
    pred = np.argmax(probs, axis=1)
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("row,predicted_label," + ",".join(f"p_{n}" for n in model.label_names) + "\n")
        for i in range(probs.shape[0]):
            cells = [str(i), model.label_names[pred[i]]]
            cells.extend(repr(v) for v in probs[i].tolist())
            fh.write(",".join(cells) + "\n")
    print(f"wrote {probs.shape[0]} predictions -> {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbmkit",
        description="chi-squared feature selection, GOSS/EFB boosting, and k-fold evaluation "
        "over labeled feature CSVs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="score features and keep the best k columns")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--scores", help="optional CSV of per-feature scores")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("train", help="train a boosted model and serialize it")
    p.add_argument("--input", required=True)
    p.add_argument("--config", help="JSON config; missing keys fall back to defaults")
    p.add_argument("--model-out", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cv", help="stratified cross-validation with per-fold selection")
    p.add_argument("--input", required=True)
    p.add_argument("--config")
    p.add_argument("--folds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--report", required=True, help="JSON report path")
    p.add_argument("--report-csv", help="CSV report path (defaults to the JSON path with .csv)")
    p.add_argument("--holdout", type=float, help="single split with this test fraction instead of k folds")
    p.add_argument("--positive-class", help="label treated as positive in binary metrics")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("predict", help="emit per-row class probabilities for a feature CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_predict)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except GbmkitError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # noqa: BLE001 - last-resort CLI boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
