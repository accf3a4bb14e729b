#!/usr/bin/env python3
"""Generate a synthetic labeled feature CSV for pipeline experiments."""
import argparse

from gbmkit import save_feature_csv
from gbmkit.synthetic import grouped_onehot_dataset, two_gaussian_dataset


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument(
        "--kind", choices=("gaussian", "onehot"), default="gaussian",
        help="dense two-Gaussian classes or sparse exclusive indicator groups",
    )
    parser.add_argument("--rows-per-class", type=int, nargs="+", default=[125, 500])
    parser.add_argument("--features", type=int, default=100)
    parser.add_argument("--informative", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if args.kind == "gaussian":
        if len(args.rows_per_class) != 2:
            parser.error("--rows-per-class needs exactly two counts for kind=gaussian")
        ds = two_gaussian_dataset(
            n_per_class=tuple(args.rows_per_class),
            n_features=args.features,
            n_informative=args.informative,
            seed=args.seed,
        )
    else:
        group_size = max(2, args.features // 5)
        ds = grouped_onehot_dataset(
            n_rows=sum(args.rows_per_class),
            n_groups=args.features // group_size,
            group_size=group_size,
            seed=args.seed,
        )
    save_feature_csv(ds, args.out)
    print(f"wrote {ds.n_samples} rows x {ds.n_features} features -> {args.out}")


if __name__ == "__main__":
    main()
