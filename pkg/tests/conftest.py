import numpy as np
import pytest

from gbmkit import Dataset


@pytest.fixture
def tiny_binary() -> Dataset:
    """Eight rows, one perfectly separating feature plus one noise column."""
    X = np.array(
        [
            [0.0, 1.0],
            [1.0, 0.5],
            [2.0, 1.5],
            [3.0, 0.2],
            [10.0, 1.1],
            [11.0, 0.4],
            [12.0, 1.3],
            [13.0, 0.9],
        ]
    )
    y = np.array([0, 0, 0, 0, 1, 1, 1, 1])
    return Dataset.from_arrays(X, y, ("neg", "pos"))


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)
