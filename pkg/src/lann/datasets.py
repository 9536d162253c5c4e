"""Benchmark dataset access.

Iris, Wine, Breast Cancer and Digits come from scikit-learn's bundled
copies (no network involved).  Ionosphere and Image Segmentation are not
distributed with any local library; place them as CSV files (see
``local_csv``) to run those benchmarks.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .data import load_csv
from .model import DataFormatError, LabeledDataset

#: directory searched for user-supplied dataset CSVs
DATA_DIR_ENV = "LANN_DATA_DIR"


def _from_sklearn(bunch) -> LabeledDataset:
    labels = np.asarray(bunch.target, dtype=np.int64)
    return LabeledDataset(
        points=np.asarray(bunch.data, dtype=np.float64),
        labels=labels,
        n_classes=int(labels.max()) + 1,
        feature_names=tuple(str(f) for f in getattr(bunch, "feature_names", [])) or None,
        label_names=tuple(str(t) for t in getattr(bunch, "target_names", [])) or None,
    )


def iris() -> LabeledDataset:
    from sklearn.datasets import load_iris

    return _from_sklearn(load_iris())


def wine() -> LabeledDataset:
    from sklearn.datasets import load_wine

    return _from_sklearn(load_wine())


def breast_cancer() -> LabeledDataset:
    from sklearn.datasets import load_breast_cancer

    return _from_sklearn(load_breast_cancer())


def digits() -> LabeledDataset:
    from sklearn.datasets import load_digits

    return _from_sklearn(load_digits())


def data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, "data"))


def local_csv(name: str, label_column: str | int | None = None) -> LabeledDataset:
    """Load ``<data_dir>/<name>.csv`` (e.g. user-supplied ionosphere.csv).

    The directory defaults to ./data and can be overridden with the
    LANN_DATA_DIR environment variable.
    """
    path = data_dir() / f"{name}.csv"
    if not path.exists():
        raise DataFormatError(
            f"dataset file {path} not found; supply it as a headered CSV "
            f"(label in the last column or pass label_column)"
        )
    return load_csv(path, label_column=label_column)


BUILTIN = {
    "iris": iris,
    "wine": wine,
    "breast_cancer": breast_cancer,
    "digits": digits,
}
