"""Cross-validation harness, class fingerprints, distance-matrix export."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .data import make_stratified_folds, take, zscore_fit_transform
from .inference import predict
from .model import (
    Hyperparams,
    LabeledDataset,
    LannError,
    LannModel,
    RelevanceProfile,
)
from .training import fit

ALGORITHMS = ("lann", "knn")


@dataclass(frozen=True)
class CvResult:
    """Fold accuracies of one algorithm on one dataset, plus mean and std.

    The std is the population std over the fold scores, matching the
    "mean +/- std" convention of cross-validation tables.
    """

    dataset: str
    algorithm: str
    seed: int
    fold_accuracies: tuple[float, ...]

    def __post_init__(self):
        if not all(0.0 <= a <= 1.0 for a in self.fold_accuracies):
            raise LannError("fold accuracies must lie in [0, 1]")

    @property
    def mean(self) -> float:
        return float(np.mean(self.fold_accuracies))

    @property
    def std(self) -> float:
        return float(np.std(self.fold_accuracies))

    def csv_row(self) -> list[str]:
        return (
            [self.dataset, self.algorithm, str(self.seed), repr(self.mean), repr(self.std)]
            + [repr(a) for a in self.fold_accuracies]
        )

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            csv.writer(fh, lineterminator="\n").writerow(self.csv_row())


def cross_validate(
    dataset: LabeledDataset,
    algorithm: str,
    hyper: Hyperparams | None = None,
    seed: int = 42,
    folds: int = 10,
    dataset_tag: str = "dataset",
) -> CvResult:
    """Stratified shuffled k-fold accuracy of "lann" or "knn".

    Per fold the z-scaler is fitted on the train split only; "knn" is the
    epochs=0 reduction of the same pipeline (identity metrics, weighted
    Euclidean voting), so lann with epochs=0 reproduces it fold for fold.
    """
    if algorithm not in ALGORITHMS:
        raise LannError(f"unknown algorithm {algorithm!r}, expected one of {ALGORITHMS}")
    hyper = hyper or Hyperparams()
    plan = make_stratified_folds(dataset, folds=folds, seed=seed)
    scores = []
    for f, (train_idx, test_idx) in enumerate(plan.folds):
        train_scaled, scaler = zscore_fit_transform(take(dataset, train_idx))
        fold_hyper = replace(
            hyper,
            seed=seed + f,
            epochs=0 if algorithm == "knn" else hyper.epochs,
        )
        model, _ = fit(train_scaled, fold_hyper, scaler=scaler)
        hits = 0
        for idx in test_idx:
            label, _ = predict(model, dataset.points[idx])
            hits += label == int(dataset.labels[idx])
        scores.append(hits / len(test_idx))
    return CvResult(
        dataset=dataset_tag,
        algorithm=algorithm,
        seed=seed,
        fold_accuracies=tuple(scores),
    )


@dataclass(frozen=True)
class ClassFingerprint:
    """Per-class mean of the member points' normalized metric diagonals."""

    profiles: tuple[RelevanceProfile, ...]
    feature_names: tuple[str, ...] | None = None

    @property
    def n_classes(self) -> int:
        return len(self.profiles)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["class", "feature", "relevance"])
            for c, profile in enumerate(self.profiles):
                for l, value in enumerate(profile.relevances):
                    name = self.feature_names[l] if self.feature_names else str(l)
                    writer.writerow([str(c), name, repr(float(value))])


def fingerprints(model: LannModel) -> ClassFingerprint:
    """Aggregate the learned per-point relevances class-wise."""
    w2 = model.metric_weights**2
    w2 = w2 / w2.sum(axis=1, keepdims=True)
    profiles = []
    for c in range(model.dataset.n_classes):
        mean = w2[model.dataset.labels == c].mean(axis=0)
        profiles.append(RelevanceProfile(mean / mean.sum()))
    return ClassFingerprint(
        profiles=tuple(profiles), feature_names=model.dataset.feature_names
    )


def export_distance_matrix(model: LannModel, symmetrize: str = "mean") -> np.ndarray:
    """Pairwise own-metric distances D[i, j] = d_i(x^i, x^j).

    The raw matrix is generally asymmetric (row i uses point i's metric).
    symmetrize: "mean" averages D and D^T (default), "min" takes the
    elementwise minimum, "none" returns the raw matrix.  The diagonal is
    exactly 0 in all modes.
    """
    if symmetrize not in ("mean", "min", "none"):
        raise LannError(f"unknown symmetrize mode {symmetrize!r}")
    points = model.dataset.points
    w2 = model.metric_weights**2
    m = points.shape[0]
    d = np.empty((m, m))
    for i in range(m):
        diff = points - points[i]
        d[i] = (w2[i] * diff * diff).sum(axis=1)
        d[i, i] = 0.0
    if symmetrize == "mean":
        d = (d + d.T) / 2.0
    elif symmetrize == "min":
        d = np.minimum(d, d.T)
    return d


def write_distance_matrix(matrix: np.ndarray, labels: np.ndarray, path, labels_path) -> None:
    """Matrix as headerless CSV plus a companion one-label-per-line file."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")
    with open(labels_path, "w", encoding="utf-8") as fh:
        for y in labels:
            fh.write(f"{int(y)}\n")


def reclassify_by_matrix(matrix: np.ndarray, labels, k: int) -> float:
    """Majority-vote accuracy when each point is reclassified by its row.

    Each point votes with the labels of the k smallest off-diagonal
    entries in its row (distance ties to the smaller index, vote ties to
    the smaller label).  Used to score distance matrices and embeddings
    uniformly.
    """
    d = np.asarray(matrix, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    m = d.shape[0]
    if d.shape != (m, m):
        raise LannError(f"matrix must be square, got {d.shape}")
    if y.shape != (m,):
        raise LannError(f"labels shape {y.shape} does not match matrix size {m}")
    if k >= m:
        raise LannError(f"k={k} must be smaller than the number of points {m}")
    n_classes = int(y.max()) + 1
    arange = np.arange(m)
    hits = 0
    for i in range(m):
        row = d[i].copy()
        row[i] = np.inf
        nearest = np.lexsort((arange, row))[:k]
        votes = np.bincount(y[nearest], minlength=n_classes)
        hits += int(np.argmax(votes)) == int(y[i])
    return hits / m
