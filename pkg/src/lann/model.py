"""Shared domain types: datasets, per-point diagonal metrics, hyperparameters.

All types are plain immutable value objects; the algorithms live in the
sibling modules (neighbors, inference, training, evaluation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: relative tolerance for the metric normalization constraint sum(lambda^2) == n
NORM_TOL = 1e-9


class LannError(ValueError):
    """Base class for all errors raised by this package."""


class DimensionError(LannError):
    """Operands do not share the expected dimensionality."""


class DegenerateMetricError(LannError):
    """A metric weight vector collapsed to all zeros."""


class InsufficientPointsError(LannError):
    """Fewer training points available than the requested neighbor count."""


class DataFormatError(LannError):
    """A dataset file or value does not match the expected format."""


def _as_float_matrix(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise DimensionError(f"points must be a 2-d matrix, got shape {pts.shape}")
    return pts


@dataclass(frozen=True)
class LabeledDataset:
    """m points in R^n with integer class labels from {0..n_classes-1}.

    ``feature_names`` and ``label_names`` are optional reporting metadata
    (label_names[c] is the original text of class id c as read from a file).
    """

    points: np.ndarray
    labels: np.ndarray
    n_classes: int
    feature_names: tuple[str, ...] | None = None
    label_names: tuple[str, ...] | None = None

    def __post_init__(self):
        pts = _as_float_matrix(self.points)
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labels)
        m, n = pts.shape
        if m < 1 or n < 1:
            raise DimensionError(f"need at least one point and one feature, got {pts.shape}")
        if labels.shape != (m,):
            raise DimensionError(f"labels shape {labels.shape} does not match {m} points")
        if self.n_classes < 2:
            raise DataFormatError(f"need at least 2 classes, got {self.n_classes}")
        if not np.all(np.isfinite(pts)):
            raise DataFormatError("points contain NaN or Inf")
        if labels.min() < 0 or labels.max() >= self.n_classes:
            raise DataFormatError(
                f"labels must lie in [0, {self.n_classes - 1}], got range "
                f"[{labels.min()}, {labels.max()}]"
            )
        present = np.unique(labels)
        if len(present) != self.n_classes:
            missing = sorted(set(range(self.n_classes)) - set(present.tolist()))
            raise DataFormatError(f"classes {missing} have no members")
        if self.feature_names is not None and len(self.feature_names) != n:
            raise DimensionError(f"expected {n} feature names, got {len(self.feature_names)}")

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class DiagonalMetric:
    """Per-point weight vector lambda; the metric matrix is diag(lambda^2).

    Stored unsquared (the SGD parameter); squaring happens on evaluation,
    which keeps the quadratic form positive semi-definite by construction.
    Normalized so that sum(lambda^2) == n.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or w.size < 1:
            raise DimensionError(f"metric weights must be a non-empty vector, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise DegenerateMetricError("metric weights contain NaN or Inf")
        n = w.size
        ssq = float(np.sum(w * w))
        if abs(ssq - n) > NORM_TOL * n:
            raise DegenerateMetricError(
                f"metric violates sum(lambda^2) == n: got {ssq} for n={n}"
            )

    @property
    def n(self) -> int:
        return self.weights.size


def identity_metric(n: int) -> DiagonalMetric:
    """All-ones weights; makes the local distance plain squared Euclidean."""
    if n < 1:
        raise DimensionError(f"dimensionality must be >= 1, got {n}")
    return DiagonalMetric(np.ones(n))


def normalize_metric(weights) -> DiagonalMetric:
    """Rescale a weight vector onto the constraint surface sum(lambda^2) == n.

    Returns c * |weights| with c = sqrt(n / sum(w^2)).  Absolute values are
    taken because the metric depends only on lambda^2.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size < 1:
        raise DimensionError(f"weights must be a non-empty vector, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise DegenerateMetricError("weights contain NaN or Inf")
    ssq = float(np.sum(w * w))
    if ssq == 0.0:
        raise DegenerateMetricError("cannot normalize an all-zero weight vector")
    return DiagonalMetric(np.abs(w) * np.sqrt(w.size / ssq))


@dataclass(frozen=True)
class Hyperparams:
    """Neighbor count, softmax temperature and SGD settings.

    ``epsilon`` floors every distance before reciprocals and gradients are
    taken; 1/d and 1/d^2 are singular at d=0, which duplicate points make
    unavoidable.  ``max_step`` caps the norm of each weight update at
    max_step * sqrt(n) (= max_step * ||lambda||): the raw gradients carry a
    1/d^2 factor whose magnitude spans many orders across z-scored
    datasets, and an uncapped step larger than ||lambda|| would overshoot
    and invert the update direction.  ``seed`` drives all randomness.
    """

    k: int = 5
    beta: float = 1.0
    learning_rate: float = 0.75
    epochs: int = 50
    epsilon: float = 1e-8
    max_step: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise LannError(f"k must be >= 1, got {self.k}")
        if self.beta <= 0:
            raise LannError(f"beta must be > 0, got {self.beta}")
        if self.learning_rate <= 0:
            raise LannError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 0:
            raise LannError(f"epochs must be >= 0, got {self.epochs}")
        if self.epsilon <= 0:
            raise LannError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_step <= 0:
            raise LannError(f"max_step must be > 0, got {self.max_step}")
        if self.seed < 0:
            raise LannError(f"seed must be a non-negative integer, got {self.seed}")


@dataclass(frozen=True)
class Scaler:
    """Per-feature (mean, stddev) pairs for z-scoring; stddevs are > 0."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        std = np.asarray(self.std, dtype=np.float64)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)
        if mean.ndim != 1 or mean.shape != std.shape:
            raise DimensionError(
                f"mean/std must be matching vectors, got {mean.shape} and {std.shape}"
            )
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(std))):
            raise DataFormatError("scaler statistics contain NaN or Inf")
        if np.any(std <= 0):
            raise DataFormatError("scaler stddev entries must be > 0")

    @classmethod
    def identity(cls, n: int) -> "Scaler":
        return cls(np.zeros(n), np.ones(n))

    def transform(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        if pts.shape[-1] != self.mean.size:
            raise DimensionError(
                f"expected {self.mean.size} features, got {pts.shape[-1]}"
            )
        return (pts - self.mean) / self.std


@dataclass(frozen=True)
class LannModel:
    """Training points plus one diagonal metric per point.

    ``dataset`` holds the training set already in z-scored coordinates;
    ``scaler`` maps raw feature space into those coordinates (prediction
    applies it to every query).  ``metric_weights[i]`` is the unsquared
    lambda vector attached to training point i.
    """

    dataset: LabeledDataset
    metric_weights: np.ndarray
    hyper: Hyperparams
    scaler: Scaler

    def __post_init__(self):
        w = np.asarray(self.metric_weights, dtype=np.float64)
        object.__setattr__(self, "metric_weights", w)
        m, n = self.dataset.points.shape
        if w.shape != (m, n):
            raise DimensionError(
                f"metric_weights shape {w.shape} does not match dataset shape {(m, n)}"
            )
        if not np.all(np.isfinite(w)):
            raise DegenerateMetricError("metric weights contain NaN or Inf")
        ssq = np.sum(w * w, axis=1)
        if np.any(np.abs(ssq - n) > NORM_TOL * n):
            bad = int(np.argmax(np.abs(ssq - n)))
            raise DegenerateMetricError(
                f"metric {bad} violates sum(lambda^2) == n: got {ssq[bad]} for n={n}"
            )
        if self.scaler.mean.size != n:
            raise DimensionError(
                f"scaler dimensionality {self.scaler.mean.size} does not match n={n}"
            )

    @property
    def m(self) -> int:
        return self.dataset.m

    @property
    def n(self) -> int:
        return self.dataset.n

    def metric(self, i: int) -> DiagonalMetric:
        return DiagonalMetric(self.metric_weights[i].copy())

    @property
    def metrics(self) -> list[DiagonalMetric]:
        return [self.metric(i) for i in range(self.m)]


@dataclass(frozen=True)
class RelevanceProfile:
    """Non-negative feature-relevance distribution summing to 1."""

    relevances: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.relevances, dtype=np.float64)
        object.__setattr__(self, "relevances", r)
        if r.ndim != 1 or r.size < 1:
            raise DimensionError(f"relevances must be a non-empty vector, got {r.shape}")
        if np.any(r < 0) or not np.all(np.isfinite(r)):
            raise DataFormatError("relevances must be finite and >= 0")
        total = float(r.sum())
        if abs(total - 1.0) > 1e-9:
            raise DataFormatError(f"relevances must sum to 1, got {total}")

    @property
    def n(self) -> int:
        return self.relevances.size
