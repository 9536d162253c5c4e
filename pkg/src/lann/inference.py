"""Support computation, softmax class probabilities, prediction, explanation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DimensionError, LannModel, RelevanceProfile
from .neighbors import Neighborhood, find_neighbors


@dataclass(frozen=True)
class SupportVector:
    """Per-class support S(y|x): summed inverse distances of same-class neighbors."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or v.size < 1:
            raise DimensionError(f"support must be a non-empty vector, got {v.shape}")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("support entries must be finite and >= 0")


@dataclass(frozen=True)
class ProbabilityVector:
    """Softmax output distribution over the class ids."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or v.size < 1:
            raise DimensionError(f"probabilities must be a non-empty vector, got {v.shape}")
        if np.any(v < 0) or np.any(v > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        if abs(float(v.sum()) - 1.0) > 1e-9:
            raise ValueError(f"probabilities must sum to 1, got {float(v.sum())}")


def support_from_distances(
    distances: np.ndarray, neighbor_labels: np.ndarray, n_classes: int, epsilon: float
) -> np.ndarray:
    """Accumulate 1/max(d, epsilon) per class over the neighborhood."""
    s = np.zeros(n_classes)
    np.add.at(s, neighbor_labels, 1.0 / np.maximum(distances, epsilon))
    return s


def support(model: LannModel, query, neighborhood: Neighborhood) -> SupportVector:
    """Class supports for a query given its (already computed) neighborhood."""
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (model.n,):
        raise DimensionError(f"query shape {q.shape} does not match n={model.n}")
    labels = model.dataset.labels[neighborhood.indices]
    values = support_from_distances(
        neighborhood.distances, labels, model.dataset.n_classes, model.hyper.epsilon
    )
    return SupportVector(values)


def softmax(scores: np.ndarray) -> np.ndarray:
    """Overflow-safe softmax (max-subtraction)."""
    z = scores - scores.max()
    e = np.exp(z)
    return e / e.sum()


def class_probabilities(support: SupportVector, beta: float) -> ProbabilityVector:
    """P(y|x) = exp(S(y)/beta) / sum_y' exp(S(y')/beta)."""
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    return ProbabilityVector(softmax(support.values / beta))


def predict(model: LannModel, query) -> tuple[int, ProbabilityVector]:
    """Label with maximum support (ties to the smallest class id).

    The query is given in raw feature space; the model's scaler maps it
    into the z-scored coordinates the training points live in.
    """
    q = model.scaler.transform(np.asarray(query, dtype=np.float64))
    if q.shape != (model.n,):
        raise DimensionError(f"query shape {q.shape} does not match n={model.n}")
    nb = find_neighbors(model, q, model.hyper.k)
    s = support(model, q, nb)
    label = int(np.argmax(s.values))
    return label, class_probabilities(s, model.hyper.beta)


def explain(model: LannModel, query) -> RelevanceProfile:
    """Average the k neighbors' normalized metric diagonals into one profile."""
    q = model.scaler.transform(np.asarray(query, dtype=np.float64))
    nb = find_neighbors(model, q, model.hyper.k)
    w2 = model.metric_weights[nb.indices] ** 2
    w2 = w2 / w2.sum(axis=1, keepdims=True)
    profile = w2.mean(axis=0)
    return RelevanceProfile(profile / profile.sum())
