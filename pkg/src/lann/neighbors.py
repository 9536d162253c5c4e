"""Local-metric distances and k-nearest neighborhoods.

Every candidate point i scores the query with its *own* metric, so the
usual single-metric spatial indexes do not apply; both implementations
here are linear scans.  ``find_neighbors`` is the vectorized production
path, ``brute_force_neighbors`` a plain-Python oracle used in tests; the
two must agree exactly (same distances, ties broken by ascending index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    DiagonalMetric,
    DimensionError,
    InsufficientPointsError,
    LannModel,
)


@dataclass(frozen=True)
class Neighborhood:
    """k training indices sorted ascending by (distance, index)."""

    indices: np.ndarray
    distances: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        dist = np.asarray(self.distances, dtype=np.float64)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "distances", dist)
        if idx.shape != dist.shape or idx.ndim != 1:
            raise DimensionError("indices and distances must be matching vectors")
        if len(set(idx.tolist())) != idx.size:
            raise ValueError("neighborhood indices must be distinct")
        if np.any(np.diff(dist) < 0):
            raise ValueError("neighborhood distances must be non-decreasing")

    @property
    def k(self) -> int:
        return self.indices.size


def local_distance(metric, anchor, query) -> float:
    """Quadratic-form distance sum_l lambda_l^2 (anchor_l - query_l)^2.

    ``metric`` may be a DiagonalMetric or any plain weight vector (the
    distance is well defined for unnormalized weights too).
    """
    w = metric.weights if isinstance(metric, DiagonalMetric) else np.asarray(metric, dtype=np.float64)
    a = np.asarray(anchor, dtype=np.float64)
    q = np.asarray(query, dtype=np.float64)
    if not (w.shape == a.shape == q.shape) or w.ndim != 1:
        raise DimensionError(
            f"weights {w.shape} / anchor {a.shape} / query {q.shape} must be matching vectors"
        )
    diff = a - q
    return float((w * w * diff * diff).sum())


def _query_vector(model: LannModel, query) -> np.ndarray:
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (model.n,):
        raise DimensionError(f"query shape {q.shape} does not match n={model.n}")
    return q


def all_local_distances(model: LannModel, query) -> np.ndarray:
    """d_i = distance from training point i to the query under metric i."""
    q = _query_vector(model, query)
    diff = model.dataset.points - q
    return (model.metric_weights**2 * diff * diff).sum(axis=1)


def _check_k(k: int, available: int) -> None:
    if k < 1:
        raise InsufficientPointsError(f"k must be >= 1, got {k}")
    if k > available:
        raise InsufficientPointsError(
            f"requested {k} neighbors but only {available} candidate points exist"
        )


def find_neighbors(
    model: LannModel, query, k: int | None = None, exclude: int | None = None
) -> Neighborhood:
    """The k candidates with smallest own-metric distance to the query."""
    k = model.hyper.k if k is None else k
    dist = all_local_distances(model, query)
    m = dist.size
    _check_k(k, m - (1 if exclude is not None else 0))
    if exclude is not None:
        dist = dist.copy()
        dist[exclude] = np.inf
    order = np.lexsort((np.arange(m), dist))[:k]
    return Neighborhood(order, dist[order])


def brute_force_neighbors(
    model: LannModel, query, k: int | None = None, exclude: int | None = None
) -> Neighborhood:
    """Same contract as find_neighbors: full scan plus stable sort."""
    k = model.hyper.k if k is None else k
    q = _query_vector(model, query)
    points = model.dataset.points
    weights = model.metric_weights
    scored: list[tuple[float, int]] = []
    for i in range(points.shape[0]):
        if i == exclude:
            continue
        diff = points[i] - q
        d = float((weights[i] ** 2 * diff * diff).sum())
        scored.append((d, i))
    _check_k(k, len(scored))
    scored.sort()
    top = scored[:k]
    return Neighborhood(
        np.array([i for _, i in top], dtype=np.int64),
        np.array([d for d, _ in top], dtype=np.float64),
    )
