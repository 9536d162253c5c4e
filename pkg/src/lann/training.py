"""KL loss, per-neighbor metric gradients, the SGD loop, and a gradient checker.

The per-sample loss is the negative log softmax probability of the true
label, with the neighborhood computed leave-one-out (a point would
otherwise be its own nearest neighbor at distance 0 and the loss would be
degenerate).  Gradients are taken with neighborhood membership held
constant: the membership function is piecewise constant, so the objective
is only differentiable for fixed membership.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    Hyperparams,
    InsufficientPointsError,
    LabeledDataset,
    LannModel,
    Scaler,
)
from .neighbors import find_neighbors


@dataclass(frozen=True)
class GradientRecord:
    """Gradient of one sample's loss w.r.t. neighbor j's weight vector."""

    neighbor_index: int
    gradient: np.ndarray


@dataclass(frozen=True)
class TrainReport:
    """Per-epoch mean losses plus bookkeeping from one fit call."""

    epoch_losses: tuple[float, ...]
    epochs: int
    seed: int
    metric_resets: int = 0

    @property
    def first_loss(self) -> float | None:
        return self.epoch_losses[0] if self.epoch_losses else None

    @property
    def final_loss(self) -> float | None:
        return self.epoch_losses[-1] if self.epoch_losses else None


@dataclass(frozen=True)
class GradientCheckReport:
    """Outcome of comparing analytic gradients to central differences."""

    trials: int
    components: int
    max_relative_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_relative_error <= self.tolerance


def _stable_nll(supports: np.ndarray, true_label: int, beta: float) -> float:
    """-log softmax(S/beta)[y] computed in log space; finite for any support."""
    z = supports / beta
    zmax = z.max()
    return float(np.log(np.exp(z - zmax).sum()) + zmax - z[true_label])


def _frozen_loss(
    points: np.ndarray,
    labels: np.ndarray,
    lambdas: np.ndarray,
    i: int,
    neighbor_idx: np.ndarray,
    n_classes: int,
    beta: float,
    epsilon: float,
) -> float:
    """Sample loss with the neighborhood membership pinned to neighbor_idx."""
    diff = points[neighbor_idx] - points[i]
    d = (lambdas[neighbor_idx] ** 2 * diff * diff).sum(axis=1)
    s = np.zeros(n_classes)
    np.add.at(s, labels[neighbor_idx], 1.0 / np.maximum(d, epsilon))
    return _stable_nll(s, int(labels[i]), beta)


def _neighbor_gradients(
    points: np.ndarray,
    labels: np.ndarray,
    lambdas: np.ndarray,
    i: int,
    neighbor_idx: np.ndarray,
    neighbor_dist: np.ndarray,
    probs: np.ndarray,
    beta: float,
    epsilon: float,
) -> np.ndarray:
    """Stacked dE/dlambda^j for the neighbors of sample i (one row per j).

    Same-class neighbors get [1/(beta d^2)] (1 - P(y_i)) 2 lambda (x^j - x^i)^2,
    different-class neighbors -[1/(beta d^2)] P(y_j) 2 lambda (x^j - x^i)^2,
    with d floored at epsilon.  All other points have zero gradient.
    """
    y_i = int(labels[i])
    nb_labels = labels[neighbor_idx]
    d = np.maximum(neighbor_dist, epsilon)
    coef = np.where(nb_labels == y_i, 1.0 - probs[y_i], -probs[nb_labels])
    coef = coef / (beta * d * d)
    diff = points[neighbor_idx] - points[i]
    return coef[:, None] * 2.0 * lambdas[neighbor_idx] * diff * diff


def sample_loss(model: LannModel, i: int) -> float:
    """-log P(y_i | x^i) with the leave-one-out neighborhood of point i."""
    nb = find_neighbors(model, model.dataset.points[i], model.hyper.k, exclude=i)
    return _frozen_loss(
        model.dataset.points,
        model.dataset.labels,
        model.metric_weights,
        i,
        nb.indices,
        model.dataset.n_classes,
        model.hyper.beta,
        model.hyper.epsilon,
    )


def sample_gradients(model: LannModel, i: int) -> list[GradientRecord]:
    """Per-neighbor gradients of sample i's loss; non-neighbors are zero."""
    points = model.dataset.points
    labels = model.dataset.labels
    hyper = model.hyper
    nb = find_neighbors(model, points[i], hyper.k, exclude=i)
    d = np.maximum(nb.distances, hyper.epsilon)
    s = np.zeros(model.dataset.n_classes)
    np.add.at(s, labels[nb.indices], 1.0 / d)
    z = s / hyper.beta
    e = np.exp(z - z.max())
    probs = e / e.sum()
    grads = _neighbor_gradients(
        points, labels, model.metric_weights, i, nb.indices, nb.distances,
        probs, hyper.beta, hyper.epsilon,
    )
    return [
        GradientRecord(int(j), grads[row].copy())
        for row, j in enumerate(nb.indices)
    ]


def _renormalize_row(row: np.ndarray, n: int) -> tuple[np.ndarray, bool]:
    """Project one weight vector back onto sum(lambda^2) == n.

    An all-zero (or non-finite) row is reset to the identity weights; the
    caller counts these resets.
    """
    ssq = float(np.dot(row, row))
    if ssq == 0.0 or not np.isfinite(ssq):
        return np.ones(n), True
    return np.abs(row) * np.sqrt(n / ssq), False


def fit(
    dataset: LabeledDataset,
    hyper: Hyperparams,
    scaler: Scaler | None = None,
) -> tuple[LannModel, TrainReport]:
    """Stochastic gradient training of one metric per training point.

    Metrics start at identity.  Each epoch visits the samples in a seeded
    shuffled order; each visit recomputes the leave-one-out neighborhood
    under the current metrics, steps the k neighbors' weights downhill and
    renormalizes them.  Deterministic given hyper.seed.

    ``dataset`` must already be in z-scored coordinates; pass the fitted
    ``scaler`` so that the model can map raw queries into them (defaults to
    the identity scaler).
    """
    m, n = dataset.points.shape
    if hyper.k > m - 1:
        raise InsufficientPointsError(
            f"k={hyper.k} needs at least {hyper.k + 1} training points, got {m}"
        )
    points = dataset.points
    labels = dataset.labels
    n_classes = dataset.n_classes
    lambdas = np.ones((m, n))
    w2 = np.ones((m, n))
    rng = np.random.default_rng(hyper.seed)
    arange = np.arange(m)
    epoch_losses = []
    resets = 0

    for _ in range(hyper.epochs):
        order = rng.permutation(m)
        loss_sum = 0.0
        for i in order:
            diff_all = points - points[i]
            dist = (w2 * diff_all * diff_all).sum(axis=1)
            dist[i] = np.inf
            nb_idx = np.lexsort((arange, dist))[: hyper.k]
            d = np.maximum(dist[nb_idx], hyper.epsilon)
            s = np.zeros(n_classes)
            np.add.at(s, labels[nb_idx], 1.0 / d)
            loss_sum += _stable_nll(s, int(labels[i]), hyper.beta)
            z = s / hyper.beta
            e = np.exp(z - z.max())
            probs = e / e.sum()
            grads = _neighbor_gradients(
                points, labels, lambdas, i, nb_idx, dist[nb_idx],
                probs, hyper.beta, hyper.epsilon,
            )
            steps = hyper.learning_rate * grads
            # cap each neighbor's update at max_step * ||lambda||; the raw
            # 1/d^2 gradients span many orders of magnitude and a step
            # larger than ||lambda|| would invert the update direction
            norms = np.sqrt((steps * steps).sum(axis=1))
            cap = hyper.max_step * np.sqrt(n)
            scale = np.where(norms > cap, cap / np.maximum(norms, 1e-300), 1.0)
            lambdas[nb_idx] -= scale[:, None] * steps
            for j in nb_idx:
                lambdas[j], was_reset = _renormalize_row(lambdas[j], n)
                resets += was_reset
                w2[j] = lambdas[j] ** 2
        epoch_losses.append(loss_sum / m)

    model = LannModel(
        dataset=dataset,
        metric_weights=lambdas,
        hyper=hyper,
        scaler=scaler if scaler is not None else Scaler.identity(n),
    )
    report = TrainReport(
        epoch_losses=tuple(epoch_losses),
        epochs=hyper.epochs,
        seed=hyper.seed,
        metric_resets=resets,
    )
    return model, report


def _random_instance(rng: np.random.Generator):
    """A small random fitted-shape model for gradient checking."""
    m = int(rng.integers(20, 101))
    n = int(rng.integers(2, 11))
    n_classes = int(rng.integers(2, 5))
    points = rng.standard_normal((m, n))
    labels = np.concatenate(
        [np.arange(n_classes), rng.integers(0, n_classes, m - n_classes)]
    ).astype(np.int64)
    labels = labels[rng.permutation(m)]
    dataset = LabeledDataset(points, labels, n_classes)
    # half the trials run from identity metrics, half from random ones
    if rng.random() < 0.5:
        lambdas = np.ones((m, n))
    else:
        raw = rng.uniform(0.25, 2.0, (m, n))
        lambdas = np.abs(raw) * np.sqrt(n / (raw * raw).sum(axis=1, keepdims=True))
    k = int(rng.integers(1, min(6, m)))
    return dataset, lambdas, k


#: smallest neighbor distance accepted when picking a gradient-check sample.
#: The loss scales like 1/d, so central differences on closer pairs measure
#: float roundoff rather than the derivative.
_CHECK_MIN_DISTANCE = 1e-2

#: denominator floor of the per-record error: components below this scale
#: are compared absolutely (central differences at h=1e-5 cannot resolve
#: relative error on smaller gradients; double roundoff alone is ~1e-8).
_CHECK_SCALE_FLOOR = 1e-4


def _conditioned_sample(model: LannModel, k: int, rng: np.random.Generator):
    """Pick a sample whose frozen neighborhood keeps finite differences sane."""
    for i in rng.permutation(model.m):
        nb = find_neighbors(model, model.dataset.points[i], k, exclude=int(i))
        if nb.distances[0] >= _CHECK_MIN_DISTANCE:
            return int(i), nb
    return None


def check_gradients(
    trials: int = 100,
    tol: float = 1e-4,
    step: float = 1e-5,
    seed: int = 0,
) -> GradientCheckReport:
    """Compare analytic gradients to central finite differences.

    The neighborhood membership is frozen while differencing (perturbations
    large enough to change membership would invalidate the comparison, so
    the step stays small and membership is pinned explicitly).  Samples
    whose nearest neighbor sits closer than _CHECK_MIN_DISTANCE are
    excluded: the 1/d loss blows up there and central differences measure
    roundoff, not the derivative.  The error of each gradient record is
    max|a - f| / max(max|a|, max|f|, _CHECK_SCALE_FLOOR): relative on the
    record's scale, absolute for scales finite differences cannot resolve
    (matching coordinates, saturated softmax).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    worst = 0.0
    components = 0
    done = 0
    while done < trials:
        dataset, lambdas, k = _random_instance(rng)
        hyper = Hyperparams(k=k, epochs=0)
        model = LannModel(dataset, lambdas, hyper, Scaler.identity(dataset.n))
        picked = _conditioned_sample(model, k, rng)
        if picked is None:
            continue
        i, nb = picked
        done += 1
        records = sample_gradients(model, i)
        for rec in records:
            j = rec.neighbor_index
            fd = np.zeros(dataset.n)
            for l in range(dataset.n):
                perturbed = lambdas.copy()
                perturbed[j, l] += step
                up = _frozen_loss(
                    dataset.points, dataset.labels, perturbed, i, nb.indices,
                    dataset.n_classes, hyper.beta, hyper.epsilon,
                )
                perturbed[j, l] -= 2 * step
                down = _frozen_loss(
                    dataset.points, dataset.labels, perturbed, i, nb.indices,
                    dataset.n_classes, hyper.beta, hyper.epsilon,
                )
                fd[l] = (up - down) / (2 * step)
            scale = max(np.abs(rec.gradient).max(), np.abs(fd).max(), _CHECK_SCALE_FLOOR)
            err = float(np.abs(rec.gradient - fd).max() / scale)
            worst = max(worst, err)
            components += dataset.n
    return GradientCheckReport(
        trials=trials,
        components=components,
        max_relative_error=worst,
        tolerance=tol,
    )
