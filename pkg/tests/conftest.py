import numpy as np
import pytest

import lann
from lann import datasets


def reference_weighted_knn(points, labels, n_classes, query, k, epsilon=1e-8):
    """Independent weighted Euclidean kNN: plain-Python scan and vote.

    Same contract as the production predictor with identity metrics:
    squared Euclidean distances, ties by index, votes 1/max(d, eps),
    argmax with ties to the smallest class id.
    """
    scored = []
    for i, x in enumerate(points):
        d = 0.0
        for a, b in zip(x, query):
            d += (a - b) ** 2
        scored.append((d, i))
    scored.sort()
    support = [0.0] * n_classes
    for d, i in scored[:k]:
        support[labels[i]] += 1.0 / max(d, epsilon)
    best = 0
    for c in range(1, n_classes):
        if support[c] > support[best]:
            best = c
    return best, support


def random_dataset(rng, m=None, n=None, n_classes=None):
    m = m or int(rng.integers(8, 40))
    n = n or int(rng.integers(1, 6))
    n_classes = n_classes or int(rng.integers(2, 4))
    points = rng.standard_normal((m, n))
    labels = np.concatenate(
        [np.arange(n_classes), rng.integers(0, n_classes, m - n_classes)]
    )
    return lann.LabeledDataset(points, labels[rng.permutation(m)], n_classes)


def identity_model(dataset, k=5, **hyper_kwargs):
    hyper = lann.Hyperparams(k=k, **hyper_kwargs)
    return lann.LannModel(
        dataset,
        np.ones((dataset.m, dataset.n)),
        hyper,
        lann.Scaler.identity(dataset.n),
    )


def random_metric_model(dataset, rng, k=5, **hyper_kwargs):
    raw = rng.uniform(0.25, 2.0, (dataset.m, dataset.n))
    lam = raw * np.sqrt(dataset.n / (raw * raw).sum(axis=1, keepdims=True))
    hyper = lann.Hyperparams(k=k, **hyper_kwargs)
    return lann.LannModel(dataset, lam, hyper, lann.Scaler.identity(dataset.n))


@pytest.fixture(scope="session")
def iris():
    return datasets.iris()


@pytest.fixture(scope="session")
def wine():
    return datasets.wine()


@pytest.fixture(scope="session")
def breast_cancer():
    return datasets.breast_cancer()
