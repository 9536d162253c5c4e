"""Dataset ingestion, z-score preprocessing, synthetic generators, fold plans."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import (
    DataFormatError,
    DimensionError,
    LabeledDataset,
    LannError,
    Scaler,
)


def _format_float(v: float) -> str:
    # repr gives the shortest round-tripping decimal, so files are
    # byte-stable across runs and re-parse to the exact same values
    return repr(float(v))


def load_csv(path, label_column: str | int | None = None) -> LabeledDataset:
    """Read a labeled dataset from a headered CSV file.

    ``label_column`` selects the label column by header name or index
    (default: last column).  Labels may be arbitrary text or integers; they
    are mapped to {0..L-1} in order of first appearance and the mapping is
    retained in ``label_names``.
    """
    path = Path(path)
    if not path.exists():
        raise DataFormatError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path} is empty") from None
        rows = list(reader)
    if not rows:
        raise DataFormatError(f"{path} has a header but no data rows")

    if label_column is None:
        label_idx = len(header) - 1
    elif isinstance(label_column, int):
        label_idx = label_column if label_column >= 0 else len(header) + label_column
        if not 0 <= label_idx < len(header):
            raise DataFormatError(f"label column index {label_column} out of range")
    else:
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise DataFormatError(
                f"label column {label_column!r} not found in header {header}"
            ) from None

    feature_names = tuple(h for c, h in enumerate(header) if c != label_idx)
    points = []
    raw_labels = []
    for r, row in enumerate(rows, start=2):  # header is line 1
        if len(row) != len(header):
            raise DataFormatError(
                f"{path}: line {r} has {len(row)} fields, expected {len(header)}"
            )
        values = []
        for c, cell in enumerate(row):
            if c == label_idx:
                raw_labels.append(cell.strip())
                continue
            try:
                values.append(float(cell))
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {r}, column {header[c]!r}: "
                    f"cannot parse {cell!r} as a number"
                ) from None
        points.append(values)

    label_names: list[str] = []
    seen: dict[str, int] = {}
    labels = []
    for text in raw_labels:
        if text not in seen:
            seen[text] = len(label_names)
            label_names.append(text)
        labels.append(seen[text])
    if len(label_names) < 2:
        raise DataFormatError(f"{path} contains a single class {label_names[0]!r}")

    return LabeledDataset(
        points=np.array(points, dtype=np.float64),
        labels=np.array(labels, dtype=np.int64),
        n_classes=len(label_names),
        feature_names=feature_names,
        label_names=tuple(label_names),
    )


def write_csv(dataset: LabeledDataset, path) -> None:
    """Write a dataset as a headered CSV, label in the last column.

    load_csv(write_csv(ds)) reproduces the dataset exactly (floats are
    written with shortest round-tripping precision).
    """
    names = dataset.feature_names or tuple(f"f{i}" for i in range(dataset.n))
    label_of = (
        (lambda y: dataset.label_names[y])
        if dataset.label_names is not None
        else (lambda y: str(int(y)))
    )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(names) + ["label"])
        for x, y in zip(dataset.points, dataset.labels):
            writer.writerow([_format_float(v) for v in x] + [label_of(int(y))])


def zscore_fit_transform(train: LabeledDataset) -> tuple[LabeledDataset, Scaler]:
    """Standardize each feature to mean 0 and population stddev 1 on train.

    Constant features get their stddev replaced by 1 (the feature becomes
    all-zero).  The returned scaler must be applied, not refitted, to any
    held-out data.
    """
    mean = train.points.mean(axis=0)
    std = train.points.std(axis=0)  # population (1/m) convention
    std = np.where(std == 0.0, 1.0, std)
    scaler = Scaler(mean, std)
    return zscore_apply(scaler, train), scaler


def zscore_apply(scaler: Scaler, data: LabeledDataset) -> LabeledDataset:
    return LabeledDataset(
        points=scaler.transform(data.points),
        labels=data.labels,
        n_classes=data.n_classes,
        feature_names=data.feature_names,
        label_names=data.label_names,
    )


def take(dataset: LabeledDataset, indices) -> LabeledDataset:
    """Row subset; the subset must still contain every class."""
    idx = np.asarray(indices, dtype=np.int64)
    return LabeledDataset(
        points=dataset.points[idx],
        labels=dataset.labels[idx],
        n_classes=dataset.n_classes,
        feature_names=dataset.feature_names,
        label_names=dataset.label_names,
    )


@dataclass(frozen=True)
class FoldPlan:
    """(train, test) index pairs whose test sets partition the dataset."""

    folds: tuple[tuple[np.ndarray, np.ndarray], ...]
    seed: int

    @property
    def n_folds(self) -> int:
        return len(self.folds)


def make_stratified_folds(
    dataset: LabeledDataset, folds: int = 10, seed: int = 0
) -> FoldPlan:
    """Seeded shuffle within each class, round-robin assignment to folds."""
    if folds < 2:
        raise LannError(f"need at least 2 folds, got {folds}")
    rng = np.random.default_rng(seed)
    test_sets: list[list[int]] = [[] for _ in range(folds)]
    for c in range(dataset.n_classes):
        members = np.flatnonzero(dataset.labels == c)
        if members.size < folds:
            raise DataFormatError(
                f"class {c} has {members.size} members, fewer than {folds} folds"
            )
        members = members[rng.permutation(members.size)]
        for f in range(folds):
            test_sets[f].extend(members[f::folds].tolist())
    all_idx = np.arange(dataset.m)
    pairs = []
    for fold_test in test_sets:
        test = np.sort(np.array(fold_test, dtype=np.int64))
        mask = np.ones(dataset.m, dtype=bool)
        mask[test] = False
        pairs.append((all_idx[mask], test))
    return FoldPlan(folds=tuple(pairs), seed=seed)


def _spread_centers(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Random class centers rescaled so the closest pair sits at distance 1."""
    centers = rng.standard_normal((count, dim))
    min_d = np.inf
    for a in range(count):
        for b in range(a + 1, count):
            min_d = min(min_d, float(np.linalg.norm(centers[a] - centers[b])))
    return centers / min_d


def generate_classification(
    m: int = 2000,
    n: int = 20,
    informative: int = 2,
    weak: int = 2,
    redundant: int = 2,
    classes: int = 2,
    seed: int = 0,
) -> LabeledDataset:
    """Gaussian classification data with strong, weak, redundant and noise features.

    Layout (in order): ``informative`` strongly relevant features (class
    means unit-separated, unit-variance noise), ``weak`` weakly relevant
    features (same structure, 4x noise), ``redundant`` random linear
    combinations of the relevant features, and pure standard-normal noise
    for the rest.  Feature names record the roles.
    """
    if informative < 1 or weak < 0 or redundant < 0:
        raise LannError("informative must be >= 1; weak/redundant must be >= 0")
    if informative + weak + redundant > n:
        raise LannError(
            f"informative+weak+redundant = {informative + weak + redundant} exceeds n = {n}"
        )
    if classes < 2 or m < classes:
        raise LannError(f"need >= 2 classes and m >= classes, got classes={classes}, m={m}")
    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(m) % classes).astype(np.int64)

    strong_centers = _spread_centers(rng, classes, informative)
    strong = strong_centers[labels] + rng.standard_normal((m, informative))
    blocks = [strong]
    if weak:
        weak_centers = _spread_centers(rng, classes, weak)
        blocks.append(weak_centers[labels] + 4.0 * rng.standard_normal((m, weak)))
    if redundant:
        relevant = np.hstack(blocks)
        mix = rng.standard_normal((relevant.shape[1], redundant))
        blocks.append(relevant @ mix)
    n_noise = n - informative - weak - redundant
    if n_noise:
        blocks.append(rng.standard_normal((m, n_noise)))

    names = (
        [f"strong_{i}" for i in range(informative)]
        + [f"weak_{i}" for i in range(weak)]
        + [f"redundant_{i}" for i in range(redundant)]
        + [f"noise_{i}" for i in range(n_noise)]
    )
    return LabeledDataset(
        points=np.hstack(blocks),
        labels=labels,
        n_classes=classes,
        feature_names=tuple(names),
    )


def _orthonormal_frame(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.array([1.0, 0.0, 0.0])
    if abs(axis[0]) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    u = np.cross(axis, helper)
    u /= np.linalg.norm(u)
    v = np.cross(axis, u)
    return u, v


def licorice_geometry(
    cylinders: int = 5, radius: float = 1.0, length: float = 4.0, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """(axes, centers) of the cylinder arrangement for a given seed.

    Each cylinder points along a seeded random coordinate axis (a diagonal
    metric can then express the per-cylinder geometry exactly), and the
    centers sit along one random coordinate direction, strung like pieces
    on a lace, spaced length + 4*radius apart (comfortably beyond the
    4*radius minimum) so neighboring shells never touch.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    eye = np.eye(3)
    axes = np.stack([eye[int(rng.integers(0, 3))] for _ in range(cylinders)])
    line = eye[int(rng.integers(0, 3))]
    spacing = length + 4.0 * radius
    centers = np.stack([c * spacing * line for c in range(cylinders)])
    return axes, centers


def generate_licorice(
    cylinders: int = 5,
    per_cyl_inside: int = 200,
    per_cyl_outside: int = 200,
    radius: float = 1.0,
    length: float = 4.0,
    seed: int = 0,
) -> LabeledDataset:
    """Points in and around differently oriented 3-d cylinders, labeled inside/outside.

    Inside points have radial distance uniform in [0, radius); outside
    points lie in the shell radius..2*radius; both share the axial extent
    [-length/2, length/2].  Labels: inside=1, outside=0.  Orientation
    varies per cylinder (see licorice_geometry), so no single global
    feature weighting fits the whole set.
    """
    if cylinders < 1 or per_cyl_inside < 1 or per_cyl_outside < 1:
        raise LannError("counts must be >= 1")
    seq = np.random.SeedSequence(seed).spawn(2)
    axes, centers = licorice_geometry(cylinders, radius, length, seed)
    rng = np.random.default_rng(seq[1])
    points = []
    labels = []
    for c in range(cylinders):
        axis = axes[c]
        u, v = _orthonormal_frame(axis)
        for inside, count in ((True, per_cyl_inside), (False, per_cyl_outside)):
            axial = rng.uniform(-length / 2.0, length / 2.0, count)
            if inside:
                r = rng.uniform(0.0, radius, count)
            else:
                r = rng.uniform(radius, 2.0 * radius, count)
            theta = rng.uniform(0.0, 2.0 * np.pi, count)
            offset = np.outer(r * np.cos(theta), u) + np.outer(r * np.sin(theta), v)
            points.append(centers[c] + np.outer(axial, axis) + offset)
            labels.extend([1 if inside else 0] * count)
    return LabeledDataset(
        points=np.vstack(points),
        labels=np.array(labels, dtype=np.int64),
        n_classes=2,
        feature_names=("x", "y", "z"),
        label_names=("outside", "inside"),
    )
