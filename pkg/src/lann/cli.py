"""Command-line entry point for training, evaluation and data generation.

Exit codes: 0 success, 1 runtime/data error, 2 usage error.  Every
subcommand is deterministic given --seed; repeated runs produce
byte-identical output files.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .data import (
    generate_classification,
    generate_licorice,
    load_csv,
    write_csv,
    zscore_fit_transform,
)
from .evaluation import (
    cross_validate,
    export_distance_matrix,
    fingerprints,
    write_distance_matrix,
)
from .inference import explain, predict
from .model import DataFormatError, Hyperparams, LabeledDataset, LannError, LannModel, Scaler
from .training import check_gradients, fit

MODEL_MAGIC = "LANN1"


def save_model(model: LannModel, path) -> None:
    """Versioned line-oriented text format: header, hyper, scaler, one
    "label,features...,lambdas..." line per training point."""
    h = model.hyper
    lines = [
        MODEL_MAGIC,
        (
            f"hyper k={h.k} beta={h.beta!r} lr={h.learning_rate!r} "
            f"epochs={h.epochs} epsilon={h.epsilon!r} max_step={h.max_step!r} seed={h.seed}"
        ),
        "scaler_mean " + ",".join(repr(float(v)) for v in model.scaler.mean),
        "scaler_std " + ",".join(repr(float(v)) for v in model.scaler.std),
    ]
    if model.dataset.feature_names:
        lines.append("features " + ",".join(model.dataset.feature_names))
    if model.dataset.label_names:
        lines.append("classes " + ",".join(model.dataset.label_names))
    for x, y, lam in zip(model.dataset.points, model.dataset.labels, model.metric_weights):
        fields = [str(int(y))]
        fields += [repr(float(v)) for v in x]
        fields += [repr(float(v)) for v in lam]
        lines.append(",".join(fields))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path) -> LannModel:
    path = Path(path)
    if not path.exists():
        raise DataFormatError(f"no such file: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != MODEL_MAGIC:
        raise DataFormatError(f"{path} is not a {MODEL_MAGIC} model file")
    hyper = None
    mean = std = None
    feature_names = label_names = None
    body_start = None
    for ln, line in enumerate(lines[1:], start=1):
        key, _, rest = line.partition(" ")
        if key == "hyper":
            kv = dict(item.split("=", 1) for item in rest.split())
            hyper = Hyperparams(
                k=int(kv["k"]),
                beta=float(kv["beta"]),
                learning_rate=float(kv["lr"]),
                epochs=int(kv["epochs"]),
                epsilon=float(kv["epsilon"]),
                max_step=float(kv.get("max_step", "0.05")),
                seed=int(kv["seed"]),
            )
        elif key == "scaler_mean":
            mean = np.array([float(v) for v in rest.split(",")])
        elif key == "scaler_std":
            std = np.array([float(v) for v in rest.split(",")])
        elif key == "features":
            feature_names = tuple(rest.split(","))
        elif key == "classes":
            label_names = tuple(rest.split(","))
        else:
            body_start = ln
            break
    if hyper is None or mean is None or std is None or body_start is None:
        raise DataFormatError(f"{path}: incomplete model header")
    n = mean.size
    labels, points, lambdas = [], [], []
    for ln, line in enumerate(lines[body_start:], start=body_start + 1):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 1 + 2 * n:
            raise DataFormatError(
                f"{path}: line {ln} has {len(fields)} fields, expected {1 + 2 * n}"
            )
        labels.append(int(fields[0]))
        points.append([float(v) for v in fields[1 : 1 + n]])
        lambdas.append([float(v) for v in fields[1 + n :]])
    labels_arr = np.array(labels, dtype=np.int64)
    dataset = LabeledDataset(
        points=np.array(points),
        labels=labels_arr,
        n_classes=int(labels_arr.max()) + 1,
        feature_names=feature_names,
        label_names=label_names,
    )
    return LannModel(dataset, np.array(lambdas), hyper, Scaler(mean, std))


def _hyper_from_args(args) -> Hyperparams:
    return Hyperparams(
        k=args.k,
        beta=args.beta,
        learning_rate=args.lr,
        epochs=args.epochs,
        epsilon=args.epsilon,
        max_step=args.max_step,
        seed=args.seed,
    )


def _add_hyper_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=5, help="neighbor count")
    p.add_argument("--beta", type=float, default=1.0, help="softmax temperature")
    p.add_argument("--lr", type=float, default=0.75, help="learning rate")
    p.add_argument("--epochs", type=int, default=50, help="training epochs")
    p.add_argument("--epsilon", type=float, default=1e-8, help="distance floor")
    p.add_argument("--max-step", type=float, default=0.05, help="update norm cap, relative to sqrt(n)")


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="input dataset CSV")
    p.add_argument("--label", default=None, help="label column name or index (default: last)")


def _load_data(args) -> LabeledDataset:
    label = args.label
    if label is not None:
        try:
            label = int(label)
        except ValueError:
            pass
    return load_csv(args.data, label_column=label)


def _parse_query(text: str, n: int) -> np.ndarray:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise DataFormatError(f"cannot parse query {text!r} as comma-separated numbers")
    if len(values) != n:
        raise DataFormatError(f"query has {len(values)} values, model expects {n}")
    return np.array(values)


def cmd_crossval(args) -> int:
    dataset = _load_data(args)
    result = cross_validate(
        dataset,
        algorithm=args.algo,
        hyper=_hyper_from_args(args),
        seed=args.seed,
        folds=args.folds,
        dataset_tag=Path(args.data).stem,
    )
    print(f"{result.mean:.4f} ± {result.std:.4f}")
    if args.out:
        result.write_csv(args.out)
    return 0


def cmd_train(args) -> int:
    dataset = _load_data(args)
    scaled, scaler = zscore_fit_transform(dataset)
    model, report = fit(scaled, _hyper_from_args(args), scaler=scaler)
    save_model(model, args.out)
    if report.epoch_losses:
        print(
            f"trained {model.m} points, {args.epochs} epochs: "
            f"loss {report.first_loss:.6f} -> {report.final_loss:.6f}"
        )
    else:
        print(f"stored {model.m} points with identity metrics (epochs=0)")
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    query = _parse_query(args.query, model.n)
    label, probs = predict(model, query)
    name = (
        model.dataset.label_names[label]
        if model.dataset.label_names is not None
        else str(label)
    )
    prob_text = ",".join(repr(float(p)) for p in probs.values)
    print(f"{name}\t{prob_text}")
    if args.out:
        Path(args.out).write_text(f"{label},{prob_text}\n", encoding="utf-8")
    return 0


def cmd_explain(args) -> int:
    model = load_model(args.model)
    query = _parse_query(args.query, model.n)
    profile = explain(model, query)
    text = ",".join(repr(float(r)) for r in profile.relevances)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    return 0


def cmd_fingerprints(args) -> int:
    model = load_model(args.model)
    fp = fingerprints(model)
    fp.write_csv(args.out)
    print(f"wrote {fp.n_classes} class profiles to {args.out}")
    return 0


def cmd_export_dist(args) -> int:
    model = load_model(args.model)
    matrix = export_distance_matrix(model, symmetrize=args.symmetrize)
    labels_out = args.labels_out or str(args.out) + ".labels"
    write_distance_matrix(matrix, model.dataset.labels, args.out, labels_out)
    print(f"wrote {matrix.shape[0]}x{matrix.shape[1]} matrix to {args.out}, labels to {labels_out}")
    return 0


def cmd_generate(args) -> int:
    if args.generator == "licorice":
        dataset = generate_licorice(
            cylinders=args.cylinders,
            per_cyl_inside=args.inside,
            per_cyl_outside=args.outside,
            radius=args.radius,
            length=args.length,
            seed=args.seed,
        )
    else:
        dataset = generate_classification(
            m=args.m,
            n=args.n,
            informative=args.informative,
            weak=args.weak,
            redundant=args.redundant,
            classes=args.classes,
            seed=args.seed,
        )
    write_csv(dataset, args.out)
    print(f"wrote {dataset.m} points ({dataset.n} features, {dataset.n_classes} classes) to {args.out}")
    return 0


def cmd_gradcheck(args) -> int:
    report = check_gradients(trials=args.trials, tol=args.tol, seed=args.seed)
    status = "PASS" if report.passed else "FAIL"
    print(
        f"{status}: max relative error {report.max_relative_error:.3e} over "
        f"{report.trials} trials ({report.components} components), tol {report.tolerance:.1e}"
    )
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lann",
        description="Weighted kNN with a learned diagonal metric per training point.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crossval", help="stratified 10-fold cross-validation accuracy")
    _add_data_flags(p)
    p.add_argument("--algo", choices=("lann", "knn"), default="lann")
    _add_hyper_flags(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None, help="write the result as a CSV row")
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("train", help="fit metrics on a dataset and save the model")
    _add_data_flags(p)
    _add_hyper_flags(p)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="classify one query point")
    p.add_argument("--model", required=True)
    p.add_argument("--query", required=True, help="comma-separated feature values")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("explain", help="feature-relevance profile of one prediction")
    p.add_argument("--model", required=True)
    p.add_argument("--query", required=True, help="comma-separated feature values")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("fingerprints", help="class-wise relevance profiles of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fingerprints)

    p = sub.add_parser("export-dist", help="pairwise local-metric distance matrix")
    p.add_argument("--model", required=True)
    p.add_argument("--symmetrize", choices=("mean", "min", "none"), default="mean")
    p.add_argument("--out", required=True)
    p.add_argument("--labels-out", default=None, help="companion labels file (default: <out>.labels)")
    p.set_defaults(func=cmd_export_dist)

    p = sub.add_parser("generate", help="write a synthetic dataset CSV")
    gen_sub = p.add_subparsers(dest="generator", required=True)

    g = gen_sub.add_parser("licorice", help="oriented cylinders with inside/outside labels")
    g.add_argument("--cylinders", type=int, default=5)
    g.add_argument("--inside", type=int, default=200, help="inside points per cylinder")
    g.add_argument("--outside", type=int, default=200, help="outside points per cylinder")
    g.add_argument("--radius", type=float, default=1.0)
    g.add_argument("--length", type=float, default=4.0)
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("-o", "--out", required=True)
    g.set_defaults(func=cmd_generate)

    g = gen_sub.add_parser("classification", help="strong/weak/redundant/noise features")
    g.add_argument("--m", type=int, default=2000)
    g.add_argument("--n", type=int, default=20)
    g.add_argument("--informative", type=int, default=2)
    g.add_argument("--weak", type=int, default=2)
    g.add_argument("--redundant", type=int, default=2)
    g.add_argument("--classes", type=int, default=2)
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("-o", "--out", required=True)
    g.set_defaults(func=cmd_generate)

    p = sub.add_parser("gradcheck", help="finite-difference check of the metric gradients")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gradcheck)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LannError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
