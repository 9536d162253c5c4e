"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``.

Ionosphere is not redistributable with this package and no network access
is assumed: place it at data/ionosphere.csv (or $LANN_DATA_DIR) to enable
the two checks that need it; they skip with an explanation otherwise.
The embedding-ordering criterion for the UMAP frontend lives in
frontend/test (vitest), not here.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import lann
from lann import datasets

from conftest import random_dataset, random_metric_model

SEED = 42  # the CLI-default seed, used for every benchmark run below


def report(name: str, passed: bool, detail: str) -> None:
    print(f"\n[{'PASS' if passed else 'FAIL'}] {name}: {detail}")


def skip(name: str, why: str) -> None:
    print(f"\n[SKIP] {name}: {why}")
    pytest.skip(why)


def _ionosphere():
    try:
        return datasets.local_csv("ionosphere")
    except lann.DataFormatError:
        return None


@pytest.fixture(scope="module")
def bench():
    return {
        "iris": datasets.iris(),
        "wine": datasets.wine(),
        "breast_cancer": datasets.breast_cancer(),
    }


class TestGradientCorrectness:
    def test_finite_difference_agreement(self):
        name = "gradient correctness (100 random instances, h=1e-5)"
        t0 = time.monotonic()
        rep = lann.check_gradients(trials=100, tol=1e-4, step=1e-5, seed=SEED)
        elapsed = time.monotonic() - t0
        ok = rep.passed and elapsed < 30.0
        report(name, ok, f"max relative error {rep.max_relative_error:.2e} "
                         f"(tol 1e-4) over {rep.components} components in {elapsed:.1f}s")
        assert rep.max_relative_error <= 1e-4
        assert elapsed < 30.0


class TestBaselineReduction:
    def test_epochs_zero_equals_knn_fold_for_fold(self, bench):
        name = "baseline reduction (lann epochs=0 == knn, fold for fold)"
        zero = lann.Hyperparams(epochs=0)
        details = []
        ok = True
        for tag, ds in bench.items():
            knn = lann.cross_validate(ds, "knn", seed=SEED, dataset_tag=tag)
            red = lann.cross_validate(ds, "lann", zero, seed=SEED, dataset_tag=tag)
            same = knn.fold_accuracies == red.fold_accuracies
            ok &= same
            details.append(f"{tag}={'exact' if same else 'MISMATCH'}")
        report(name, ok, ", ".join(details))
        assert ok


class TestOracleEquivalence:
    def test_find_neighbors_equals_brute_force(self):
        name = "oracle equivalence (find_neighbors == brute force, 200 datasets)"
        rng = np.random.default_rng(SEED)
        for trial in range(200):
            ds = random_dataset(rng)
            model = random_metric_model(ds, rng)
            exclude = int(rng.integers(0, ds.m)) if rng.random() < 0.5 else None
            k = int(rng.integers(1, ds.m - (1 if exclude is not None else 0) + 1))
            query = rng.standard_normal(ds.n)
            a = lann.find_neighbors(model, query, k, exclude=exclude)
            b = lann.brute_force_neighbors(model, query, k, exclude=exclude)
            assert a.indices.tolist() == b.indices.tolist(), f"trial {trial}"
        report(name, True, "exact index equality on all 200 randomized datasets")


class TestTableOneAbsolute:
    @pytest.mark.parametrize(
        "tag,threshold,paper",
        [
            ("iris", 0.93, "0.96 +/- 0.0120"),
            ("wine", 0.93, "0.96 +/- 0.0153"),
            ("breast_cancer", 0.91, "0.94 +/- 0.0077"),
        ],
    )
    def test_cv_accuracy(self, bench, tag, threshold, paper):
        name = f"benchmark accuracy, absolute ({tag})"
        t0 = time.monotonic()
        result = lann.cross_validate(bench[tag], "lann", seed=SEED, dataset_tag=tag)
        elapsed = time.monotonic() - t0
        ok = result.mean >= threshold and elapsed < 120.0
        report(name, ok, f"mean {result.mean:.4f} +/- {result.std:.4f} "
                         f">= {threshold} (reference {paper}) in {elapsed:.0f}s")
        assert result.mean >= threshold
        assert elapsed < 120.0


class TestTableOneRelative:
    def test_ionosphere_gain_over_knn(self):
        name = "benchmark accuracy, relative (ionosphere: lann - knn >= 0.05)"
        ds = _ionosphere()
        if ds is None:
            skip(name, "data/ionosphere.csv not present (not obtainable offline); "
                       "supply the CSV to run this criterion")
        t0 = time.monotonic()
        knn = lann.cross_validate(ds, "knn", seed=SEED, dataset_tag="ionosphere")
        res = lann.cross_validate(ds, "lann", seed=SEED, dataset_tag="ionosphere")
        elapsed = time.monotonic() - t0
        gain = res.mean - knn.mean
        ok = gain >= 0.05 and elapsed < 300.0
        report(name, ok, f"lann {res.mean:.4f} vs knn {knn.mean:.4f} "
                         f"(gain {gain:+.4f}, reference 0.90 vs 0.77) in {elapsed:.0f}s")
        assert gain >= 0.05
        assert elapsed < 300.0


class TestDescentProperty:
    def test_iris_loss_descends(self, bench):
        name = "descent property (iris)"
        scaled, scaler = lann.zscore_fit_transform(bench["iris"])
        _, rep = lann.fit(scaled, lann.Hyperparams(seed=SEED), scaler=scaler)
        ok = rep.final_loss < rep.first_loss
        report(name, ok, f"epoch-mean loss {rep.first_loss:.4f} -> {rep.final_loss:.4f}")
        assert ok

    def test_ionosphere_loss_descends(self):
        name = "descent property (ionosphere)"
        ds = _ionosphere()
        if ds is None:
            skip(name, "data/ionosphere.csv not present (not obtainable offline)")
        scaled, scaler = lann.zscore_fit_transform(ds)
        _, rep = lann.fit(scaled, lann.Hyperparams(seed=SEED), scaler=scaler)
        ok = rep.final_loss < rep.first_loss
        report(name, ok, f"epoch-mean loss {rep.first_loss:.4f} -> {rep.final_loss:.4f}")
        assert ok


class TestFingerprintProperty:
    def test_breast_cancer_class_profiles_differ(self, bench):
        name = "fingerprint property (breast cancer class profiles)"
        scaled, scaler = lann.zscore_fit_transform(bench["breast_cancer"])
        model, _ = lann.fit(scaled, lann.Hyperparams(seed=0), scaler=scaler)
        fp = lann.fingerprints(model)
        sums_ok = all(
            abs(float(p.relevances.sum()) - 1.0) <= 1e-9 for p in fp.profiles
        )
        linf = float(np.abs(fp.profiles[0].relevances - fp.profiles[1].relevances).max())
        ok = linf > 0.01 and sums_ok
        report(name, ok, f"L_inf distance {linf:.4f} > 0.01, profiles sum to 1: {sums_ok}")
        assert sums_ok
        assert linf > 0.01


class TestLicoriceDistanceProperty:
    def test_trained_matrix_beats_euclidean(self):
        name = "licorice distance property (lann matrix vs euclidean, k=5)"
        ds = lann.generate_licorice(seed=SEED)
        scaled, scaler = lann.zscore_fit_transform(ds)
        ident = lann.LannModel(
            scaled, np.ones((ds.m, ds.n)), lann.Hyperparams(), scaler
        )
        d_eucl = lann.export_distance_matrix(ident, "mean")
        acc_eucl = lann.reclassify_by_matrix(d_eucl, ds.labels, 5)
        # licorice experiment configuration: beta matched to this set's
        # support scale, wider adaptation radius (see README)
        hyper = lann.Hyperparams(
            k=10, beta=32.0, learning_rate=1.5, epochs=100, seed=SEED
        )
        model, _ = lann.fit(scaled, hyper, scaler=scaler)
        d_lann = lann.export_distance_matrix(model, "mean")
        acc_lann = lann.reclassify_by_matrix(d_lann, ds.labels, 5)
        gain = acc_lann - acc_eucl
        ok = gain >= 0.03
        report(name, ok, f"lann {acc_lann:.4f} vs euclid {acc_eucl:.4f} (gain {gain:+.4f} >= 0.03)")
        assert gain >= 0.03


class TestDeterminism:
    COMMANDS = [
        ["generate", "licorice", "--seed", "7", "--inside", "30", "--outside", "30",
         "-o", "{dir}/lic.csv"],
        ["generate", "classification", "--m", "50", "--n", "8", "--seed", "7",
         "-o", "{dir}/cls.csv"],
        ["train", "--data", "{dir}/lic.csv", "--epochs", "3", "--seed", "7",
         "--out", "{dir}/model.lann"],
        ["crossval", "--data", "{dir}/cls.csv", "--algo", "lann", "--epochs", "2",
         "--folds", "5", "--seed", "7", "--out", "{dir}/cv.csv"],
        ["fingerprints", "--model", "{dir}/model.lann", "--out", "{dir}/fp.csv"],
        ["export-dist", "--model", "{dir}/model.lann", "--out", "{dir}/dist.csv"],
        ["explain", "--model", "{dir}/model.lann", "--query", "1.0,2.0,3.0",
         "--out", "{dir}/explain.csv"],
        ["predict", "--model", "{dir}/model.lann", "--query", "1.0,2.0,3.0",
         "--out", "{dir}/pred.csv"],
    ]

    def run_all(self, workdir: Path) -> dict[str, bytes]:
        workdir.mkdir()
        for cmd in self.COMMANDS:
            argv = [sys.executable, "-m", "lann.cli"] + [
                a.format(dir=workdir) for a in cmd
            ]
            proc = subprocess.run(argv, capture_output=True, text=True)
            assert proc.returncode == 0, f"{argv}: {proc.stderr}"
        return {
            f.name: f.read_bytes() for f in sorted(workdir.iterdir()) if f.is_file()
        }

    def test_repeated_cli_runs_byte_identical(self, tmp_path):
        name = "determinism (CLI outputs byte-identical across reruns)"
        first = self.run_all(tmp_path / "run1")
        second = self.run_all(tmp_path / "run2")
        assert first.keys() == second.keys()
        mismatched = [k for k in first if first[k] != second[k]]
        ok = not mismatched
        report(name, ok, f"{len(first)} output files compared"
                         + (f"; mismatched: {mismatched}" if mismatched else ""))
        assert ok


# The artificial-classification set is compared relatively (lann vs knn) in
# demos/benchmark_accuracy.py rather than asserted here: at the specified
# unit class separation the two algorithms sit within seed noise of each
# other, so a hard inequality would be flaky (see the decisions notes).
