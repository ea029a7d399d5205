"""Synthetic classification benchmark.

Training and test patches come from independent simulated runs per
terrain class. Every feature mask is scored by stratified k-fold
cross-validation on the training set and by accuracy on the test set.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..classifier import EcocSvmClassifier, EvaluationReport, evaluate, kfold_cv
from ..core import TerrainClass, VehicleParams
from ..exceptions import InvalidArgumentError
from ..features import mask_columns, mask_name
from ..features.extractor import patch_table
from ..mapping import build_patches
from .runs import CAMERA_RATE, synth_run

TRAIN_PER_CLASS = 59
TEST_COMPOSITION = {
    TerrainClass.PLOUGHED: 108,
    TerrainClass.UNPLOUGHED: 125,
    TerrainClass.DIRT_ROAD: 48,
    TerrainClass.GRAVEL: 21,
}
MASKS = ("color", "geom", "contact", "color+contact", "all")


def labelled_patches(terrain, n: int, seed: int, speed: float = 0.5, params: VehicleParams | None = None,
                     **run_kw):
    """``(X, y)`` for ``n`` completed patches of one terrain class taken
    from a single simulated run."""
    terrain = TerrainClass.parse(terrain)
    params = params or VehicleParams()
    # patches are spaced four camera frames apart in time
    duration = 4 / CAMERA_RATE * n * 1.1 + 10.0
    for _ in range(3):
        series, _ = synth_run(terrain, duration, speed, seed, params, **run_kw)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            patches = build_patches(series, params)
        X, y, _ = patch_table(patches)
        X, y = X[np.all(np.isfinite(X), axis=1)], y[np.all(np.isfinite(X), axis=1)]
        if len(X) >= n:
            return X[:n], y[:n]
        duration *= 1.5
    raise InvalidArgumentError(f"could not collect {n} {terrain.slug} patches")


def benchmark_data(seed: int = 0, train_per_class: int = TRAIN_PER_CLASS, test_composition=None, **run_kw):
    """Training and independent test sets, ``(X_train, y_train, X_test, y_test)``."""
    test_composition = test_composition or TEST_COMPOSITION
    seeds = np.random.SeedSequence(seed).generate_state(2 * len(TerrainClass))
    parts = {"train": [], "test": []}
    for i, cls in enumerate(TerrainClass):
        parts["train"].append(labelled_patches(cls, train_per_class, int(seeds[2 * i]), **run_kw))
        if test_composition.get(cls, 0):
            parts["test"].append(labelled_patches(cls, test_composition[cls], int(seeds[2 * i + 1]), **run_kw))
    Xtr, ytr = (np.concatenate(a) for a in zip(*parts["train"]))
    Xte, yte = (np.concatenate(a) for a in zip(*parts["test"]))
    return Xtr, ytr, Xte, yte


@dataclass(frozen=True, eq=False)
class MaskScore:
    mask: str
    cv_error: float
    test: EvaluationReport

    @property
    def test_accuracy(self) -> float:
        return self.test.overall


def run_benchmark(seed: int = 0, masks=MASKS, C: float = 1.0, k: int = 5, data=None, **run_kw) -> dict:
    """Score every mask; returns ``{mask name: MaskScore}``."""
    Xtr, ytr, Xte, yte = data if data is not None else benchmark_data(seed, **run_kw)
    out = {}
    for mask in masks:
        cols = mask_columns(mask)
        cv = kfold_cv(Xtr[:, cols], ytr, k=k, C=C, seed=seed)
        model = EcocSvmClassifier(C=C, random_state=seed).fit(Xtr[:, cols], ytr)
        report = evaluate(model, Xte[:, cols], yte, classes=tuple(int(c) for c in TerrainClass))
        out[mask_name(mask)] = MaskScore(mask_name(mask), cv.mean_error, report)
    return out
