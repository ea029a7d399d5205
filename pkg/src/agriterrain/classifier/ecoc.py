"""Multi-class linear SVM via one-vs-one error-correcting output codes."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ..core import TerrainClass
from ..exceptions import (
    DegenerateLabelsError,
    InsufficientClassDataError,
    InvalidArgumentError,
    InvalidKError,
    ShapeError,
)
from ..logio import atomic_write_text
from .svm import BinaryLinearSvm, train_binary_svm

MODEL_FORMAT = "agriterrain-ecoc"
MODEL_VERSION = 1
STD_FLOOR = 1e-12
_MODEL_KEYS = {"format", "version", "params", "classes", "class_names", "coding_matrix", "standardization",
               "learners"}


class Standardizer(TransformerMixin, BaseEstimator):
    """Zero-mean, unit-variance scaling with population statistics.

    Standard deviations below ``1e-12`` are floored, so constant columns
    map to zero on the training data.
    """

    def fit(self, X, y=None):
        X = check_array(X)
        self.mean_ = X.mean(axis=0)
        self.scale_ = np.maximum(X.std(axis=0), STD_FLOOR)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ShapeError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return (X - self.mean_) / self.scale_


def one_vs_one_coding(n_classes: int) -> np.ndarray:
    """Coding matrix of shape (K, K(K-1)/2). Column ``l`` for pair (i, j),
    i < j, holds +1 in row i, -1 in row j and 0 elsewhere."""
    pairs = list(combinations(range(n_classes), 2))
    M = np.zeros((n_classes, len(pairs)), dtype=np.int8)
    for col, (i, j) in enumerate(pairs):
        M[i, col], M[j, col] = 1, -1
    return M


def hinge_decode(scores, coding) -> np.ndarray:
    """Loss-weighted decoding; returns per-class losses of shape (n, K).

    The loss of class k is ``sum_l |M_kl| max(0, 1 - M_kl s_l) / 2``
    normalised by ``sum_l |M_kl|``.
    """
    S = np.atleast_2d(np.asarray(scores, dtype=float))
    M = np.asarray(coding, dtype=float)
    per = np.maximum(0.0, 1.0 - S[:, None, :] * M[None, :, :]) / 2 * np.abs(M)[None]
    return per.sum(axis=2) / np.abs(M).sum(axis=1)


def _class_to_json(c):
    c = c.item() if hasattr(c, "item") else c
    return c


class EcocSvmClassifier(ClassifierMixin, BaseEstimator):
    """One-vs-one ECOC ensemble of linear SVMs on standardised features.

    Each of the K(K-1)/2 learners separates one pair of classes (lower
    class index positive). Prediction picks the class with the smallest
    loss-weighted hinge decoding loss; ties go to the lowest class index.

    Parameters
    ----------
    C : float, default=1.0
        Box constraint of every binary learner.
    tol : float, default=1e-6
        Solver stopping tolerance.
    max_iter : int, default=10000
        Solver epoch cap.
    random_state : int, default=0
        Seed of the coordinate order; learner ``l`` uses ``random_state + l``.

    Attributes
    ----------
    classes_ : ndarray of shape (K,)
    coding_matrix_ : ndarray of shape (K, L)
    learners_ : list of BinaryLinearSvm
    scaler_ : Standardizer
    """

    def __init__(self, C=1.0, tol=1e-6, max_iter=10_000, random_state=0):
        self.C = C
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        classes, counts = np.unique(y, return_counts=True)
        if len(classes) < 2:
            raise DegenerateLabelsError("training labels contain a single class")
        if np.any(counts < 2):
            few = [_class_to_json(c) for c in classes[counts < 2]]
            raise InsufficientClassDataError(f"classes with fewer than 2 samples: {few}")
        if not self.C > 0:
            raise InvalidArgumentError("C must be positive")
        self.classes_ = classes
        self.n_features_in_ = X.shape[1]
        self.scaler_ = Standardizer().fit(X)
        Z = self.scaler_.transform(X)
        self.coding_matrix_ = one_vs_one_coding(len(classes))
        self.learners_ = []
        for col, (i, j) in enumerate(combinations(range(len(classes)), 2)):
            rows = (y == classes[i]) | (y == classes[j])
            yy = np.where(y[rows] == classes[i], 1.0, -1.0)
            self.learners_.append(train_binary_svm(
                Z[rows], yy, self.C, self.tol, self.max_iter, int(self.random_state) + col))
        return self

    def _check_X(self, X):
        check_is_fitted(self)
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ShapeError(f"expected {self.n_features_in_} features, got shape {X.shape}")
        return check_array(X)

    def decision_function(self, X):
        """Learner scores, shape (n, L)."""
        Z = self.scaler_.transform(self._check_X(X))
        return np.column_stack([lr.decision_function(Z) for lr in self.learners_])

    def decoding_loss(self, X):
        """Per-class decoding losses, shape (n, K)."""
        return hinge_decode(self.decision_function(X), self.coding_matrix_)

    def predict(self, X):
        return self.classes_[np.argmin(self.decoding_loss(X), axis=1)]

    # persistence

    def to_dict(self, **extra) -> dict:
        check_is_fitted(self)
        clash = _MODEL_KEYS & set(extra)
        if clash:
            raise InvalidArgumentError(f"reserved model keys: {sorted(clash)}")
        classes = [_class_to_json(c) for c in self.classes_]
        doc = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "params": {"C": float(self.C), "tol": float(self.tol), "max_iter": int(self.max_iter),
                       "random_state": int(self.random_state)},
            "classes": classes,
            "coding_matrix": self.coding_matrix_.tolist(),
            "standardization": {"mean": self.scaler_.mean_.tolist(), "std": self.scaler_.scale_.tolist()},
            "learners": [{"positive": classes[i], "negative": classes[j], "weights": lr.weights.tolist(),
                          "bias": lr.bias}
                         for (i, j), lr in zip(combinations(range(len(classes)), 2), self.learners_)],
        }
        try:
            doc["class_names"] = [TerrainClass(c).slug for c in classes]
        except (ValueError, TypeError):
            pass
        doc.update(extra)
        return doc

    def to_json(self, **extra) -> str:
        return json.dumps(self.to_dict(**extra), indent=1, sort_keys=True) + "\n"

    def save(self, path, **extra) -> None:
        """Write the model as JSON; ``extra`` keys are stored alongside
        (e.g. the feature mask)."""
        atomic_write_text(path, self.to_json(**extra))

    @classmethod
    def from_dict(cls, doc: dict) -> "EcocSvmClassifier":
        if doc.get("format") != MODEL_FORMAT:
            raise InvalidArgumentError(f"not an {MODEL_FORMAT} model file")
        if doc.get("version") != MODEL_VERSION:
            raise InvalidArgumentError(f"unsupported model version {doc.get('version')!r}")
        try:
            model = cls(**doc["params"])
            model.classes_ = np.asarray(doc["classes"])
            model.coding_matrix_ = np.asarray(doc["coding_matrix"], dtype=np.int8)
            scaler = Standardizer()
            scaler.mean_ = np.asarray(doc["standardization"]["mean"], dtype=float)
            scaler.scale_ = np.asarray(doc["standardization"]["std"], dtype=float)
            scaler.n_features_in_ = len(scaler.mean_)
            model.scaler_ = scaler
            model.n_features_in_ = scaler.n_features_in_
            model.learners_ = [
                BinaryLinearSvm(np.asarray(lr["weights"], dtype=float), float(lr["bias"]), float(model.C))
                for lr in doc["learners"]
            ]
        except (KeyError, TypeError) as exc:
            raise InvalidArgumentError(f"malformed model document: {exc}") from None
        model.metadata_ = {k: v for k, v in doc.items() if k not in _MODEL_KEYS}
        K = len(model.classes_)
        if model.coding_matrix_.shape != (K, K * (K - 1) // 2) or len(model.learners_) != K * (K - 1) // 2:
            raise InvalidArgumentError("model document has inconsistent class/learner counts")
        if any(len(lr.weights) != model.n_features_in_ for lr in model.learners_):
            raise InvalidArgumentError("learner weights do not match the standardisation size")
        return model

    @classmethod
    def load(cls, path) -> "EcocSvmClassifier":
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidArgumentError(f"{path}: not valid JSON ({exc})") from None
        return cls.from_dict(doc)


def stratified_folds(y, k: int, seed: int = 0) -> np.ndarray:
    """Fold index per sample.

    Samples of each class are shuffled with a seeded generator and dealt
    round-robin; the dealing position carries over from one class to the
    next, so fold sizes differ by at most one overall and per-class counts
    differ by at most one between folds.
    """
    y = np.asarray(y)
    n = len(y)
    if not isinstance(k, (int, np.integer)) or k < 2 or k > n:
        raise InvalidKError(f"k must be an integer in [2, {n}], got {k!r}")
    rng = np.random.default_rng(seed)
    fold = np.empty(n, dtype=int)
    pos = 0
    for c in np.unique(y):
        idx = rng.permutation(np.flatnonzero(y == c))
        fold[idx] = (pos + np.arange(len(idx))) % k
        pos += len(idx)
    return fold


@dataclass(frozen=True, eq=False)
class CVResult:
    mean_error: float
    fold_errors: tuple[float, ...]
    models: tuple[EcocSvmClassifier, ...]
    folds: np.ndarray

    @property
    def mean_accuracy(self) -> float:
        return 1.0 - self.mean_error


def kfold_cv(X, y, k: int = 5, C: float = 1.0, seed: int = 0, **params) -> CVResult:
    """Stratified k-fold cross-validation of :class:`EcocSvmClassifier`.

    Standardisation is refit inside every training fold. Returns the mean
    fold misclassification rate and the per-fold models.
    """
    X, y = check_X_y(X, y)
    folds = stratified_folds(y, k, seed)
    errors, models = [], []
    for f in range(k):
        test = folds == f
        model = EcocSvmClassifier(C=C, random_state=seed, **params).fit(X[~test], y[~test])
        errors.append(float(np.mean(model.predict(X[test]) != y[test])))
        models.append(model)
    return CVResult(float(np.mean(errors)), tuple(errors), tuple(models), folds)
