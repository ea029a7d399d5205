"""Feature matrices from terrain patches, and their CSV form."""

from __future__ import annotations

import csv
import io
import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..core import TerrainClass
from ..exceptions import InvalidArgumentError, ShapeError
from ..logio import atomic_write_text
from . import FEATURE_NAMES, mask_columns, mask_name


class PatchFeatureExtractor(TransformerMixin, BaseEstimator):
    """Select the feature families named by ``mask`` from patches.

    Input is a sequence of objects with ``feature_vector()`` (terrain
    patches) or an array of full 20-column feature rows.

    Parameters
    ----------
    mask : str, default="all"
        ``color``, ``geom``, ``contact``, ``color+contact`` or ``all``.
    """

    def __init__(self, mask="all"):
        self.mask = mask

    def fit(self, X=None, y=None):
        self.columns_ = mask_columns(self.mask)
        self.n_features_in_ = len(FEATURE_NAMES)
        return self

    def transform(self, X):
        cols = mask_columns(self.mask)
        return full_feature_matrix(X)[:, cols]

    def get_feature_names_out(self, input_features=None):
        return np.array([FEATURE_NAMES[i] for i in mask_columns(self.mask)], dtype=object)


def full_feature_matrix(X) -> np.ndarray:
    if len(X) and hasattr(X[0], "feature_vector"):
        return np.array([p.feature_vector() for p in X])
    M = np.asarray(X, dtype=float)
    if M.ndim != 2 or M.shape[1] != len(FEATURE_NAMES):
        raise ShapeError(f"expected rows of {len(FEATURE_NAMES)} features, got shape {M.shape}")
    return M


def patch_table(patches, *, labelled_only: bool = True, completed_only: bool = True):
    """Feature rows and labels of usable patches.

    Returns ``(X, y, kept)`` with ``X`` of shape (n, 20), ``y`` the class
    codes (``-1`` for unlabelled) and ``kept`` the patch indices used.
    """
    kept = [i for i, p in enumerate(patches)
            if (not completed_only or p.completed) and (not labelled_only or p.label is not None)]
    X = np.array([patches[i].feature_vector() for i in kept]).reshape(-1, len(FEATURE_NAMES))
    y = np.array([-1 if patches[i].label is None else int(patches[i].label) for i in kept], dtype=int)
    return X, y, kept


def write_feature_csv(path, X, y) -> None:
    """Write ``label`` plus the 20 named features per row; undefined
    values are left empty."""
    X = np.asarray(X, dtype=float).reshape(-1, len(FEATURE_NAMES))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("label",) + FEATURE_NAMES)
    for row, lab in zip(X, y):
        slug = "" if lab is None or int(lab) < 0 else TerrainClass(int(lab)).slug
        w.writerow([slug] + [repr(float(v)) if math.isfinite(v) else "" for v in row])
    atomic_write_text(path, buf.getvalue())


def read_feature_csv(path):
    """Read a feature table; returns ``(X, y)`` with unlabelled rows coded
    ``-1`` and missing values as NaN."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != ("label",) + FEATURE_NAMES:
        raise InvalidArgumentError(f"{path}: header must be 'label' followed by the 20 feature names")
    X, y = [], []
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != 1 + len(FEATURE_NAMES):
            raise InvalidArgumentError(f"{path}: line {n} has {len(row)} fields")
        try:
            y.append(int(TerrainClass.parse(row[0])) if row[0] else -1)
            X.append([float(v) if v else math.nan for v in row[1:]])
        except ValueError as exc:
            raise InvalidArgumentError(f"{path}: line {n}: {exc}") from None
    return np.array(X).reshape(-1, len(FEATURE_NAMES)), np.array(y, dtype=int)


__all__ = ["PatchFeatureExtractor", "full_feature_matrix", "mask_name", "patch_table",
           "read_feature_csv", "write_feature_csv"]
