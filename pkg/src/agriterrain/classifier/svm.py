"""Linear soft-margin SVM trained by dual coordinate descent.

The bias is learnt as the weight of a constant unit feature, so the dual
problem has only box constraints::

    min_a  0.5 * a^T Q a - sum(a),   0 <= a_i <= C,
    Q_ij = y_i y_j (x_i . x_j + 1)
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ..exceptions import DegenerateLabelsError, InvalidArgumentError, ShapeError


@numba.njit(cache=True)
def _dual_cd(X, y, C, tol, max_epochs, seed):
    n, d = X.shape
    alpha = np.zeros(n)
    w = np.zeros(d)
    qii = np.empty(n)
    for i in range(n):
        qii[i] = X[i] @ X[i]
    order = np.arange(n)
    np.random.seed(seed)
    epoch = 0
    while epoch < max_epochs:
        epoch += 1
        np.random.shuffle(order)
        pg_max = -np.inf
        pg_min = np.inf
        for k in range(n):
            i = order[k]
            g = y[i] * (w @ X[i]) - 1.0
            if alpha[i] <= 0.0:
                pg = min(g, 0.0)
            elif alpha[i] >= C:
                pg = max(g, 0.0)
            else:
                pg = g
            pg_max = max(pg_max, pg)
            pg_min = min(pg_min, pg)
            if pg != 0.0 and qii[i] > 0.0:
                a_old = alpha[i]
                a_new = min(max(a_old - g / qii[i], 0.0), C)
                if a_new != a_old:
                    w += (a_new - a_old) * y[i] * X[i]
                    alpha[i] = a_new
        if pg_max - pg_min <= tol:
            break
    return w, alpha, epoch


def augment(X) -> np.ndarray:
    """Append the constant bias feature."""
    X = np.asarray(X, dtype=np.float64)
    return np.hstack((X, np.ones((X.shape[0], 1))))


def dual_objective(alpha, X, y) -> float:
    """``0.5 * a^T Q a - sum(a)`` for the bias-augmented problem."""
    v = (np.asarray(alpha) * np.asarray(y)) @ augment(X)
    return float(0.5 * v @ v - np.sum(alpha))


@dataclass(frozen=True, eq=False)
class BinaryLinearSvm:
    weights: np.ndarray
    bias: float
    C: float
    dual_coef: np.ndarray | None = None
    n_epochs: int = 0

    def decision_function(self, X) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.weights + self.bias


def train_binary_svm(X, y, C: float = 1.0, tol: float = 1e-6, max_iter: int = 10_000,
                     seed: int = 0) -> BinaryLinearSvm:
    """Fit a linear SVM on labels in {-1, +1}.

    Stops when the spread of projected gradients (a KKT violation measure)
    falls to ``tol`` or after ``max_iter`` epochs. The coordinate order is
    a seeded shuffle per epoch, so results are reproducible.

    Raises
    ------
    DegenerateLabelsError
        If only one label value is present.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y):
        raise ShapeError(f"X {X.shape} and y {y.shape} do not match")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise InvalidArgumentError("labels must be -1 or +1")
    if len(np.unique(y)) < 2:
        raise DegenerateLabelsError("binary SVM needs both labels present")
    if not C > 0:
        raise InvalidArgumentError("C must be positive")
    w, alpha, epochs = _dual_cd(np.ascontiguousarray(augment(X)), y, float(C), float(tol), int(max_iter), int(seed))
    return BinaryLinearSvm(w[:-1].copy(), float(w[-1]), float(C), alpha, int(epochs))


class LinearSVM(ClassifierMixin, BaseEstimator):
    """Binary linear SVM (hinge loss, L2 penalty) with a dual coordinate
    descent solver.

    ``classes_[1]`` is the positive class; a zero score predicts
    ``classes_[0]``.

    Parameters
    ----------
    C : float, default=1.0
        Inverse regularisation strength.
    tol : float, default=1e-6
        Stopping tolerance on the projected-gradient spread.
    max_iter : int, default=10000
        Maximum number of epochs.
    random_state : int, default=0
        Seed of the coordinate order.
    """

    def __init__(self, C=1.0, tol=1e-6, max_iter=10_000, random_state=0):
        self.C = C
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        if len(self.classes_) != 2:
            raise DegenerateLabelsError(f"LinearSVM needs exactly 2 classes, got {len(self.classes_)}")
        yy = np.where(y == self.classes_[1], 1.0, -1.0)
        self.model_ = train_binary_svm(X, yy, self.C, self.tol, self.max_iter, self.random_state)
        self.coef_ = self.model_.weights
        self.intercept_ = self.model_.bias
        self.dual_coef_ = self.model_.dual_coef
        self.n_iter_ = self.model_.n_epochs
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self)
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ShapeError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return self.model_.decision_function(X)

    def predict(self, X):
        return self.classes_[(self.decision_function(X) > 0).astype(int)]
