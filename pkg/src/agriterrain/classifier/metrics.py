"""Per-class evaluation from a confusion matrix.

The confusion matrix is indexed ``[predicted, target]``: columns hold the
true classes and rows the predictions. All rates are percentages. A rate
whose denominator is zero is undefined and reported as ``None``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from sklearn.metrics import confusion_matrix as _sk_confusion

from ..core import TerrainClass
from ..exceptions import ShapeError

METRIC_NAMES = ("recall", "specificity", "precision", "accuracy", "f1")


def confusion_matrix(y_true, y_pred, classes) -> np.ndarray:
    """Counts indexed ``[predicted, target]`` over ``classes``."""
    y_true, y_pred = np.asarray(y_true), np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ShapeError(f"target {y_true.shape} and prediction {y_pred.shape} differ in shape")
    return _sk_confusion(y_true, y_pred, labels=list(classes)).T


def _pct(num, den):
    return None if den == 0 else 100.0 * num / den


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    classes: tuple
    confusion: np.ndarray
    per_class: dict
    overall: float | None

    @classmethod
    def from_confusion(cls, confusion, classes) -> "EvaluationReport":
        cm = np.asarray(confusion, dtype=np.int64)
        K = len(classes)
        if cm.shape != (K, K):
            raise ShapeError(f"confusion matrix must be {K}x{K}, got {cm.shape}")
        total = int(cm.sum())
        per = {}
        for k, c in enumerate(classes):
            tp = int(cm[k, k])
            fn = int(cm[:, k].sum()) - tp
            fp = int(cm[k, :].sum()) - tp
            tn = total - tp - fn - fp
            recall = _pct(tp, tp + fn)
            precision = _pct(tp, tp + fp)
            if recall is None or precision is None or recall + precision == 0:
                f1 = None
            else:
                f1 = 2 * recall * precision / (recall + precision)
            per[c] = {
                "recall": recall,
                "specificity": _pct(tn, tn + fp),
                "precision": precision,
                "accuracy": _pct(tp + tn, total),
                "f1": f1,
            }
        return cls(tuple(classes), cm, per, _pct(int(np.trace(cm)), total))

    def to_dict(self) -> dict:
        return {
            "classes": [_label(c) for c in self.classes],
            "confusion": {"index": "[predicted][target]", "counts": self.confusion.tolist()},
            "per_class": {_label(c): dict(m) for c, m in self.per_class.items()},
            "overall": self.overall,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    def to_text(self) -> str:
        names = [_label(c) for c in self.classes]
        w = max(12, *(len(n) for n in names))
        head = ["Recall", "Specificity", "Precision", "Accuracy", "F1-score"]
        lines = ["Terrain type".ljust(w) + "".join(h.rjust(12) for h in head)]
        for c, name in zip(self.classes, names):
            m = self.per_class[c]
            lines.append(name.ljust(w) + "".join(_fmt(m[k]).rjust(12) for k in METRIC_NAMES))
        lines.append(f"Overall correct classification rate: {_fmt(self.overall)}%")
        lines.append("")
        lines.append("Confusion matrix (rows: predicted, columns: target)")
        lines.append("".ljust(w) + "".join(n.rjust(12) for n in names))
        for name, row in zip(names, self.confusion):
            lines.append(name.ljust(w) + "".join(str(int(v)).rjust(12) for v in row))
        return "\n".join(lines) + "\n"


def _fmt(v):
    return "-" if v is None else f"{v:.1f}"


def _label(c):
    c = c.item() if hasattr(c, "item") else c
    try:
        return TerrainClass(c).slug
    except (ValueError, TypeError):
        return str(c)


def evaluate(model, X, y, classes=None) -> EvaluationReport:
    """Predict ``X`` with ``model`` and score against ``y``.

    ``classes`` defaults to ``model.classes_``.
    """
    classes = model.classes_ if classes is None else classes
    pred = model.predict(X)
    return EvaluationReport.from_confusion(confusion_matrix(y, pred, classes), tuple(classes))
