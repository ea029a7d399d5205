import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from agriterrain.classifier import EvaluationReport, confusion_matrix, evaluate
from agriterrain.core import TerrainClass
from agriterrain.exceptions import ShapeError

P, U, D, G = (int(c) for c in TerrainClass)


def test_confusion_orientation():
    cm = confusion_matrix([0, 0, 1], [0, 1, 1], [0, 1])
    # rows predicted, columns target
    np.testing.assert_array_equal(cm, [[1, 0], [1, 1]])
    with pytest.raises(ShapeError):
        confusion_matrix([0, 1], [0], [0, 1])


def test_two_class_example():
    r = EvaluationReport.from_confusion([[9, 1], [2, 8]], (0, 1))
    assert r.per_class[0]["recall"] == pytest.approx(100 * 9 / 11)
    assert round(r.per_class[0]["recall"], 1) == 81.8
    assert r.per_class[0]["precision"] == pytest.approx(90.0)


def test_perfect_predictions():
    y = [0, 1, 2, 3, 3, 2]
    r = EvaluationReport.from_confusion(confusion_matrix(y, y, range(4)), tuple(range(4)))
    assert r.overall == 100.0
    for m in r.per_class.values():
        assert all(v == 100.0 for v in m.values())
    assert np.count_nonzero(r.confusion - np.diag(np.diag(r.confusion))) == 0


def test_absent_class_is_undefined():
    r = EvaluationReport.from_confusion(confusion_matrix([0, 1], [0, 1], [0, 1, 2]), (0, 1, 2))
    m = r.per_class[2]
    assert m["recall"] is None and m["precision"] is None and m["f1"] is None
    assert m["specificity"] == 100.0
    assert "-" in r.to_text().splitlines()[3]


def test_zero_precision_and_recall_gives_undefined_f1():
    r = EvaluationReport.from_confusion([[0, 3], [2, 0]], (0, 1))
    assert r.per_class[0]["recall"] == 0.0 and r.per_class[0]["precision"] == 0.0
    assert r.per_class[0]["f1"] is None


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=200))
def test_metric_identities(pairs):
    y, p = map(np.array, zip(*pairs))
    r = EvaluationReport.from_confusion(confusion_matrix(y, p, range(4)), tuple(range(4)))
    cm = r.confusion
    assert cm.sum() == len(y)
    assert r.overall == pytest.approx(100 * np.mean(y == p))
    for k in range(4):
        m = r.per_class[k]
        assert cm[:, k].sum() == np.sum(y == k)
        tp, fp, fn = cm[k, k], cm[k].sum() - cm[k, k], cm[:, k].sum() - cm[k, k]
        tn = len(y) - tp - fp - fn
        assert m["accuracy"] == pytest.approx(100 * (tp + tn) / len(y))
        for v in m.values():
            assert v is None or 0 <= v <= 100
        if m["f1"] is not None:
            assert m["f1"] <= 2 * min(m["precision"], m["recall"]) + 1e-9
            assert min(m["precision"], m["recall"]) - 1e-9 <= m["f1"] <= max(m["precision"], m["recall"]) + 1e-9


def test_report_serialisation():
    r = EvaluationReport.from_confusion([[5, 1], [0, 4]], (int(TerrainClass.GRAVEL), int(TerrainClass.PLOUGHED)))
    doc = json.loads(r.to_json())
    assert doc["classes"] == ["gravel", "ploughed"]
    assert doc["confusion"]["counts"] == [[5, 1], [0, 4]]
    text = r.to_text()
    assert "Overall correct classification rate: 90.0%" in text
    assert text.splitlines()[0].split()[:3] == ["Terrain", "type", "Recall"]


def test_evaluate_uses_model_predictions():
    class Fixed:
        classes_ = np.array([0, 1])

        def predict(self, X):
            return np.asarray(X)[:, 0].astype(int)

    r = evaluate(Fixed(), [[0], [1], [1]], [0, 1, 0])
    np.testing.assert_array_equal(r.confusion, [[1, 0], [1, 1]])
