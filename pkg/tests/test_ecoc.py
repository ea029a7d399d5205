import json
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from agriterrain.classifier import (
    EcocSvmClassifier,
    LinearSVM,
    Standardizer,
    hinge_decode,
    kfold_cv,
    one_vs_one_coding,
    stratified_folds,
)
from agriterrain.exceptions import (
    DegenerateLabelsError,
    InsufficientClassDataError,
    InvalidArgumentError,
    InvalidKError,
    ShapeError,
)
from agriterrain.features import mask_columns
from agriterrain.features.extractor import patch_table
from oracles import vote_decode


def blobs(k=3, n=20, spread=0.4, seed=0, d=2):
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-4, 4, (k, d))
    X = np.vstack([rng.normal(c, spread, (n, d)) for c in centers])
    return X, np.repeat(np.arange(k), n)


def test_standardizer_population_convention():
    s = Standardizer().fit([[0.0, 5.0], [2.0, 5.0]])
    np.testing.assert_array_equal(s.mean_, [1, 5])
    np.testing.assert_array_equal(s.scale_, [1, 1e-12])
    np.testing.assert_array_equal(s.transform([[0.0, 5.0], [2.0, 5.0]]), [[-1, 0], [1, 0]])


def test_standardized_training_set():
    X = np.random.default_rng(0).normal(3, 7, (50, 4))
    Z = Standardizer().fit_transform(X)
    np.testing.assert_allclose(Z.mean(axis=0), 0, atol=1e-10)
    np.testing.assert_allclose(Z.std(axis=0), 1, atol=1e-10)


def test_coding_matrix():
    M = one_vs_one_coding(4)
    assert M.shape == (4, 6)
    assert np.all(np.abs(M).sum(axis=0) == 2) and np.all(M.sum(axis=0) == 0)


def test_four_classes_six_learners():
    X, y = blobs(k=4)
    model = EcocSvmClassifier().fit(X, y)
    assert len(model.learners_) == 6
    assert model.coding_matrix_.shape == (4, 6)
    assert np.mean(model.predict(X) == y) > 0.95


def test_two_class_ecoc_matches_binary_svm():
    X, y = blobs(k=2, spread=2.0, seed=4)
    model = EcocSvmClassifier().fit(X, y)
    Z = Standardizer().fit(X).transform(X)
    # the binary learner's positive class is the lower index
    svm = LinearSVM().fit(Z, 1 - y)
    grid = np.random.default_rng(1).uniform(-8, 8, (500, 2))
    binary = np.where(svm.decision_function(model.scaler_.transform(grid)) > 0, 0, 1)
    np.testing.assert_array_equal(model.predict(grid), binary)


def test_positive_side_and_tie_break():
    model = EcocSvmClassifier(C=100.0).fit([[-1.0], [-1.1], [1.0], [1.1]], [0, 0, 1, 1])
    assert model.predict([[5.0]])[0] == 0 if model.learners_[0].weights[0] > 0 else True
    assert model.predict([[-5.0]])[0] == 0 and model.predict([[5.0]])[0] == 1
    # place a point exactly on the boundary
    lr = model.learners_[0]
    z_tie = -lr.bias / lr.weights[0]
    x_tie = z_tie * model.scaler_.scale_[0] + model.scaler_.mean_[0]
    losses = hinge_decode([[0.0]], model.coding_matrix_)
    assert losses[0, 0] == losses[0, 1]
    assert model.classes_[np.argmin(losses[0])] == 0
    assert abs(model.decision_function([[x_tie]])[0, 0]) < 1e-9


def test_exact_tie_decodes_to_lowest_index():
    scores = np.zeros((1, 6))
    assert np.argmin(hinge_decode(scores, one_vs_one_coding(4))[0]) == 0


def test_agrees_with_vote_decoding():
    X, y = blobs(k=3, spread=0.6, seed=2)
    model = EcocSvmClassifier().fit(X, y)
    grid = np.random.default_rng(0).uniform(X.min(0) - 1, X.max(0) + 1, (2000, 2))
    votes = vote_decode(model.decision_function(grid), 3)
    assert np.mean(model.predict(grid) == votes) >= 0.95


@given(st.floats(0.01, 100), st.floats(-100, 100), st.integers(0, 1))
def test_affine_rescaling_invariance(scale, shift, col):
    X, y = blobs(k=3, spread=1.0, seed=5)
    test = np.random.default_rng(9).uniform(-6, 6, (200, 2))
    a = EcocSvmClassifier().fit(X, y)
    X2, t2 = X.copy(), test.copy()
    X2[:, col] = X2[:, col] * scale + shift
    t2[:, col] = t2[:, col] * scale + shift
    b = EcocSvmClassifier().fit(X2, y)
    loss = np.sort(a.decoding_loss(test), axis=1)
    clear = loss[:, 1] - loss[:, 0] > 1e-4
    np.testing.assert_array_equal(a.predict(test)[clear], b.predict(t2)[clear])


def test_errors():
    X, y = blobs(k=3)
    with pytest.raises(DegenerateLabelsError):
        EcocSvmClassifier().fit(X, np.zeros(len(X)))
    y1 = y.copy()
    y1[0] = 7
    with pytest.raises(InsufficientClassDataError):
        EcocSvmClassifier().fit(X, y1)
    model = EcocSvmClassifier().fit(X, y)
    with pytest.raises(ShapeError):
        model.predict(np.zeros((3, 5)))


def test_model_bytes_deterministic_and_roundtrip(tmp_path):
    X, y = blobs(k=4, seed=3)
    a = EcocSvmClassifier(random_state=2).fit(X, y)
    b = EcocSvmClassifier(random_state=2).fit(X, y)
    assert a.to_json(mask="color") == b.to_json(mask="color")
    a.save(tmp_path / "m.json", mask="color")
    doc = json.loads((tmp_path / "m.json").read_text())
    assert doc["version"] == 1 and doc["params"]["C"] == 1.0 and doc["params"]["random_state"] == 2
    assert [(lr["positive"], lr["negative"]) for lr in doc["learners"]] == [(0, 1), (0, 2), (0, 3), (1, 2),
                                                                          (1, 3), (2, 3)]
    back = EcocSvmClassifier.load(tmp_path / "m.json")
    assert back.metadata_ == {"mask": "color"}
    grid = np.random.default_rng(0).uniform(-6, 6, (300, 2))
    np.testing.assert_array_equal(back.decision_function(grid), a.decision_function(grid))
    assert back.to_json(mask="color") == a.to_json(mask="color")


def test_load_rejects_foreign_documents(tmp_path):
    p = tmp_path / "x.json"
    p.write_text('{"format": "other"}')
    with pytest.raises(InvalidArgumentError):
        EcocSvmClassifier.load(p)
    p.write_text("not json")
    with pytest.raises(InvalidArgumentError):
        EcocSvmClassifier.load(p)


@given(st.lists(st.integers(0, 3), min_size=8, max_size=80), st.integers(2, 8), st.integers(0, 100))
def test_folds_partition(labels, k, seed):
    y = np.array(labels)
    if k > len(y):
        with pytest.raises(InvalidKError):
            stratified_folds(y, k, seed)
        return
    f = stratified_folds(y, k, seed)
    sizes = np.bincount(f, minlength=k)
    assert sizes.sum() == len(y) and sizes.max() - sizes.min() <= 1
    for c in np.unique(y):
        per = np.bincount(f[y == c], minlength=k)
        assert per.max() - per.min() <= 1


def test_invalid_k():
    with pytest.raises(InvalidKError):
        stratified_folds(np.arange(10), 1)
    with pytest.raises(InvalidKError):
        kfold_cv(np.zeros((5, 2)), np.arange(5) % 2, k=6)


def test_leave_one_out():
    X, y = blobs(k=2, n=5, seed=1)
    cv = kfold_cv(X, y, k=10)
    assert 0 <= cv.mean_error <= 1 and len(cv.models) == 10


def test_kfold_deterministic():
    X, y = blobs(k=3, spread=1.5)
    a, b = kfold_cv(X, y, seed=4), kfold_cv(X, y, seed=4)
    assert a.fold_errors == b.fold_errors and np.array_equal(a.folds, b.folds)


def test_cv_on_simulated_patches(mixed_patches):
    X, y, _ = patch_table(mixed_patches)
    keep = np.all(np.isfinite(X), axis=1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cv = kfold_cv(X[keep][:, mask_columns("color+contact")], y[keep], k=5)
    assert cv.mean_error < 0.10
