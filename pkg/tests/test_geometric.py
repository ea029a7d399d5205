import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from agriterrain.exceptions import DegeneratePatchError, RankDeficientError
from agriterrain.features import fit_plane, geometric_feature_vector
from oracles import covariance3, grid_plane_residual, sym3_min_eigenvalue


def grid(n=15, size=0.7):
    u = np.linspace(0, size, n)
    x, y = np.meshgrid(u, u)
    return x.ravel(), y.ravel()


def test_horizontal_plane():
    x, y = grid()
    pts = np.column_stack((x, y, np.full_like(x, 0.5)))
    normal, centroid, s = fit_plane(pts)
    np.testing.assert_allclose(normal, [0, 0, 1], atol=1e-15)
    assert s[2] == pytest.approx(0, abs=1e-15)
    np.testing.assert_allclose(geometric_feature_vector(pts), 0, atol=1e-15)


def test_tilted_plane():
    x, y = grid()
    pts = np.column_stack((x, y, 0.1 * x))
    normal, _, s = fit_plane(pts)
    expected = np.array([-0.1, 0, 1]) / math.sqrt(1.01)
    np.testing.assert_allclose(normal, expected, atol=1e-12)
    assert s[2] < 1e-12
    slope, fit, zvar, zrange = geometric_feature_vector(pts)
    assert slope == pytest.approx(math.atan(0.1), abs=1e-6)
    assert zrange == pytest.approx(0.07, abs=1e-9)
    assert fit < 1e-12


def test_non_coplanar_points_have_positive_residual():
    pts = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 0.1)]
    f = geometric_feature_vector(pts)[1]
    assert f > 0
    # the exact minimum lies at or below any grid-searched normal
    assert f <= grid_plane_residual(pts) + 1e-15
    assert f == pytest.approx(grid_plane_residual(pts), rel=1e-2)


def test_normal_points_up():
    x, y = grid()
    pts = np.column_stack((x, y, -0.3 * y))
    assert fit_plane(pts)[0][2] > 0


@pytest.mark.parametrize("pts", [[(0, 0, 0), (1, 1, 1)], np.zeros((0, 3))])
def test_too_few_points(pts):
    with pytest.raises(DegeneratePatchError):
        fit_plane(pts)


@pytest.mark.parametrize("pts", [[(0, 0, 0)] * 5, [(t, 2 * t, -t) for t in range(6)]])
def test_rank_deficient(pts):
    with pytest.raises(RankDeficientError):
        fit_plane(pts)


@given(st.integers(0, 2 ** 32 - 1))
def test_features_match_independent_oracles(seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0, 0.7, (rng.integers(5, 300), 3)) * [1, 1, rng.uniform(0.01, 0.3)]
    slope, fit, zvar, zrange = geometric_feature_vector(pts)
    z = pts[:, 2]
    zmean = math.fsum(z) / len(z)
    assert zvar == pytest.approx(math.fsum((v - zmean) ** 2 for v in z) / len(z), abs=1e-12)
    assert zrange == max(z) - min(z)
    assert fit == pytest.approx(sym3_min_eigenvalue(covariance3(pts)), abs=1e-12)
    assert 0 <= slope <= math.pi / 2


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-5, 5))
def test_translation_invariance(dx, dy, dz):
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 0.7, (100, 3)) * [1, 1, 0.05]
    np.testing.assert_allclose(geometric_feature_vector(pts + [dx, dy, dz]), geometric_feature_vector(pts),
                               atol=1e-9)


def test_patch_object():
    class Patch:
        xyz = np.random.default_rng(0).normal(size=(30, 3))

    np.testing.assert_array_equal(geometric_feature_vector(Patch()), geometric_feature_vector(Patch.xyz))
