"""Least-squares plane fit and the four-element geometric signature."""

from __future__ import annotations

import numpy as np

from ..exceptions import DegeneratePatchError, RankDeficientError

GEOMETRIC_FEATURE_NAMES = ("slope", "fit_residual", "z_var", "z_range")

_RANK_TOL = 1e-12


def fit_plane(points):
    """Fit a plane through ``points`` by SVD of their covariance matrix.

    Parameters
    ----------
    points : array_like, shape (n, 3)

    Returns
    -------
    normal : ndarray, shape (3,)
        Unit normal with non-negative z component.
    centroid : ndarray, shape (3,)
    singular_values : ndarray, shape (3,)
        Singular values of the (divisor-N) covariance matrix, descending.

    Raises
    ------
    DegeneratePatchError
        Fewer than three points.
    RankDeficientError
        Points are coincident or collinear.
    """
    p = np.asarray(points, dtype=np.float64)
    if p.ndim != 2 or p.shape[1] != 3:
        raise DegeneratePatchError(f"expected (n, 3) points, got shape {p.shape}")
    if len(p) < 3:
        raise DegeneratePatchError(f"plane fit needs at least 3 points, got {len(p)}")
    centroid = p.mean(axis=0)
    d = p - centroid
    cov = d.T @ d / len(p)
    _, s, vt = np.linalg.svd(cov)
    if s[0] <= 0 or s[1] <= _RANK_TOL * s[0]:
        raise RankDeficientError("points are coincident or collinear")
    normal = vt[2]
    if normal[2] < 0:
        normal = -normal
    return normal, centroid, s


def geometric_feature_vector(points) -> np.ndarray:
    """Slope (rad), plane-fit residual, z variance and z range of a patch.

    ``points`` is an ``(n, 3)`` array in a gravity-aligned frame, or an
    object exposing it as ``xyz``. The residual is the smallest singular
    value of the point covariance matrix.
    """
    if hasattr(points, "xyz"):
        points = points.xyz
    normal, _, s = fit_plane(points)
    z = np.asarray(points, dtype=np.float64)[:, 2]
    slope = float(np.arccos(np.clip(normal[2], -1.0, 1.0)))
    zc = z - z.mean()
    return np.array([slope, float(s[2]), float(zc @ zc / z.size), float(z.max() - z.min())])
