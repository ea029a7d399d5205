"""Illumination-robust colour moments in the c1c2c3 space."""

from __future__ import annotations

import numpy as np

from ..exceptions import EmptyPatchError, MissingModalityError

COLOR_FEATURE_NAMES = tuple(
    f"{ch}_{m}" for ch in ("c1", "c2", "c3") for m in ("mean", "var", "m3", "m4")
)


def _ratio_angle(num, den):
    # arctan(x/0) = pi/2 for x > 0, arctan(0/0) = 0
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.arctan(num / den)
    out = np.where(den > 0, out, np.where(num > 0, np.pi / 2, 0.0))
    return out


def rgb_to_c1c2c3(r, g, b):
    """Map RGB intensities (0..255, scalars or arrays) to c1c2c3 angles.

    Each channel is ``arctan(channel / max(other two))``, so every output
    lies in ``[0, pi/2]`` and is unchanged by a common scaling of r, g, b.
    A pure-black pixel maps to ``(0, 0, 0)``.
    """
    r = np.asarray(r, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c1 = _ratio_angle(r, np.maximum(g, b))
    c2 = _ratio_angle(g, np.maximum(r, b))
    c3 = _ratio_angle(b, np.maximum(r, g))
    if c1.ndim == 0:
        return float(c1), float(c2), float(c3)
    return c1, c2, c3


def channel_moments(values) -> tuple[float, float, float, float]:
    """Mean, variance and third/fourth central moments (divisor N).

    The third and fourth moments are the raw central sums, not
    standardised by the variance.
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptyPatchError("cannot compute moments of an empty channel")
    mean = x.sum() / x.size
    d = x - mean
    d2 = d * d
    return (
        float(mean),
        float(d2.sum() / x.size),
        float((d2 * d).sum() / x.size),
        float((d2 * d2).sum() / x.size),
    )


def color_feature_vector(rgb) -> np.ndarray:
    """Twelve colour features of a patch: (E, var, m3, m4) for c1, c2, c3.

    Parameters
    ----------
    rgb : array_like, shape (n, 3)
        Per-point colour, or any object with an ``rgb`` attribute
        (e.g. a :class:`~agriterrain.mapping.TerrainPatch`).
    """
    if hasattr(rgb, "rgb"):
        rgb = rgb.rgb
    if rgb is None:
        raise MissingModalityError("patch carries no colour data")
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.ndim != 2 or rgb.shape[1] != 3:
        raise MissingModalityError(f"expected (n, 3) RGB array, got shape {rgb.shape}")
    if len(rgb) == 0:
        raise EmptyPatchError("patch has no points")
    channels = rgb_to_c1c2c3(rgb[:, 0], rgb[:, 1], rgb[:, 2])
    return np.array([m for ch in channels for m in channel_moments(ch)])
