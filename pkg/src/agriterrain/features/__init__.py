"""Colour, geometric and contact feature families.

A full feature vector has 20 entries: 12 colour, 4 geometric, 4 contact.
"""

import numpy as np

from ..exceptions import InvalidArgumentError
from .color import COLOR_FEATURE_NAMES, channel_moments, color_feature_vector, rgb_to_c1c2c3
from .contact import (
    CONTACT_FEATURE_NAMES,
    ContactFeatures,
    WheelLoads,
    contact_feature_vector,
    motion_resistance,
    slip,
    vertical_accel_stats,
    wheel_loads,
)
from .geometric import GEOMETRIC_FEATURE_NAMES, fit_plane, geometric_feature_vector

FAMILIES = {
    "color": COLOR_FEATURE_NAMES,
    "geom": GEOMETRIC_FEATURE_NAMES,
    "contact": CONTACT_FEATURE_NAMES,
}
FEATURE_NAMES = COLOR_FEATURE_NAMES + GEOMETRIC_FEATURE_NAMES + CONTACT_FEATURE_NAMES
_SLICES = {"color": slice(0, 12), "geom": slice(12, 16), "contact": slice(16, 20)}
_ALIASES = {"all": ("color", "geom", "contact"), "geometric": ("geom",), "colour": ("color",)}


def parse_mask(mask) -> tuple[str, ...]:
    """Normalise a feature-family mask such as ``"color+contact"`` or
    ``"all"`` into an ordered tuple of family names."""
    if isinstance(mask, str):
        parts = []
        for token in mask.split("+"):
            token = token.strip().lower()
            parts.extend(_ALIASES.get(token, (token,)))
    else:
        parts = list(mask)
    unknown = [p for p in parts if p not in FAMILIES]
    if unknown or not parts:
        raise InvalidArgumentError(f"invalid feature mask {mask!r}; use color, geom, contact, color+contact or all")
    return tuple(f for f in FAMILIES if f in parts)


def mask_columns(mask) -> np.ndarray:
    """Column indices of the full 20-feature vector selected by ``mask``."""
    return np.concatenate([np.arange(20)[_SLICES[f]] for f in parse_mask(mask)])


def mask_name(mask) -> str:
    fams = parse_mask(mask)
    return "all" if len(fams) == 3 else "+".join(fams)


__all__ = [
    "COLOR_FEATURE_NAMES", "CONTACT_FEATURE_NAMES", "ContactFeatures", "FAMILIES", "FEATURE_NAMES",
    "GEOMETRIC_FEATURE_NAMES", "WheelLoads", "channel_moments", "color_feature_vector",
    "contact_feature_vector", "fit_plane", "geometric_feature_vector", "mask_columns", "mask_name",
    "motion_resistance", "parse_mask", "rgb_to_c1c2c3", "slip", "vertical_accel_stats", "wheel_loads",
]
