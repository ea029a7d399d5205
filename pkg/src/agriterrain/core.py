"""Domain types, reference-frame math and vehicle parameters.

Angles are radians throughout. The vehicle reference frame (VRF) has x
forward, y to the left and z up; the world frame (WRF) is gravity aligned.
"""

from __future__ import annotations

import configparser
import enum
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .exceptions import InvalidArgumentError

GRAVITY = 9.81
DEFAULT_MAX_GAP = 0.2


class TerrainClass(enum.IntEnum):
    """Terrain categories, in tie-break order."""

    PLOUGHED = 0
    UNPLOUGHED = 1
    DIRT_ROAD = 2
    GRAVEL = 3

    @property
    def slug(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, value) -> "TerrainClass":
        """Accept an enum member, its integer value or a name such as
        ``"dirt_road"``, ``"dirt-road"`` or ``"DirtRoad"``."""
        if isinstance(value, cls):
            return value
        if isinstance(value, (int, np.integer)):
            return cls(int(value))
        key = str(value).strip().replace("-", "_").replace(" ", "_")
        aliases = {
            "ploughedterrain": "ploughed",
            "unploughedterrain": "unploughed",
            "dirtroad": "dirt_road",
        }
        folded = key.lower()
        folded = aliases.get(folded.replace("_", ""), folded)
        try:
            return cls[folded.upper()]
        except KeyError:
            raise InvalidArgumentError(f"unknown terrain class {value!r}") from None


@dataclass(frozen=True)
class VehicleParams:
    """Vehicle constants.

    Defaults describe a 313.6 N four-wheel skid-steer platform.
    ``cg_height`` is a configuration choice.
    """

    width: float = 0.54
    length: float = 0.7
    weight: float = 313.6
    cg_height: float = 0.2
    wheel_radius: float = 0.165
    torque_constant: float = 0.044
    gear_ratio: float = 78.71
    sprung_mass: float = 8.0
    wheel_stiffness: float = 10000.0
    wheel_damping: float = 200.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise InvalidArgumentError(f"{f.name} must be a positive finite number, got {value!r}")

    @property
    def natural_frequency(self) -> float:
        """Undamped natural frequency of the quarter-vehicle model, rad/s."""
        return math.sqrt(self.wheel_stiffness / self.sprung_mass)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data) -> "VehicleParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidArgumentError(f"unknown vehicle parameter(s): {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})

    @classmethod
    def from_file(cls, path) -> "VehicleParams":
        """Read the ``[vehicle]`` section of a key-value config file."""
        return cls.from_dict(read_config(path).get("vehicle", {}))

    def with_overrides(self, **kwargs) -> "VehicleParams":
        return replace(self, **{k: float(v) for k, v in kwargs.items() if v is not None})


@dataclass(frozen=True)
class Attitude:
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(a) for a in (self.roll, self.pitch, self.yaw)):
            raise InvalidArgumentError(f"attitude angles must be finite: {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.roll, self.pitch, self.yaw])


@dataclass(frozen=True)
class PoseSample:
    timestamp: float
    position: tuple[float, float, float]
    attitude: Attitude = field(default_factory=Attitude)


def rotation_matrix_rpy(attitude: Attitude) -> np.ndarray:
    """Rotation from the vehicle frame to the world frame.

    Composition is ``Rz(yaw) @ Ry(pitch) @ Rx(roll)``.

    Raises
    ------
    InvalidArgumentError
        If any angle is not finite.
    """
    phi, theta, psi = float(attitude.roll), float(attitude.pitch), float(attitude.yaw)
    if not all(math.isfinite(a) for a in (phi, theta, psi)):
        raise InvalidArgumentError("attitude angles must be finite")
    cf, sf = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)
    return np.array([
        [cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf],
        [sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf],
        [-st, ct * sf, ct * cf],
    ])


def rotation_matrices_rpy(rpy: np.ndarray) -> np.ndarray:
    """Vectorised :func:`rotation_matrix_rpy` for an ``(n, 3)`` array of
    (roll, pitch, yaw) rows. Returns ``(n, 3, 3)``."""
    rpy = np.atleast_2d(np.asarray(rpy, dtype=float))
    if not np.all(np.isfinite(rpy)):
        raise InvalidArgumentError("attitude angles must be finite")
    cf, sf = np.cos(rpy[:, 0]), np.sin(rpy[:, 0])
    ct, st = np.cos(rpy[:, 1]), np.sin(rpy[:, 1])
    cp, sp = np.cos(rpy[:, 2]), np.sin(rpy[:, 2])
    out = np.empty((len(rpy), 3, 3))
    out[:, 0, 0] = cp * ct
    out[:, 0, 1] = cp * st * sf - sp * cf
    out[:, 0, 2] = cp * st * cf + sp * sf
    out[:, 1, 0] = sp * ct
    out[:, 1, 1] = sp * st * sf + cp * cf
    out[:, 1, 2] = sp * st * cf - cp * sf
    out[:, 2, 0] = -st
    out[:, 2, 1] = ct * sf
    out[:, 2, 2] = ct * cf
    return out


def weight_in_vrf(weight: float, attitude: Attitude) -> np.ndarray:
    """Vehicle weight ``[0, 0, -W]`` (world frame) expressed in the vehicle frame.

    Yaw does not enter the result.
    """
    if not (math.isfinite(weight) and weight > 0):
        raise InvalidArgumentError(f"weight must be positive, got {weight!r}")
    phi, theta = attitude.roll, attitude.pitch
    return np.array([
        weight * math.sin(theta),
        -weight * math.cos(theta) * math.sin(phi),
        -weight * math.cos(theta) * math.cos(phi),
    ])


def nearest_indices(source_t, query_t, max_gap=DEFAULT_MAX_GAP):
    """Index of the nearest ``source_t`` sample for each query time.

    Returns ``(idx, ok)`` where ``ok`` is False wherever the nearest sample
    is further than ``max_gap`` seconds away. ``source_t`` must be sorted.
    """
    source_t = np.asarray(source_t, dtype=float)
    query_t = np.asarray(query_t, dtype=float)
    if source_t.size == 0:
        return np.zeros(query_t.shape, dtype=int), np.zeros(query_t.shape, dtype=bool)
    right = np.clip(np.searchsorted(source_t, query_t), 0, source_t.size - 1)
    left = np.clip(right - 1, 0, source_t.size - 1)
    pick_left = np.abs(query_t - source_t[left]) <= np.abs(source_t[right] - query_t)
    idx = np.where(pick_left, left, right)
    ok = np.abs(source_t[idx] - query_t) <= max_gap
    return idx, ok


def read_config(path) -> dict[str, dict[str, str]]:
    """Parse an INI-style ``key = value`` file into ``{section: {key: value}}``.

    ``#`` and ``;`` start comments.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    text = Path(path).read_text()
    parser.read_string(text, source=str(path))
    return {name: dict(parser[name]) for name in parser.sections()}
