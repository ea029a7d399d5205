"""Time-stamped sensor streams.

Each stream stores parallel numpy arrays. Arrays are made read-only on
construction so a series can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Attitude, PoseSample, TerrainClass
from .exceptions import EmptySeriesError, InvalidArgumentError


def _frozen(a, shape_tail, name):
    a = np.array(a, dtype=float)
    if a.size == 0:
        a = a.reshape((0,) + shape_tail)
    if a.shape[1:] != shape_tail:
        raise InvalidArgumentError(f"{name}: expected shape (n, {', '.join(map(str, shape_tail))}), got {a.shape}")
    a.setflags(write=False)
    return a


def _check_times(t, name):
    t = np.atleast_1d(np.array(t, dtype=float))
    if t.ndim != 1:
        raise InvalidArgumentError(f"{name}: timestamps must be 1-D")
    t.setflags(write=False)
    if not np.all(np.isfinite(t)):
        raise InvalidArgumentError(f"{name}: timestamps must be finite")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise InvalidArgumentError(f"{name}: timestamps must be strictly increasing")
    return t


@dataclass(frozen=True, eq=False)
class ImuStream:
    """Body-frame specific force (gravity included) and fused attitude."""

    t: np.ndarray
    accel: np.ndarray
    rpy: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", _check_times(self.t, "imu"))
        object.__setattr__(self, "accel", _frozen(self.accel, (3,), "imu.accel"))
        object.__setattr__(self, "rpy", _frozen(self.rpy, (3,), "imu.rpy"))
        if not len(self.t) == len(self.accel) == len(self.rpy):
            raise InvalidArgumentError("imu: field lengths differ")

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True, eq=False)
class EncoderStream:
    """Wheel angular velocities, columns front-left, rear-left, front-right, rear-right."""

    t: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", _check_times(self.t, "enc"))
        object.__setattr__(self, "omega", _frozen(self.omega, (4,), "enc.omega"))
        if len(self.t) != len(self.omega):
            raise InvalidArgumentError("enc: field lengths differ")

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True, eq=False)
class CurrentStream:
    """Motor currents per side, columns (left, right), amperes."""

    t: np.ndarray
    current: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", _check_times(self.t, "cur"))
        object.__setattr__(self, "current", _frozen(self.current, (2,), "cur.current"))
        if len(self.t) != len(self.current):
            raise InvalidArgumentError("cur: field lengths differ")

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True, eq=False)
class PoseStream:
    t: np.ndarray
    xyz: np.ndarray
    rpy: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", _check_times(self.t, "pose"))
        object.__setattr__(self, "xyz", _frozen(self.xyz, (3,), "pose.xyz"))
        object.__setattr__(self, "rpy", _frozen(self.rpy, (3,), "pose.rpy"))
        if not len(self.t) == len(self.xyz) == len(self.rpy):
            raise InvalidArgumentError("pose: field lengths differ")

    def __len__(self):
        return len(self.t)

    def sample(self, i) -> PoseSample:
        return PoseSample(float(self.t[i]), tuple(float(v) for v in self.xyz[i]), Attitude(*map(float, self.rpy[i])))


@dataclass(frozen=True, eq=False)
class CloudFrame:
    """Coloured point cloud in the camera frame; RGB in 0..255."""

    t: float
    xyz: np.ndarray
    rgb: np.ndarray
    label: TerrainClass | None = None

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "xyz", _frozen(self.xyz, (3,), "cloud.xyz"))
        object.__setattr__(self, "rgb", _frozen(self.rgb, (3,), "cloud.rgb"))
        if len(self.xyz) != len(self.rgb):
            raise InvalidArgumentError("cloud: xyz and rgb lengths differ")
        if self.label is not None:
            object.__setattr__(self, "label", TerrainClass.parse(self.label))

    def __len__(self):
        return len(self.xyz)


def _empty(kind):
    return {
        "imu": lambda: ImuStream(np.empty(0), np.empty((0, 3)), np.empty((0, 3))),
        "enc": lambda: EncoderStream(np.empty(0), np.empty((0, 4))),
        "cur": lambda: CurrentStream(np.empty(0), np.empty((0, 2))),
        "pose": lambda: PoseStream(np.empty(0), np.empty((0, 3)), np.empty((0, 3))),
    }[kind]()


@dataclass(frozen=True, eq=False)
class SensorSeries:
    """All sensor streams of one run."""

    imu: ImuStream = field(default_factory=lambda: _empty("imu"))
    enc: EncoderStream = field(default_factory=lambda: _empty("enc"))
    cur: CurrentStream = field(default_factory=lambda: _empty("cur"))
    pose: PoseStream = field(default_factory=lambda: _empty("pose"))
    frames: tuple[CloudFrame, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        ft = [f.t for f in self.frames]
        if any(b <= a for a, b in zip(ft, ft[1:])):
            raise InvalidArgumentError("cloud: timestamps must be strictly increasing")
        spans = {name: (t[0], t[-1]) for name, t in self.time_axes().items() if len(t)}
        if not spans:
            raise EmptySeriesError("sensor series contains no samples")
        start = max(s[0] for s in spans.values())
        stop = min(s[1] for s in spans.values())
        if start > stop:
            raise InvalidArgumentError(f"streams do not overlap in time: {spans}")

    def time_axes(self) -> dict[str, np.ndarray]:
        return {
            "imu": self.imu.t,
            "enc": self.enc.t,
            "cur": self.cur.t,
            "pose": self.pose.t,
            "cloud": np.array([f.t for f in self.frames]),
        }

    @property
    def duration(self) -> float:
        axes = [t for t in self.time_axes().values() if len(t)]
        return float(max(t[-1] for t in axes) - min(t[0] for t in axes))

    def equals(self, other: "SensorSeries") -> bool:
        """Exact field-by-field equality, including point clouds."""
        for name in ("imu", "enc", "cur", "pose"):
            a, b = getattr(self, name), getattr(other, name)
            for attr in a.__dataclass_fields__:
                if not np.array_equal(getattr(a, attr), getattr(b, attr)):
                    return False
        if len(self.frames) != len(other.frames):
            return False
        return all(
            fa.t == fb.t and fa.label == fb.label
            and np.array_equal(fa.xyz, fb.xyz) and np.array_equal(fa.rgb, fb.rgb)
            for fa, fb in zip(self.frames, other.frames)
        )
