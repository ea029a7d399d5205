"""Proprioceptive features: wheel loads, motion resistance, slip and body
vibration.

Wheel order everywhere is front-left, rear-left, front-right, rear-right.
With the vehicle frame convention (x forward, y left, z up) a positive
pitch loads the front axle and a positive roll loads the right side.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..core import DEFAULT_MAX_GAP, GRAVITY, Attitude, VehicleParams, nearest_indices
from ..exceptions import (
    EmptyWindowError,
    InvalidArgumentError,
    InvalidKinematicsError,
    InvalidLoadError,
    MissingDataError,
    SlipRangeWarning,
    TipOverWarning,
)

CONTACT_FEATURE_NAMES = ("motion_resistance", "slip", "accel_rms", "accel_std")

SLIP_REPORT_RANGE = (-0.05, 1.0)
STRAIGHT_YAW_RATE = 0.05


@dataclass(frozen=True)
class WheelLoads:
    """Vertical wheel forces in newtons."""

    fz: tuple[float, float, float, float]
    tip_over: bool = False

    @property
    def total(self) -> float:
        return math.fsum(self.fz)

    def as_array(self) -> np.ndarray:
        return np.array(self.fz)


@dataclass(frozen=True)
class ContactFeatures:
    motion_resistance: float
    slip: float
    accel_rms: float
    accel_std: float
    negative_slip_samples: int = 0

    def as_array(self) -> np.ndarray:
        return np.array([self.motion_resistance, self.slip, self.accel_rms, self.accel_std])


def wheel_loads_array(params: VehicleParams, rpy, legacy_rear_right: bool = False) -> np.ndarray:
    """Quasi-static wheel loads for each row of an ``(n, 3)`` (roll, pitch,
    yaw) array. Returns ``(n, 4)``.

    ``legacy_rear_right=True`` uses the alternative rear-right expression
    that repeats the rear-left one. It breaks vertical equilibrium under
    roll and is kept only for comparison.
    """
    rpy = np.atleast_2d(np.asarray(rpy, dtype=float))
    phi, theta = rpy[:, 0], rpy[:, 1]
    w, h = params.weight, params.cg_height
    base = w / 4 * np.cos(phi) * np.cos(theta)
    pitch = w / 2 * np.sin(theta) * h / params.length
    roll = w / 2 * np.cos(theta) * np.sin(phi) * h / params.width
    fz = np.empty((len(rpy), 4))
    fz[:, 0] = base + pitch - roll
    fz[:, 1] = base - pitch - roll
    fz[:, 2] = base + pitch + roll
    fz[:, 3] = base - pitch - roll if legacy_rear_right else base - pitch + roll
    return fz


def wheel_loads(params: VehicleParams, attitude: Attitude, legacy_rear_right: bool = False) -> WheelLoads:
    """Quasi-static vertical wheel loads for a given roll and pitch.

    Their sum is ``W cos(pitch) cos(roll)``. A negative load (wheel lift-off)
    sets ``tip_over`` and emits :class:`TipOverWarning`.
    """
    if not (abs(attitude.roll) < math.pi / 2 and abs(attitude.pitch) < math.pi / 2):
        raise InvalidArgumentError("roll and pitch must lie within (-pi/2, pi/2)")
    fz = wheel_loads_array(params, [[attitude.roll, attitude.pitch, attitude.yaw]], legacy_rear_right)[0]
    tip = bool(np.any(fz < 0))
    if tip:
        warnings.warn(f"negative wheel load {fz.min():.3f} N: vehicle outside quasi-static stability",
                      TipOverWarning, stacklevel=2)
    return WheelLoads(tuple(float(f) for f in fz), tip)


def motion_resistance(current, fz, params: VehicleParams):
    """Coefficient of motion resistance from motor current and wheel load.

    ``f_r = gear_ratio * torque_constant * I / (wheel_radius * F_z)``.
    Works elementwise on arrays.
    """
    fz = np.asarray(fz, dtype=float)
    if np.any(~(fz > 0)):
        raise InvalidLoadError("wheel load must be positive")
    fr = params.gear_ratio * params.torque_constant / params.wheel_radius * np.asarray(current, dtype=float) / fz
    return float(fr) if fr.ndim == 0 else fr


def _raw_slip(speed, omega, radius):
    vt = np.asarray(omega, dtype=float) * radius
    if np.any(~(vt > 0)):
        raise InvalidKinematicsError("theoretical wheel speed must be positive during forward drive")
    return 1.0 - np.asarray(speed, dtype=float) / vt


def slip(speed: float, omega: float, radius: float) -> float:
    """Longitudinal slip (travel reduction) ``1 - V / (omega r)``.

    The result is clamped to ``[-0.05, 1]``; clamping emits
    :class:`SlipRangeWarning`.
    """
    if speed < 0:
        raise InvalidArgumentError("actual speed must be non-negative")
    s = float(_raw_slip(speed, omega, radius))
    lo, hi = SLIP_REPORT_RANGE
    if s < lo or s > hi:
        warnings.warn(f"slip {s:.4f} outside report range {SLIP_REPORT_RANGE}", SlipRangeWarning, stacklevel=2)
        s = min(max(s, lo), hi)
    return s


def vertical_accel_stats(accel, rpy, g: float = GRAVITY) -> tuple[float, float]:
    """RMS and population standard deviation of gravity-compensated
    vertical acceleration.

    Parameters
    ----------
    accel : array_like, shape (n, 3)
        Body-frame specific force; at rest on level ground ``az == -g``.
    rpy : array_like, shape (n, 3)
        Attitude of each sample.
    """
    accel = np.atleast_2d(np.asarray(accel, dtype=float))
    rpy = np.atleast_2d(np.asarray(rpy, dtype=float))
    if accel.size == 0:
        raise EmptyWindowError("acceleration window is empty")
    az = accel[:, 2] + g * np.cos(rpy[:, 1]) * np.cos(rpy[:, 0])
    rms = math.sqrt(float(np.mean(az * az)))
    d = az - az.mean()
    return rms, math.sqrt(float(np.mean(d * d)))


def _window_indices(t, window, stream, max_gap):
    t0, t1 = window
    idx = np.flatnonzero((t >= t0) & (t <= t1))
    if idx.size == 0:
        raise MissingDataError(stream, f"no samples in window [{t0:.3f}, {t1:.3f}]")
    edges = np.concatenate(([t0], t[idx], [t1]))
    gap = float(np.max(np.diff(edges)))
    if gap > max_gap:
        raise MissingDataError(stream, f"gap of {gap:.3f} s exceeds {max_gap} s in window [{t0:.3f}, {t1:.3f}]")
    return idx


def motion_resistance_samples(series, params: VehicleParams, window=None, compensate: bool = True,
                              max_gap: float = DEFAULT_MAX_GAP) -> np.ndarray:
    """Per-current-sample motion resistance, averaged over both sides.

    Each side motor drives two wheels, so its current is divided by the
    side's summed load. With ``compensate=False`` every wheel is assumed
    to carry ``W / 4``.
    """
    cur_t = series.cur.t
    idx = np.arange(len(cur_t)) if window is None else _window_indices(cur_t, window, "cur", max_gap)
    currents = series.cur.current[idx]
    if compensate:
        j, ok = nearest_indices(series.imu.t, cur_t[idx], max_gap)
        if not np.all(ok):
            raise MissingDataError("imu", "no attitude sample near a current sample")
        fz = wheel_loads_array(params, series.imu.rpy[j])
        side = np.column_stack((fz[:, 0] + fz[:, 1], fz[:, 2] + fz[:, 3]))
    else:
        side = np.full((len(idx), 2), params.weight / 2)
    return motion_resistance(currents, side, params).mean(axis=1)


def forward_speed(poses) -> np.ndarray:
    """Forward speed at each pose by 3-point central differences,
    projected on the heading."""
    if len(poses.t) < 3:
        raise MissingDataError("pose", "speed estimation needs at least 3 poses")
    vel = np.gradient(poses.xyz, poses.t, axis=0, edge_order=1)
    yaw = poses.rpy[:, 2]
    return vel[:, 0] * np.cos(yaw) + vel[:, 1] * np.sin(yaw)


def yaw_rate(poses) -> np.ndarray:
    return np.gradient(np.unwrap(poses.rpy[:, 2]), poses.t, edge_order=1)


def slip_samples(series, params: VehicleParams, window=None, max_gap: float = DEFAULT_MAX_GAP,
                 yaw_rate_limit: float = STRAIGHT_YAW_RATE) -> np.ndarray:
    """Instantaneous vehicle slip at each straight-motion pose sample.

    The theoretical speed averages all four encoders at the nearest
    encoder sample.
    """
    poses = series.pose
    speed = forward_speed(poses)
    straight = np.abs(yaw_rate(poses)) <= yaw_rate_limit
    idx = np.arange(len(poses.t)) if window is None else _window_indices(poses.t, window, "pose", max_gap)
    idx = idx[straight[idx]]
    if idx.size == 0:
        return np.empty(0)
    j, ok = nearest_indices(series.enc.t, poses.t[idx], max_gap)
    if not np.all(ok):
        raise MissingDataError("enc", "no encoder sample near a pose sample")
    omega = series.enc.omega[j].mean(axis=1)
    return _raw_slip(speed[idx], omega, params.wheel_radius)


def contact_feature_vector(series, window, params: VehicleParams, *, g: float = GRAVITY,
                           max_gap: float = DEFAULT_MAX_GAP, compensate: bool = True) -> ContactFeatures:
    """Mean motion resistance, mean slip and vertical acceleration RMS/std
    over a time window.

    Raises
    ------
    MissingDataError
        When a required stream (``imu``, ``enc``, ``cur``, ``pose``) has no
        samples in the window or a gap longer than ``max_gap``. The error's
        ``stream`` attribute names it.
    """
    t0, t1 = map(float, window)
    if not t1 >= t0:
        raise InvalidArgumentError(f"invalid window {window!r}")
    window = (t0, t1)
    imu_idx = _window_indices(series.imu.t, window, "imu", max_gap)
    _window_indices(series.enc.t, window, "enc", max_gap)
    fr = motion_resistance_samples(series, params, window, compensate, max_gap)
    s = slip_samples(series, params, window, max_gap)
    rms, std = vertical_accel_stats(series.imu.accel[imu_idx], series.imu.rpy[imu_idx], g)
    mean_slip = float(s.mean()) if s.size else float("nan")
    return ContactFeatures(
        motion_resistance=float(fr.mean()),
        slip=mean_slip,
        accel_rms=rms,
        accel_std=std,
        negative_slip_samples=int(np.sum(s < 0)),
    )
