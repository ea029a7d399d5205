"""Synthetic terrain profiles and labelled sensor runs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import GRAVITY, TerrainClass, VehicleParams, rotation_matrices_rpy
from ..exceptions import CalibrationError, InvalidArgumentError
from ..features.contact import wheel_loads_array
from ..mapping import FRAME_DEPTH, LOOK_AHEAD, stitch_patches
from ..series import CloudFrame, CurrentStream, EncoderStream, ImuStream, PoseStream, SensorSeries
from .presets import DEFAULT_PRESETS, TerrainPreset
from .qv import TerrainProfile, excitation_frequency, simulate_qv, transfer_magnitude

IMU_RATE = 50.0
ENCODER_RATE = 50.0
CURRENT_RATE = 50.0
POSE_RATE = 10.0
CAMERA_RATE = 8.5
# encoder and current clocks are offset from the IMU clock
ENCODER_OFFSET = 0.004
CURRENT_OFFSET = 0.008

SETTLE_TIME = 0.5
VEGETATION_COLOR = (62.0, 105.0, 44.0)


@dataclass(frozen=True)
class SimNoise:
    """Sensor noise (1 sigma) and the correlation time of the slowly
    varying terrain response."""

    accel: float = 0.005
    attitude: float = 0.002
    encoder: float = 0.02
    current: float = 0.01
    position: float = 0.0005
    yaw: float = 0.0005
    stereo: float = 0.006
    correlation_time: float = 2.0
    vegetation_fraction: float = 0.04


def _unit_profile(preset, length, rng, n_components, spacing):
    lam = np.sort(np.exp(rng.uniform(math.log(preset.wavelength_min), math.log(preset.wavelength_max), n_components)))
    phase = rng.uniform(0, 2 * math.pi, n_components)
    weight = lam / lam.sum()
    s = np.arange(0.0, length + spacing, spacing)
    z = np.zeros_like(s)
    for a, l, p in zip(weight, lam, phase):
        z += a * np.sin(2 * math.pi * s / l + p)
    return s, z, lam, weight


def synth_terrain_profile(preset: TerrainPreset, length: float, seed: int, *, speed: float = 0.5,
                          params: VehicleParams | None = None, dt: float = 1e-3, sensor_noise: float = 0.0,
                          n_components: int = 12, calibration_length: float = 30.0,
                          max_iter: int = 5, tol: float = 0.01) -> TerrainProfile:
    """Sum-of-sinusoids road profile with seeded wavelengths and phases.

    The overall amplitude is calibrated so the simulated body acceleration
    at ``speed`` has standard deviation ``preset.accel_std_target``, less
    ``sensor_noise`` removed in quadrature.

    Raises
    ------
    CalibrationError
        If the acceleration spread is not within ``tol`` after ``max_iter``
        rescalings.
    """
    if not length > 0:
        raise InvalidArgumentError("profile length must be positive")
    params = params or VehicleParams()
    rng = np.random.default_rng(seed)
    spacing = min(preset.wavelength_min / 40, 0.005)
    s, unit, lam, weight = _unit_profile(preset, length, rng, n_components, spacing)
    target = math.sqrt(max(preset.accel_std_target ** 2 - sensor_noise ** 2, (0.5 * preset.accel_std_target) ** 2))

    span = min(length, calibration_length)
    if span / speed <= 2 * SETTLE_TIME:
        raise InvalidArgumentError("profile too short to calibrate")
    probe = TerrainProfile(s, unit, preset.terrain)
    scale = 1.0
    for _ in range(max_iter):
        res = simulate_qv(probe, speed, params, dt, duration=span / speed)
        measured = float(np.std(res.z_ddot[res.t >= SETTLE_TIME])) * scale
        if abs(measured / target - 1) <= tol:
            break
        scale *= target / measured
    else:
        raise CalibrationError(f"{preset.terrain.slug}: acceleration std did not converge to {target:.4f}")
    gain = weight * transfer_magnitude([excitation_frequency(speed, l) for l in lam], params)
    return TerrainProfile(s, scale * unit, preset.terrain, float(lam[np.argmax(gain)]), scale)


def _ou(rng, n, dt, tau):
    """Unit-variance Ornstein-Uhlenbeck samples."""
    a = math.exp(-dt / tau)
    e = rng.standard_normal(n) * math.sqrt(1 - a * a)
    out = np.empty(n)
    x = rng.standard_normal()
    for i in range(n):
        x = a * x + e[i]
        out[i] = x
    return out


def _ticks(duration, rate, offset=0.0):
    n = int(math.floor(duration * rate + 1e-9))
    return np.arange(n) / rate + offset


class _Surface:
    """Ground height of one terrain segment as seen by the camera."""

    def __init__(self, preset, rng, n_waves=8):
        self.preset = preset
        lam = rng.uniform(0.05, 0.4, n_waves)
        ang = rng.uniform(0, math.pi, n_waves)
        self.k = np.column_stack((np.cos(ang), np.sin(ang))) * (2 * math.pi / lam)[:, None]
        self.phase = rng.uniform(0, 2 * math.pi, n_waves)
        self.amp = preset.relief_std * math.sqrt(2.0 / n_waves)
        self.furrow_phase = rng.uniform(0, 2 * math.pi)

    def relief(self, x, y):
        z = self.amp * np.cos(np.outer(x, self.k[:, 0]) + np.outer(y, self.k[:, 1]) + self.phase).sum(axis=1)
        if self.preset.furrow_amplitude:
            phase = 2 * math.pi * y / self.preset.furrow_wavelength + self.furrow_phase
            z += self.preset.furrow_amplitude * np.sin(phase)
        return z


def _taper(s, z, length, ramp=0.2):
    w = np.ones_like(s)
    ramp = min(ramp, length / 4)
    head = s < ramp
    tail = s > length - ramp
    w[head] = 0.5 - 0.5 * np.cos(math.pi * s[head] / ramp)
    w[tail] = 0.5 - 0.5 * np.cos(math.pi * np.clip(length - s[tail], 0, None) / ramp)
    return z * w


def synth_mixed_run(segments, speed: float = 0.5, seed: int = 0, params: VehicleParams | None = None, *,
                    presets=None, noise: SimNoise | None = None, pitch_amplitude: float = 0.0,
                    pitch_wavelength: float = 4.0, points_per_frame: int = 300, dt: float = 1e-3):
    """Straight run at constant speed over consecutive terrain segments.

    Parameters
    ----------
    segments : sequence of (terrain, duration)
        Terrain classes in driving order and the time spent on each.
    pitch_amplitude, pitch_wavelength : float
        Optional sinusoidal pitch (rad) along the path, to exercise load
        compensation. Zero gives a level run.

    Returns
    -------
    series : SensorSeries
    patches : list of TerrainPatch
        Stitched, labelled patches without features.
    """
    segments = [(TerrainClass.parse(c), float(d)) for c, d in segments]
    if not segments or any(d <= 0 for _, d in segments):
        raise InvalidArgumentError("segments need positive durations")
    if not speed > 0:
        raise InvalidArgumentError("speed must be positive")
    params = params or VehicleParams()
    presets = presets or DEFAULT_PRESETS
    noise = noise or SimNoise()
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(10)]
    seg_rng, ou_rng, imu_rng, enc_rng, cur_rng, pose_rng, cam_rng, surf_rng, att_rng, _ = streams

    duration = sum(d for _, d in segments)
    bounds = np.cumsum([0.0] + [d * speed for _, d in segments])
    margin = LOOK_AHEAD + FRAME_DEPTH + 1.0

    # road profile under the wheel
    dist, elev, surfaces = [], [], []
    for i, (cls, d) in enumerate(segments):
        length = d * speed + (margin if i == len(segments) - 1 else 0.0)
        prof = synth_terrain_profile(presets[cls], length, int(seg_rng.integers(2 ** 63)), speed=speed,
                                     params=params, dt=dt, sensor_noise=noise.accel)
        z = prof.elevation if len(segments) == 1 else _taper(prof.distance, prof.elevation, prof.length)
        s = prof.distance + bounds[i]
        if dist:
            keep = s > dist[-1][-1]
            s, z = s[keep], z[keep]
        dist.append(s)
        elev.append(z)
        surfaces.append(_Surface(presets[cls], surf_rng))
    road = TerrainProfile(np.concatenate(dist), np.concatenate(elev))
    qv = simulate_qv(road, speed, params, dt, duration=duration)

    def segment_at(x):
        return np.clip(np.searchsorted(bounds, x, side="right") - 1, 0, len(segments) - 1)

    def true_rpy(t):
        rpy = np.zeros((len(t), 3))
        if pitch_amplitude:
            rpy[:, 1] = pitch_amplitude * np.sin(2 * math.pi * speed * t / pitch_wavelength)
        return rpy

    # ground elevation consistent with the imposed pitch (positive pitch is nose down)
    hill_s = np.linspace(0.0, bounds[-1] + margin, max(2, int((bounds[-1] + margin) / 0.01) + 1))
    hill_slope = -np.tan(true_rpy(hill_s / speed)[:, 1])
    hill_z = np.concatenate(([0.0], np.cumsum(0.5 * (hill_slope[1:] + hill_slope[:-1]) * np.diff(hill_s))))

    def hill(x):
        return np.interp(x, hill_s, hill_z)

    def attitude_noise(rng, n):
        out = rng.normal(0, noise.attitude, (n, 3))
        out[:, 2] = rng.normal(0, noise.yaw, n)
        return out

    seg_mean = lambda attr, x: np.array([getattr(presets[segments[k][0]], attr) for k in segment_at(x)])

    # inertial
    t_imu = _ticks(duration, IMU_RATE)
    rpy = true_rpy(t_imu)
    zdd = np.interp(t_imu, qv.t, qv.z_ddot)
    world = np.zeros((len(t_imu), 3))
    world[:, 2] = zdd - GRAVITY
    rot = rotation_matrices_rpy(rpy)
    accel = np.einsum("nji,nj->ni", rot, world) + imu_rng.normal(0, noise.accel, (len(t_imu), 3))
    imu = ImuStream(t_imu, accel, rpy + attitude_noise(att_rng, len(t_imu)))

    # slowly varying slip and motion resistance on a 50 Hz grid
    t_grid = _ticks(duration + 1.0, ENCODER_RATE)
    slip_u = _ou(ou_rng, len(t_grid), 1 / ENCODER_RATE, noise.correlation_time)
    fr_u = _ou(ou_rng, len(t_grid), 1 / ENCODER_RATE, noise.correlation_time)

    t_enc = _ticks(duration - ENCODER_OFFSET, ENCODER_RATE, ENCODER_OFFSET)
    x_enc = speed * t_enc
    s_inst = seg_mean("mean_slip", x_enc) + seg_mean("slip_variability", x_enc) * np.interp(t_enc, t_grid, slip_u)
    omega = speed / (params.wheel_radius * (1 - s_inst))
    enc = EncoderStream(t_enc, omega[:, None] + enc_rng.normal(0, noise.encoder, (len(t_enc), 4)))

    t_cur = _ticks(duration - CURRENT_OFFSET, CURRENT_RATE, CURRENT_OFFSET)
    x_cur = speed * t_cur
    fr = seg_mean("mean_motion_resistance", x_cur) * (
        1 + seg_mean("resistance_variability", x_cur) * np.interp(t_cur, t_grid, fr_u))
    fz = wheel_loads_array(params, true_rpy(t_cur))
    side = np.column_stack((fz[:, 0] + fz[:, 1], fz[:, 2] + fz[:, 3]))
    gain = params.wheel_radius / (params.gear_ratio * params.torque_constant)
    cur = CurrentStream(t_cur, fr[:, None] * side * gain + cur_rng.normal(0, noise.current, (len(t_cur), 2)))

    t_pose = _ticks(duration, POSE_RATE)
    xyz = np.zeros((len(t_pose), 3))
    xyz[:, 0] = speed * t_pose
    xyz[:, 2] = hill(xyz[:, 0])
    xyz[:, :2] += pose_rng.normal(0, noise.position, (len(t_pose), 2))
    pose = PoseStream(t_pose, xyz, true_rpy(t_pose) + attitude_noise(att_rng, len(t_pose)))

    # stereo frames
    frames = []
    t_cam = _ticks(duration, CAMERA_RATE)
    cam_rot = rotation_matrices_rpy(true_rpy(t_cam))
    for k, t in enumerate(t_cam):
        n = points_per_frame
        x0 = speed * t
        xw = x0 + cam_rng.uniform(LOOK_AHEAD - 0.15, LOOK_AHEAD + FRAME_DEPTH + 0.15, n)
        yw = cam_rng.uniform(-0.5, 0.5, n)
        zw = road.at(np.minimum(xw, road.distance[-1]))[0] + hill(xw)
        seg = segment_at(xw)
        rgb = np.empty((n, 3))
        for j in np.unique(seg):
            m = seg == j
            zw[m] += surfaces[j].relief(xw[m], yw[m])
            comps = presets[segments[j][0]].colors
            w = np.array([c[0] for c in comps])
            pick = cam_rng.choice(len(comps), size=int(m.sum()), p=w / w.sum())
            mean = np.array([comps[c][1] for c in pick])
            std = np.array([comps[c][2] for c in pick])
            brightness = cam_rng.uniform(0.7, 1.1, int(m.sum()))[:, None]
            rgb[m] = (mean + cam_rng.standard_normal((int(m.sum()), 3)) * std[:, None]) * brightness
        zw = zw + cam_rng.normal(0, noise.stereo, n)
        veg = cam_rng.random(n) < noise.vegetation_fraction
        zw[veg] = hill(xw[veg]) + cam_rng.uniform(0.3, 1.5, int(veg.sum()))
        rgb[veg] = VEGETATION_COLOR
        rgb = np.clip(rgb, 0, 255)
        pw = np.column_stack((xw - x0, yw, zw - hill(x0)))
        cam = pw @ cam_rot[k]
        label = segments[int(segment_at(x0 + LOOK_AHEAD + FRAME_DEPTH / 2))][0]
        frames.append(CloudFrame(t, cam, rgb, label))

    series = SensorSeries(imu=imu, enc=enc, cur=cur, pose=pose, frames=tuple(frames))
    return series, stitch_patches(series.frames, series.pose)


def synth_run(terrain, duration: float, speed: float = 0.5, seed: int = 0, params: VehicleParams | None = None,
              **kwargs):
    """Single-terrain straight run; see :func:`synth_mixed_run`."""
    return synth_mixed_run([(terrain, duration)], speed, seed, params, **kwargs)
