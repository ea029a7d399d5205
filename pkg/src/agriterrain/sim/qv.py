"""One degree-of-freedom quarter-vehicle model.

The sprung mass ``m_b`` rides on a wheel spring ``k_w`` and damper ``c_w``
excited by the terrain elevation ``z_d`` under the wheel::

    m_b * z_b'' = k_w * (z_d - z_b) + c_w * (z_d' - z_b')
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import TerrainClass, VehicleParams
from ..exceptions import InvalidArgumentError, OutOfProfileError, StabilityError

_trapz = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True, eq=False)
class TerrainProfile:
    """Elevation ``z_d`` sampled along the path.

    ``wavelength`` is the dominant irregularity wavelength and
    ``amplitude`` the overall scale applied to the profile's components.
    """

    distance: np.ndarray
    elevation: np.ndarray
    label: TerrainClass | None = None
    wavelength: float = 1.0
    amplitude: float = 0.0

    def __post_init__(self):
        d = np.asarray(self.distance, dtype=float)
        z = np.asarray(self.elevation, dtype=float)
        if d.ndim != 1 or d.shape != z.shape or len(d) < 2:
            raise InvalidArgumentError("profile needs matching 1-D distance and elevation arrays (n >= 2)")
        if np.any(np.diff(d) <= 0):
            raise InvalidArgumentError("profile distances must be strictly increasing")
        d.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "distance", d)
        object.__setattr__(self, "elevation", z)

    @property
    def length(self) -> float:
        return float(self.distance[-1] - self.distance[0])

    def at(self, s):
        """Elevation and slope dz/ds at path positions ``s`` (linear
        interpolation; the slope is that of the segment containing ``s``)."""
        s = np.asarray(s, dtype=float)
        d, z = self.distance, self.elevation
        k = np.clip(np.searchsorted(d, s, side="right") - 1, 0, len(d) - 2)
        slope = (z[k + 1] - z[k]) / (d[k + 1] - d[k])
        return z[k] + slope * (s - d[k]), slope


@dataclass(frozen=True, eq=False)
class QVResponse:
    t: np.ndarray
    z: np.ndarray
    z_dot: np.ndarray
    z_ddot: np.ndarray
    z_road: np.ndarray


def excitation_frequency(speed: float, wavelength: float) -> float:
    """Angular excitation frequency ``2 pi V / lambda`` in rad/s."""
    if not wavelength > 0:
        raise InvalidArgumentError(f"wavelength must be positive, got {wavelength!r}")
    if speed < 0:
        raise InvalidArgumentError(f"speed must be non-negative, got {speed!r}")
    return 2 * math.pi * speed / wavelength


def transfer_magnitude(omega, params: VehicleParams):
    """Ratio of body-acceleration amplitude to ground-displacement amplitude
    at excitation frequency ``omega`` (rad/s). Elementwise on arrays."""
    w = np.asarray(omega, dtype=float)
    k, c, m = params.wheel_stiffness, params.wheel_damping, params.sprung_mass
    cw2 = (c * w) ** 2
    h = w ** 2 * np.sqrt((k ** 2 + cw2) / ((k - m * w ** 2) ** 2 + cw2))
    return float(h) if h.ndim == 0 else h


def max_stable_step(params: VehicleParams) -> float:
    """Largest allowed integration step: 20 steps per natural period."""
    return 1.0 / (20 * params.natural_frequency / (2 * math.pi))


def simulate_qv(profile: TerrainProfile, speed: float, params: VehicleParams, dt: float = 1e-3,
                duration: float | None = None, start: float | None = None) -> QVResponse:
    """Integrate the quarter-vehicle model with fixed-step RK4.

    The wheel is at path position ``start + speed * t`` (``start``
    defaults to the first profile sample). The body starts at rest at the
    initial road elevation.

    Raises
    ------
    StabilityError
        ``dt`` exceeds :func:`max_stable_step`.
    OutOfProfileError
        The run would leave the profile.
    """
    if not speed > 0:
        raise InvalidArgumentError("speed must be positive")
    if not dt > 0:
        raise InvalidArgumentError("dt must be positive")
    if dt > max_stable_step(params) * (1 + 1e-12):
        raise StabilityError(f"dt={dt} exceeds the stable step {max_stable_step(params):.5f} s")
    s0 = profile.distance[0] if start is None else float(start)
    if duration is None:
        duration = (profile.distance[-1] - s0) / speed
    n = int(math.floor(duration / dt + 1e-9))
    if s0 < profile.distance[0] or s0 + speed * n * dt > profile.distance[-1] + 1e-9:
        raise OutOfProfileError(
            f"run covers [{s0:.3f}, {s0 + speed * n * dt:.3f}] m, profile spans "
            f"[{profile.distance[0]:.3f}, {profile.distance[-1]:.3f}] m")

    half = np.arange(2 * n + 1) * (dt / 2)
    zd, slope = profile.at(np.minimum(s0 + speed * half, profile.distance[-1]))
    zd_dot = speed * slope
    k_m = params.wheel_stiffness / params.sprung_mass
    c_m = params.wheel_damping / params.sprung_mass

    z = np.empty(n + 1)
    v = np.empty(n + 1)
    z[0], v[0] = zd[0], 0.0
    zi, vi = z[0], 0.0
    zd_l, zdd_l = zd.tolist(), zd_dot.tolist()
    for i in range(n):
        j = 2 * i
        r0, r0d = zd_l[j], zdd_l[j]
        r1, r1d = zd_l[j + 1], zdd_l[j + 1]
        r2, r2d = zd_l[j + 2], zdd_l[j + 2]
        a1 = k_m * (r0 - zi) + c_m * (r0d - vi)
        z2, v2 = zi + 0.5 * dt * vi, vi + 0.5 * dt * a1
        a2 = k_m * (r1 - z2) + c_m * (r1d - v2)
        z3, v3 = zi + 0.5 * dt * v2, vi + 0.5 * dt * a2
        a3 = k_m * (r1 - z3) + c_m * (r1d - v3)
        z4, v4 = zi + dt * v3, vi + dt * a3
        a4 = k_m * (r2 - z4) + c_m * (r2d - v4)
        zi += dt / 6 * (vi + 2 * v2 + 2 * v3 + v4)
        vi += dt / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        z[i + 1], v[i + 1] = zi, vi
    road = zd[::2]
    acc = k_m * (road - z) + c_m * (zd_dot[::2] - v)
    t = np.arange(n + 1) * dt
    return QVResponse(t, z, v, acc, road)


def harmonic_amplitude(t, signal, omega: float, settle: float = 0.0) -> float:
    """Amplitude of the ``omega`` component of ``signal`` after ``settle``
    seconds, by projection over a whole number of periods."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(signal, dtype=float)
    period = 2 * math.pi / omega
    keep = t >= t[0] + settle
    t, x = t[keep], x[keep]
    cycles = math.floor((t[-1] - t[0]) / period)
    if cycles < 1:
        raise InvalidArgumentError("signal shorter than one period after settling")
    keep = t <= t[0] + cycles * period
    t, x = t[keep], x[keep]
    # trapezoidal projection on cos/sin over the whole cycles
    c = _trapz(x * np.cos(omega * t), t)
    s = _trapz(x * np.sin(omega * t), t)
    span = t[-1] - t[0]
    return 2 * math.hypot(c, s) / span


def sinusoid_profile(amplitude: float, wavelength: float, length: float, spacing: float | None = None,
                     label: TerrainClass | None = None) -> TerrainProfile:
    """Pure sine road ``amplitude * sin(2 pi s / wavelength)``."""
    spacing = spacing or wavelength / 400
    s = np.arange(0.0, length + spacing, spacing)
    return TerrainProfile(s, amplitude * np.sin(2 * math.pi * s / wavelength), label, wavelength, amplitude)
