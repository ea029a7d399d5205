"""Per-terrain generator settings.

Slip means and vertical-acceleration spreads are reference values at
0.5 m/s. Motion-resistance means, profile wavelength bands, colour
mixtures and relief amplitudes are configuration.

Preset files are INI-style; one section per class::

    [preset.gravel]
    mean_slip = 0.0041
    accel_std_target = 0.063
    mean_motion_resistance = 0.10
    wavelength_min = 0.04
    wavelength_max = 0.2
    colors = 0.7:195,192,186:16 ; 0.3:160,132,98:14

``colors`` lists ``weight:r,g,b:std`` mixture components separated by
``;``. Keys left out keep their defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from ..core import TerrainClass, read_config
from ..exceptions import InvalidArgumentError


@dataclass(frozen=True)
class TerrainPreset:
    terrain: TerrainClass
    mean_slip: float
    accel_std_target: float
    mean_motion_resistance: float
    wavelength_min: float
    wavelength_max: float
    colors: tuple[tuple[float, tuple[float, float, float], float], ...]
    # slow (correlated) variability of the contact quantities, 1 sigma
    slip_variability: float = 0.0015
    resistance_variability: float = 0.1
    # surface relief seen by the stereo camera
    relief_std: float = 0.005
    furrow_amplitude: float = 0.0
    furrow_wavelength: float = 0.35

    def __post_init__(self):
        object.__setattr__(self, "terrain", TerrainClass.parse(self.terrain))
        if not 0 <= self.mean_slip < 1:
            raise InvalidArgumentError("mean_slip must lie in [0, 1)")
        if not self.accel_std_target > 0:
            raise InvalidArgumentError("accel_std_target must be positive")
        if not 0 < self.wavelength_min <= self.wavelength_max:
            raise InvalidArgumentError("wavelength band must satisfy 0 < min <= max")
        if not self.colors or any(w <= 0 for w, _, _ in self.colors):
            raise InvalidArgumentError("colors needs at least one positively weighted component")


DEFAULT_PRESETS = {
    TerrainClass.PLOUGHED: TerrainPreset(
        TerrainClass.PLOUGHED, mean_slip=0.0057, accel_std_target=0.084, mean_motion_resistance=0.15,
        wavelength_min=0.15, wavelength_max=0.8,
        colors=((0.85, (92.0, 66.0, 46.0), 14.0), (0.15, (120.0, 92.0, 66.0), 14.0)),
        relief_std=0.012, furrow_amplitude=0.03,
    ),
    TerrainClass.UNPLOUGHED: TerrainPreset(
        TerrainClass.UNPLOUGHED, mean_slip=0.0029, accel_std_target=0.053, mean_motion_resistance=0.08,
        wavelength_min=0.08, wavelength_max=0.5,
        colors=((0.8, (168.0, 138.0, 104.0), 20.0), (0.2, (182.0, 176.0, 164.0), 16.0)),
        relief_std=0.006,
    ),
    TerrainClass.DIRT_ROAD: TerrainPreset(
        TerrainClass.DIRT_ROAD, mean_slip=0.0021, accel_std_target=0.026, mean_motion_resistance=0.05,
        wavelength_min=0.1, wavelength_max=0.6,
        colors=((0.85, (172.0, 141.0, 106.0), 20.0), (0.15, (186.0, 182.0, 172.0), 16.0)),
        relief_std=0.004,
    ),
    TerrainClass.GRAVEL: TerrainPreset(
        TerrainClass.GRAVEL, mean_slip=0.0041, accel_std_target=0.063, mean_motion_resistance=0.10,
        wavelength_min=0.04, wavelength_max=0.2,
        colors=((0.7, (195.0, 192.0, 186.0), 16.0), (0.3, (160.0, 132.0, 98.0), 14.0)),
        relief_std=0.008,
    ),
}


def _parse_colors(text: str):
    comps = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            w, rgb, std = part.split(":")
            r, g, b = (float(v) for v in rgb.split(","))
            comps.append((float(w), (r, g, b), float(std)))
        except ValueError:
            raise InvalidArgumentError(f"bad colour component {part!r}; expected weight:r,g,b:std") from None
    return tuple(comps)


def load_presets(path, base=None) -> dict[TerrainClass, TerrainPreset]:
    """Read ``[preset.<class>]`` sections, overriding ``base`` (defaults to
    :data:`DEFAULT_PRESETS`)."""
    presets = dict(base or DEFAULT_PRESETS)
    names = {f.name for f in fields(TerrainPreset)} - {"terrain"}
    for section, values in read_config(path).items():
        if not section.startswith("preset."):
            continue
        cls = TerrainClass.parse(section.split(".", 1)[1])
        changes = {}
        for key, raw in values.items():
            if key not in names:
                raise InvalidArgumentError(f"[{section}] unknown key {key!r}")
            changes[key] = _parse_colors(raw) if key == "colors" else float(raw)
        presets[cls] = replace(presets[cls], **changes)
    return presets
