"""Vehicle-dynamics simulator producing labelled synthetic sensor runs."""

from .presets import DEFAULT_PRESETS, TerrainPreset, load_presets
from .qv import (
    QVResponse,
    TerrainProfile,
    excitation_frequency,
    harmonic_amplitude,
    max_stable_step,
    simulate_qv,
    sinusoid_profile,
    transfer_magnitude,
)
from .runs import CAMERA_RATE, SimNoise, synth_mixed_run, synth_run, synth_terrain_profile

__all__ = [
    "CAMERA_RATE", "DEFAULT_PRESETS", "QVResponse", "SimNoise", "TerrainPreset", "TerrainProfile",
    "excitation_frequency", "harmonic_amplitude", "load_presets", "max_stable_step", "simulate_qv",
    "sinusoid_profile", "synth_mixed_run", "synth_run", "synth_terrain_profile", "transfer_magnitude",
]
