"""Terrain classification for agricultural ground vehicles from colour,
geometric and contact (proprioceptive) features, with multimodal terrain
mapping and a vehicle-dynamics simulator for synthetic data."""

from .classifier import EcocSvmClassifier, EvaluationReport, LinearSVM, Standardizer, evaluate, kfold_cv
from .core import GRAVITY, Attitude, PoseSample, TerrainClass, VehicleParams, rotation_matrix_rpy, weight_in_vrf
from .features import FEATURE_NAMES, color_feature_vector, contact_feature_vector, geometric_feature_vector
from .features.extractor import PatchFeatureExtractor
from .logio import export_log, ingest_log
from .mapping import MultimodalMap, TerrainPatch, build_map, build_patches, export_map, import_map
from .series import SensorSeries

__version__ = "0.1.0"

__all__ = [
    "Attitude", "EcocSvmClassifier", "EvaluationReport", "FEATURE_NAMES", "GRAVITY", "LinearSVM",
    "MultimodalMap", "PatchFeatureExtractor", "PoseSample", "SensorSeries", "Standardizer", "TerrainClass",
    "TerrainPatch", "VehicleParams", "build_map", "build_patches", "color_feature_vector",
    "contact_feature_vector", "evaluate", "export_log", "export_map", "geometric_feature_vector", "import_map",
    "ingest_log", "kfold_cv", "rotation_matrix_rpy", "weight_in_vrf",
]
