"""Ground segmentation, patch stitching, feature association and map files.

A patch is first described from a distance by its colour and geometry.
It becomes classifiable once the pose trajectory crosses its footprint,
when the contact features recorded during that crossing are attached.

Map file (JSON)::

    {"format": "agriterrain-map", "version": 1,
     "vehicle": {...VehicleParams...},
     "feature_names": [20 names],
     "path": [[t, x, y, z], ...],
     "patches": [{"id": 0, "status": "complete",
                  "centroid": [x, y, z], "bbox": {"min": [...], "max": [...]},
                  "cloud": "<map stem>_patches/000000.csv",
                  "features": [20 numbers, null when unavailable],
                  "label": "gravel" | null, "predicted": "gravel" | null,
                  "observed": [t0, t1], "traversal": [t0, t1] | null,
                  "heading": yaw}, ...]}

Patch clouds are world-frame ``x,y,z,r,g,b`` CSV files.
"""

from __future__ import annotations

import json
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .core import DEFAULT_MAX_GAP, Attitude, PoseSample, TerrainClass, VehicleParams, rotation_matrix_rpy
from .exceptions import (
    DroppedPatchWarning,
    EmptyGroundWarning,
    EmptyPatchError,
    InvalidArgumentError,
    MissingDataError,
    TerrainError,
)
from .features import FEATURE_NAMES
from .features.color import color_feature_vector
from .features.contact import ContactFeatures, contact_feature_vector
from .features.geometric import geometric_feature_vector
from .logio import atomic_write_text, read_cloud_csv, write_cloud_csv

MAP_FORMAT = "agriterrain-map"
MAP_VERSION = 1

FRAMES_PER_PATCH = 4
CORRIDOR_WIDTH = 0.70
LOOK_AHEAD = 1.0
# 3 frame steps (0.5 m/s at 8.5 Hz) plus this depth span 0.70 m
FRAME_DEPTH = 0.52
UNDERCARRIAGE_HEIGHT = 0.25
PENDING_HORIZON = 30.0


@dataclass(frozen=True, eq=False)
class TerrainPatch:
    """A stitched piece of ground: world-frame points plus features.

    ``status`` is ``"pending"`` until the vehicle has driven over the
    patch, then ``"complete"``. ``dropped`` patches fell out of the
    look-ahead horizon without being traversed.
    """

    xyz: np.ndarray
    rgb: np.ndarray
    frame_range: tuple[int, int] = (0, 0)
    observed: tuple[float, float] = (0.0, 0.0)
    heading: float = 0.0
    traversal: tuple[float, float] | None = None
    color: np.ndarray | None = None
    geometric: np.ndarray | None = None
    contact: ContactFeatures | None = None
    label: TerrainClass | None = None
    predicted: TerrainClass | None = None
    status: str = "pending"

    def __post_init__(self):
        xyz = np.asarray(self.xyz, dtype=float).reshape(-1, 3)
        rgb = np.asarray(self.rgb, dtype=float).reshape(-1, 3)
        if len(xyz) == 0:
            raise EmptyPatchError("terrain patch needs at least one point")
        if len(xyz) != len(rgb):
            raise InvalidArgumentError("xyz and rgb lengths differ")
        object.__setattr__(self, "xyz", xyz)
        object.__setattr__(self, "rgb", rgb)

    @property
    def centroid(self) -> np.ndarray:
        return self.xyz.mean(axis=0)

    @property
    def completed(self) -> bool:
        return self.status == "complete"

    def feature_vector(self) -> np.ndarray:
        """All 20 features; entries not yet computed are NaN."""
        out = np.full(20, np.nan)
        if self.color is not None:
            out[:12] = self.color
        if self.geometric is not None:
            out[12:16] = self.geometric
        if self.contact is not None:
            out[16:] = self.contact.as_array()
        return out

    def footprint_coords(self, xy) -> np.ndarray:
        """Positions expressed along / across the patch heading, relative to
        its centroid."""
        c = self.centroid[:2]
        h = np.array([math.cos(self.heading), math.sin(self.heading)])
        d = np.atleast_2d(xy)[:, :2] - c
        return np.column_stack((d @ h, d @ np.array([-h[1], h[0]])))


@dataclass(eq=False)
class MultimodalMap:
    patches: list[TerrainPatch]
    path: np.ndarray = field(default_factory=lambda: np.empty((0, 4)))
    params: VehicleParams = field(default_factory=VehicleParams)

    def __len__(self):
        return len(self.patches)


def segment_ground(frame, pose: PoseSample, footprint=(CORRIDOR_WIDTH, FRAME_DEPTH),
                   look_ahead: float = LOOK_AHEAD, undercarriage_height: float = UNDERCARRIAGE_HEIGHT):
    """Keep the ground points of one frame and move them to the world frame.

    The camera frame is taken to coincide with the vehicle frame, whose
    origin is the ground point under the vehicle centre. A point is kept
    when it lies in the corridor ``look_ahead .. look_ahead + depth`` ahead
    of the vehicle, within ``width / 2`` of its centre line, and below the
    undercarriage plane.

    ``frame`` is a :class:`~agriterrain.series.CloudFrame` or an
    ``(xyz, rgb)`` pair.

    Returns
    -------
    xyz_world, rgb : ndarray
        Possibly empty, in which case :class:`EmptyGroundWarning` is issued.
    """
    xyz, rgb = (frame.xyz, frame.rgb) if hasattr(frame, "xyz") else frame
    xyz = np.asarray(xyz, dtype=float).reshape(-1, 3)
    rgb = np.asarray(rgb, dtype=float).reshape(-1, 3)
    if len(xyz) == 0:
        raise EmptyPatchError("frame has no points")
    width, depth = footprint
    keep = (
        (xyz[:, 0] >= look_ahead) & (xyz[:, 0] <= look_ahead + depth)
        & (np.abs(xyz[:, 1]) <= width / 2)
        & (xyz[:, 2] <= undercarriage_height)
    )
    if not keep.any():
        warnings.warn(f"no ground points retained in frame at t={pose.timestamp:.3f}", EmptyGroundWarning,
                      stacklevel=2)
    rot = rotation_matrix_rpy(pose.attitude)
    world = xyz[keep] @ rot.T + np.asarray(pose.position, dtype=float)
    return world, rgb[keep]


def interpolate_pose(poses, t: float, max_gap: float = DEFAULT_MAX_GAP) -> PoseSample | None:
    """Linearly interpolated pose at ``t``; ``None`` when the bracketing
    samples are further than ``max_gap`` from ``t``. Outside the logged
    range the end pose is held for up to ``max_gap`` seconds."""
    pt = poses.t
    if len(pt) == 0 or t < pt[0] - max_gap or t > pt[-1] + max_gap:
        return None
    if t <= pt[0] or t >= pt[-1]:
        i = 0 if t <= pt[0] else len(pt) - 1
        s = poses.sample(i)
        return PoseSample(float(t), s.position, s.attitude)
    j = int(np.searchsorted(pt, t))
    i = j - 1
    if t - pt[i] > max_gap or pt[j] - t > max_gap:
        return None
    w = 0.0 if pt[j] == pt[i] else (t - pt[i]) / (pt[j] - pt[i])
    w = min(max(w, 0.0), 1.0)
    xyz = (1 - w) * poses.xyz[i] + w * poses.xyz[j]
    a, b = poses.rpy[i], poses.rpy[j]
    d = (b - a + np.pi) % (2 * np.pi) - np.pi
    rpy = a + w * d
    return PoseSample(float(t), tuple(float(v) for v in xyz), Attitude(*map(float, rpy)))


def stitch_patches(frames, poses, frames_per_patch: int = FRAMES_PER_PATCH,
                   max_gap: float = DEFAULT_MAX_GAP, **segment_kw) -> list[TerrainPatch]:
    """Group consecutive frames into non-overlapping patches.

    Each group of ``frames_per_patch`` frames is segmented with
    :func:`segment_ground` at the pose interpolated to the frame time and
    merged. A group with a frame lacking a pose, or with no ground points
    at all, is dropped with :class:`DroppedPatchWarning`. Trailing frames
    that do not fill a group are ignored.
    """
    frames = list(frames)
    patches = []
    for g in range(len(frames) // frames_per_patch):
        group = frames[g * frames_per_patch:(g + 1) * frames_per_patch]
        pts, cols, headings = [], [], []
        dropped = None
        for frame in group:
            pose = interpolate_pose(poses, frame.t, max_gap)
            if pose is None:
                dropped = f"no pose within {max_gap} s of frame at t={frame.t:.3f}"
                break
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", EmptyGroundWarning)
                xyz, rgb = segment_ground(frame, pose, **segment_kw)
            pts.append(xyz)
            cols.append(rgb)
            headings.append(pose.attitude.yaw)
        if dropped is None and sum(len(p) for p in pts) == 0:
            dropped = "no ground points"
        if dropped is not None:
            warnings.warn(f"patch {g} dropped: {dropped}", DroppedPatchWarning, stacklevel=2)
            continue
        labels = [f.label for f in group if f.label is not None]
        label = None
        if labels:
            counts = Counter(labels)
            label = max(counts, key=lambda c: (counts[c], -int(c)))
        heading = math.atan2(np.mean(np.sin(headings)), np.mean(np.cos(headings)))
        patches.append(TerrainPatch(
            xyz=np.vstack(pts), rgb=np.vstack(cols),
            frame_range=(g * frames_per_patch, (g + 1) * frames_per_patch - 1),
            observed=(group[0].t, group[-1].t), heading=heading, label=label,
        ))
    return patches


def traversal_window(patch: TerrainPatch, poses, params: VehicleParams) -> tuple[float, float] | None:
    """First time interval, after the patch was first observed, during
    which the vehicle centre lies inside the patch footprint.

    The footprint is a chassis-sized rectangle (length along the heading)
    centred on the patch centroid. Entry and exit times are interpolated
    linearly between pose samples.
    """
    if len(poses.t) < 2:
        return None
    after = poses.t >= patch.observed[0]
    uv = patch.footprint_coords(poses.xyz)
    half = np.array([params.length / 2, params.width / 2])
    # signed distance to the rectangle, negative inside
    slack = np.max(np.abs(uv) - half, axis=1)
    inside = (slack <= 0) & after
    if not inside.any():
        return None
    k0 = int(np.argmax(inside))
    k1 = k0
    while k1 + 1 < len(inside) and inside[k1 + 1]:
        k1 += 1
    t = poses.t

    def cross(a, b):
        sa, sb = slack[a], slack[b]
        w = sa / (sa - sb) if sa != sb else 0.0
        return float(t[a] + w * (t[b] - t[a]))

    t_in = cross(k0 - 1, k0) if k0 > 0 and after[k0 - 1] else float(t[k0])
    t_out = cross(k1, k1 + 1) if k1 + 1 < len(t) else float(t[k1])
    return t_in, t_out


def associate_features(patch: TerrainPatch, series, params: VehicleParams,
                       max_gap: float = DEFAULT_MAX_GAP) -> TerrainPatch:
    """Attach colour and geometric features, then contact features once the
    patch has been traversed.

    An untraversed patch is returned with ``status == "pending"``.
    """
    color = patch.color if patch.color is not None else color_feature_vector(patch.rgb)
    geom = patch.geometric if patch.geometric is not None else geometric_feature_vector(patch.xyz)
    window = traversal_window(patch, series.pose, params)
    if window is None:
        return replace(patch, color=color, geometric=geom, status="pending")
    contact = contact_feature_vector(series, window, params, max_gap=max_gap)
    return replace(patch, color=color, geometric=geom, traversal=window, contact=contact, status="complete")


def _travelled(poses) -> np.ndarray:
    steps = np.linalg.norm(np.diff(poses.xyz[:, :2], axis=0), axis=1)
    return np.concatenate(([0.0], np.cumsum(steps)))


def build_patches(series, params: VehicleParams | None = None, horizon: float = PENDING_HORIZON,
                  max_gap: float = DEFAULT_MAX_GAP, **segment_kw) -> list[TerrainPatch]:
    """Stitch the frames of a run and associate features with every patch.

    Pending patches observed more than ``horizon`` metres of travel before
    the end of the log are marked ``dropped``. Patches whose contact
    window cannot be evaluated (sensor dropout) are dropped with a warning.
    """
    params = params or VehicleParams()
    patches = stitch_patches(series.frames, series.pose, max_gap=max_gap, **segment_kw)
    dist = _travelled(series.pose)
    out = []
    for i, patch in enumerate(patches):
        try:
            patch = associate_features(patch, series, params, max_gap)
        except MissingDataError as exc:
            warnings.warn(f"patch {i} dropped: {exc}", DroppedPatchWarning, stacklevel=2)
            continue
        if patch.status == "pending":
            seen = dist[min(np.searchsorted(series.pose.t, patch.observed[1]), len(dist) - 1)]
            if dist[-1] - seen > horizon:
                patch = replace(patch, status="dropped")
        out.append(patch)
    return out


def build_map(series, params: VehicleParams | None = None, model=None, mask="color+contact",
              **kwargs) -> MultimodalMap:
    """Build a multimodal map, classifying completed patches with ``model``
    (an estimator with ``predict``) on the feature columns of ``mask``."""
    from .features import mask_columns

    params = params or VehicleParams()
    patches = build_patches(series, params, **kwargs)
    if model is not None:
        cols = mask_columns(mask)
        # patches with an undefined selected feature stay unclassified
        done = [i for i, p in enumerate(patches)
                if p.completed and np.all(np.isfinite(p.feature_vector()[cols]))]
        if done:
            X = np.array([patches[i].feature_vector()[cols] for i in done])
            pred = model.predict(X)
            for i, y in zip(done, pred):
                patches[i] = replace(patches[i], predicted=TerrainClass(int(y)))
    order = sorted(range(len(patches)), key=lambda i: (
        patches[i].traversal is None, patches[i].traversal[0] if patches[i].traversal else patches[i].observed[0]))
    path = np.column_stack((series.pose.t, series.pose.xyz)) if len(series.pose.t) else np.empty((0, 4))
    return MultimodalMap([patches[i] for i in order], path, params)


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else None


def export_map(mmap: MultimodalMap, destination) -> Path:
    """Write a map JSON file plus one world-frame CSV per patch."""
    if len(mmap) == 0:
        raise InvalidArgumentError("cannot export an empty map")
    destination = Path(destination)
    cloud_dir = destination.parent / f"{destination.stem}_patches"
    cloud_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for i, p in enumerate(mmap.patches):
        cloud = cloud_dir / f"{i:06d}.csv"
        write_cloud_csv(cloud, p.xyz, p.rgb)
        records.append({
            "id": i,
            "status": p.status,
            "centroid": [float(v) for v in p.centroid],
            "bbox": {"min": [float(v) for v in p.xyz.min(axis=0)], "max": [float(v) for v in p.xyz.max(axis=0)]},
            "cloud": str(cloud.relative_to(destination.parent)),
            "features": [_num(v) for v in p.feature_vector()],
            "negative_slip_samples": p.contact.negative_slip_samples if p.contact else None,
            "label": p.label.slug if p.label is not None else None,
            "predicted": p.predicted.slug if p.predicted is not None else None,
            "observed": [float(v) for v in p.observed],
            "traversal": [float(v) for v in p.traversal] if p.traversal else None,
            "heading": float(p.heading),
            "frame_range": list(p.frame_range),
        })
    doc = {
        "format": MAP_FORMAT,
        "version": MAP_VERSION,
        "vehicle": mmap.params.to_dict(),
        "feature_names": list(FEATURE_NAMES),
        "path": [[float(v) for v in row] for row in mmap.path],
        "patches": records,
    }
    atomic_write_text(destination, json.dumps(doc, indent=1) + "\n")
    return destination


def import_map(source) -> MultimodalMap:
    """Read a map written by :func:`export_map`."""
    source = Path(source)
    doc = json.loads(source.read_text())
    if doc.get("format") != MAP_FORMAT:
        raise TerrainError(f"{source}: not an {MAP_FORMAT} file")
    if doc.get("version") != MAP_VERSION:
        raise TerrainError(f"{source}: unsupported map version {doc.get('version')!r}")
    patches = []
    for rec in doc["patches"]:
        xyz, rgb = read_cloud_csv(source.parent / rec["cloud"])
        f = np.array([np.nan if v is None else v for v in rec["features"]], dtype=float)
        contact = None
        if not np.all(np.isnan(f[16:])):
            contact = ContactFeatures(*f[16:], negative_slip_samples=rec.get("negative_slip_samples") or 0)
        patches.append(TerrainPatch(
            xyz=xyz, rgb=rgb,
            frame_range=tuple(rec.get("frame_range", (0, 0))),
            observed=tuple(rec["observed"]),
            heading=rec.get("heading", 0.0),
            traversal=tuple(rec["traversal"]) if rec["traversal"] else None,
            color=None if np.all(np.isnan(f[:12])) else f[:12],
            geometric=None if np.all(np.isnan(f[12:16])) else f[12:16],
            contact=contact,
            label=TerrainClass.parse(rec["label"]) if rec["label"] else None,
            predicted=TerrainClass.parse(rec["predicted"]) if rec["predicted"] else None,
            status=rec["status"],
        ))
    path = np.array(doc["path"], dtype=float).reshape(-1, 4)
    return MultimodalMap(patches, path, VehicleParams.from_dict(doc["vehicle"]))
