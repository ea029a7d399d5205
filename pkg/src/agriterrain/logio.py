"""JSON-lines sensor log reader and writer.

One record per line::

    {"t": 0.02, "kind": "imu", "ax": 0.0, "ay": 0.0, "az": -9.81,
     "roll": 0.0, "pitch": 0.0, "yaw": 0.0}
    {"t": 0.02, "kind": "enc", "w1": 3.03, "w2": 3.03, "w3": 3.03, "w4": 3.03}
    {"t": 0.02, "kind": "cur", "il": 0.74, "ir": 0.74}
    {"t": 0.1, "kind": "pose", "x": 0.05, "y": 0.0, "z": 0.0,
     "roll": 0.0, "pitch": 0.0, "yaw": 0.0}
    {"t": 0.0, "kind": "cloud", "file": "run_clouds/000000.csv", "label": "gravel"}

``imu`` and ``pose`` records may carry ``"unit": "deg"`` to give angles in
degrees. Cloud files hold ``x,y,z,r,g,b`` rows (camera frame, metres, RGB
0..255) and are resolved relative to the log's directory. ``label`` is an
optional ground-truth terrain class written by the simulator.
"""

from __future__ import annotations

import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .core import TerrainClass
from .exceptions import EmptySeriesError, InvalidArgumentError, LogParseError
from .series import CloudFrame, CurrentStream, EncoderStream, ImuStream, PoseStream, SensorSeries

KINDS = ("imu", "enc", "cur", "pose", "cloud")
_FIELDS = {
    "imu": ("ax", "ay", "az", "roll", "pitch", "yaw"),
    "enc": ("w1", "w2", "w3", "w4"),
    "cur": ("il", "ir"),
    "pose": ("x", "y", "z", "roll", "pitch", "yaw"),
}


def read_cloud_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read an ``x,y,z,r,g,b`` CSV file; a header line is optional."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if lineno == 1 and parts[0].strip().lower() == "x":
                continue
            if len(parts) != 6:
                raise InvalidArgumentError(f"{path}:{lineno}: expected 6 columns, got {len(parts)}")
            rows.append([float(p) for p in parts])
    data = np.array(rows, dtype=float).reshape(-1, 6)
    return data[:, :3], data[:, 3:]


def write_cloud_csv(path, xyz, rgb) -> None:
    lines = ["x,y,z,r,g,b"]
    for p, c in zip(np.asarray(xyz, float), np.asarray(rgb, float)):
        lines.append(",".join(repr(float(v)) for v in (*p, *c)))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _number(rec, key, lineno):
    try:
        value = rec[key]
    except KeyError:
        raise LogParseError(lineno, f"missing field {key!r}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise LogParseError(lineno, f"field {key!r} must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise LogParseError(lineno, f"field {key!r} is not finite")
    return value


def ingest_log(source, format: str = "jsonl", base_dir=None) -> SensorSeries:
    """Parse a sensor log into a :class:`SensorSeries`.

    Parameters
    ----------
    source : path-like, bytes, str or file object
        The log. A ``str`` is treated as a path; pass ``io.StringIO`` for
        literal text.
    format : str
        Only ``"jsonl"`` is supported.
    base_dir : path-like, optional
        Directory cloud file references are resolved against. Defaults to
        the log's directory, or the working directory for streams.

    Raises
    ------
    LogParseError
        On a malformed record or a timestamp that does not increase within
        its stream; the message carries the line number.
    EmptySeriesError
        If the log holds no records.
    """
    if format != "jsonl":
        raise InvalidArgumentError(f"unsupported log format {format!r}")
    if isinstance(source, (str, os.PathLike)):
        path = Path(source)
        base_dir = path.parent if base_dir is None else base_dir
        text = path.read_text()
    elif isinstance(source, bytes):
        text = source.decode()
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode()
    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()

    cols = {k: [] for k in KINDS}
    last_t = {}
    for lineno, line in enumerate(io.StringIO(text), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LogParseError(lineno, f"invalid JSON: {exc.msg}") from None
        if not isinstance(rec, dict):
            raise LogParseError(lineno, "record must be a JSON object")
        kind = rec.get("kind")
        if kind not in KINDS:
            raise LogParseError(lineno, f"unknown kind {kind!r}")
        t = _number(rec, "t", lineno)
        if kind in last_t and t <= last_t[kind]:
            raise LogParseError(lineno, f"{kind} timestamp {t!r} does not increase (previous {last_t[kind]!r})")
        last_t[kind] = t

        if kind == "cloud":
            ref = rec.get("file")
            if not isinstance(ref, str):
                raise LogParseError(lineno, "cloud record needs a 'file' string")
            label = rec.get("label")
            if label is not None:
                try:
                    label = TerrainClass.parse(label)
                except InvalidArgumentError as exc:
                    raise LogParseError(lineno, str(exc)) from None
            try:
                xyz, rgb = read_cloud_csv(base_dir / ref)
            except (OSError, ValueError) as exc:
                raise LogParseError(lineno, f"cannot read cloud file {ref!r}: {exc}") from None
            cols["cloud"].append(CloudFrame(t, xyz, rgb, label))
            continue

        values = [_number(rec, k, lineno) for k in _FIELDS[kind]]
        unit = rec.get("unit", "rad")
        if unit not in ("rad", "deg"):
            raise LogParseError(lineno, f"unknown angle unit {unit!r}")
        if unit == "deg" and kind in ("imu", "pose"):
            values[3:] = [math.radians(v) for v in values[3:]]
        cols[kind].append([t] + values)

    if not any(cols.values()):
        raise EmptySeriesError("log contains no records")

    def arr(kind, width):
        return np.array(cols[kind], dtype=float).reshape(-1, width + 1)

    imu, enc, cur, pose = arr("imu", 6), arr("enc", 4), arr("cur", 2), arr("pose", 6)
    return SensorSeries(
        imu=ImuStream(imu[:, 0], imu[:, 1:4], imu[:, 4:7]),
        enc=EncoderStream(enc[:, 0], enc[:, 1:5]),
        cur=CurrentStream(cur[:, 0], cur[:, 1:3]),
        pose=PoseStream(pose[:, 0], pose[:, 1:4], pose[:, 4:7]),
        frames=tuple(cols["cloud"]),
    )


def _records(series: SensorSeries, cloud_refs):
    out = []
    for i, t in enumerate(series.imu.t):
        out.append((t, 0, dict(zip(_FIELDS["imu"], (*series.imu.accel[i], *series.imu.rpy[i])))))
    for i, t in enumerate(series.enc.t):
        out.append((t, 1, dict(zip(_FIELDS["enc"], series.enc.omega[i]))))
    for i, t in enumerate(series.cur.t):
        out.append((t, 2, dict(zip(_FIELDS["cur"], series.cur.current[i]))))
    for i, t in enumerate(series.pose.t):
        out.append((t, 3, dict(zip(_FIELDS["pose"], (*series.pose.xyz[i], *series.pose.rpy[i])))))
    for frame, ref in zip(series.frames, cloud_refs):
        body = {"file": ref}
        if frame.label is not None:
            body["label"] = frame.label.slug
        out.append((frame.t, 4, body))
    out.sort(key=lambda r: (r[0], r[1]))
    return out


def export_log(series: SensorSeries, destination, cloud_dir=None) -> Path:
    """Write ``series`` as a JSON-lines log plus one CSV per point cloud.

    Clouds go to ``<log stem>_clouds/`` next to the log unless ``cloud_dir``
    is given. Floats are written with ``repr`` so a re-ingested series is
    bit-identical. Files are written atomically.
    """
    destination = Path(destination)
    cloud_dir = Path(cloud_dir) if cloud_dir is not None else destination.parent / f"{destination.stem}_clouds"
    refs = []
    if series.frames:
        cloud_dir.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(series.frames):
        path = cloud_dir / f"{i:06d}.csv"
        write_cloud_csv(path, frame.xyz, frame.rgb)
        refs.append(os.path.relpath(path, destination.parent))
    kinds = KINDS
    lines = []
    for t, k, body in _records(series, refs):
        rec = {"t": float(t), "kind": kinds[k]}
        rec.update({key: (float(v) if not isinstance(v, str) else v) for key, v in body.items()})
        lines.append(json.dumps(rec))
    atomic_write_text(destination, "\n".join(lines) + "\n")
    return destination


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
