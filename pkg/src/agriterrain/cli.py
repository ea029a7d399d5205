"""Command-line interface: ``agriterrain <command> [options]``.

Commands::

    simulate  --class C[,C...] --duration S --seed N --out LOG
    extract   --log LOG --out FEATURES
    train     --features FEATURES --mask MASK --C F --kfold K --seed N --out MODEL
    evaluate  --model MODEL --features FEATURES --report PATH
    classify  --model MODEL --log LOG --map MAP

Every command accepts ``--config FILE``, an INI file with optional
sections::

    [vehicle]            # any VehicleParams field
    weight = 313.6

    [run]                # defaults for command options
    seed = 7
    speed = 0.5
    mask = color+contact
    C = 1.0
    kfold = 5
    per_class = 59

    [noise]              # any SimNoise field
    accel = 0.005

    [preset.gravel]      # terrain generator overrides (see sim.presets)
    mean_slip = 0.0041

Command-line flags take precedence over the file, which takes precedence
over the built-in defaults. Exit status is 0 on success, 1 on a domain
error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from .classifier import EcocSvmClassifier, evaluate, kfold_cv
from .core import TerrainClass, VehicleParams, read_config
from .exceptions import InvalidArgumentError, TerrainError
from .features import FEATURE_NAMES, mask_columns, mask_name, parse_mask
from .features.extractor import patch_table, read_feature_csv, write_feature_csv
from .logio import atomic_write_text, export_log, ingest_log
from .mapping import build_map, build_patches, export_map

RUN_DEFAULTS = {"seed": 0, "speed": 0.5, "mask": "color+contact", "C": 1.0, "kfold": 5, "per_class": 0,
                "duration": 60.0}
_RUN_TYPES = {"seed": int, "speed": float, "mask": str, "C": float, "kfold": int, "per_class": int,
              "duration": float}


class _Config:
    def __init__(self, path=None):
        self.sections = read_config(path) if path else {}
        run = {k: v for k, v in self.sections.get("run", {}).items()}
        # configparser lower-cases keys
        run = {("C" if k == "c" else k): v for k, v in run.items()}
        unknown = set(run) - set(_RUN_TYPES)
        if unknown:
            raise InvalidArgumentError(f"[run] unknown keys: {sorted(unknown)}")
        self.run = {k: _RUN_TYPES[k](v) for k, v in run.items()}

    def value(self, args, name):
        v = getattr(args, name, None)
        if v is not None:
            return v
        return self.run.get(name, RUN_DEFAULTS[name])

    def vehicle(self) -> VehicleParams:
        values = self.sections.get("vehicle")
        return VehicleParams.from_dict({k: float(v) for k, v in values.items()}) if values else VehicleParams()

    def noise(self):
        from .sim import SimNoise

        values = self.sections.get("noise", {})
        names = {f.name for f in fields(SimNoise)}
        unknown = set(values) - names
        if unknown:
            raise InvalidArgumentError(f"[noise] unknown keys: {sorted(unknown)}")
        return replace(SimNoise(), **{k: float(v) for k, v in values.items()})


def _quiet_build(fn, *args, **kwargs):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = fn(*args, **kwargs)
    if caught:
        print(f"note: {len(caught)} warning(s), e.g. {caught[0].message}", file=sys.stderr)
    return out


def cmd_simulate(args, cfg: _Config) -> int:
    from .sim import load_presets, synth_mixed_run

    classes = [TerrainClass.parse(c) for c in args.terrain.split(",") if c.strip()]
    if not classes:
        raise InvalidArgumentError("--class needs at least one terrain class")
    duration = cfg.value(args, "duration")
    presets = load_presets(args.config) if args.config else None
    series, _ = synth_mixed_run([(c, duration) for c in classes], speed=cfg.value(args, "speed"),
                                seed=cfg.value(args, "seed"), params=cfg.vehicle(), presets=presets,
                                noise=cfg.noise(), pitch_amplitude=args.pitch_amplitude)
    export_log(series, args.out)
    print(f"wrote {args.out}: {series.duration:.1f} s, {len(series.frames)} frames")
    return 0


def cmd_extract(args, cfg: _Config) -> int:
    series = ingest_log(args.log)
    patches = _quiet_build(build_patches, series, cfg.vehicle())
    X, y, _ = patch_table(patches, labelled_only=False)
    if len(X) == 0:
        raise InvalidArgumentError(f"{args.log}: no traversed terrain patches")
    write_feature_csv(args.out, X, y)
    print(f"wrote {args.out}: {len(X)} patches")
    return 0


def _labelled(X, y, cols, source):
    keep = (y >= 0) & np.all(np.isfinite(X[:, cols]), axis=1)
    if not keep.any():
        raise InvalidArgumentError(f"{source}: no labelled rows with the selected features")
    return X[keep][:, cols], y[keep]


def cmd_train(args, cfg: _Config) -> int:
    mask = mask_name(cfg.value(args, "mask"))
    cols = mask_columns(mask)
    seed = cfg.value(args, "seed")
    C = cfg.value(args, "C")
    X, y = read_feature_csv(args.features)
    X, y = _labelled(X, y, cols, args.features)
    per_class = cfg.value(args, "per_class")
    if per_class:
        rng = np.random.default_rng(seed)
        keep = np.concatenate([np.sort(rng.permutation(np.flatnonzero(y == c))[:per_class]) for c in np.unique(y)])
        X, y = X[keep], y[keep]
    k = cfg.value(args, "kfold")
    cv = kfold_cv(X, y, k=k, C=C, seed=seed)
    model = EcocSvmClassifier(C=C, random_state=seed).fit(X, y)
    model.save(args.out, mask=mask, feature_names=[FEATURE_NAMES[i] for i in cols],
               cv={"k": k, "mean_error": cv.mean_error, "fold_errors": list(cv.fold_errors)},
               n_train=int(len(y)))
    print(f"wrote {args.out}: mask={mask}, {len(y)} samples, {k}-fold CV error {100 * cv.mean_error:.1f}%")
    return 0


def _load_model(path):
    model = EcocSvmClassifier.load(path)
    mask = model.metadata_.get("mask")
    if mask is None:
        raise InvalidArgumentError(f"{path}: model has no feature mask")
    parse_mask(mask)
    return model, mask


def cmd_evaluate(args, cfg: _Config) -> int:
    model, mask = _load_model(args.model)
    X, y = read_feature_csv(args.features)
    X, y = _labelled(X, y, mask_columns(mask), args.features)
    report = evaluate(model, X, y, classes=tuple(int(c) for c in TerrainClass))
    text = report.to_json() if Path(args.report).suffix.lower() == ".json" else report.to_text()
    atomic_write_text(args.report, text)
    print(report.to_text(), end="")
    return 0


def cmd_classify(args, cfg: _Config) -> int:
    model, mask = _load_model(args.model)
    series = ingest_log(args.log)
    mmap = _quiet_build(build_map, series, cfg.vehicle(), model=model, mask=mask)
    export_map(mmap, args.map)
    done = sum(p.predicted is not None for p in mmap.patches)
    print(f"wrote {args.map}: {len(mmap)} patches, {done} classified")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agriterrain", description="Terrain classification toolkit.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="generate a labelled synthetic sensor log")
    p.add_argument("--class", dest="terrain", required=True,
                   help="terrain class, or comma-separated classes driven in order")
    p.add_argument("--duration", type=float, help="seconds per class (default 60)")
    p.add_argument("--seed", type=int)
    p.add_argument("--speed", type=float, help="m/s (default 0.5)")
    p.add_argument("--pitch-amplitude", type=float, default=0.0, help="sinusoidal pitch amplitude, rad")
    p.add_argument("--out", required=True, help="output JSONL log")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("extract", parents=[common], help="compute patch features from a log")
    p.add_argument("--log", required=True)
    p.add_argument("--out", required=True, help="output features CSV")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", parents=[common], help="train an ECOC linear SVM")
    p.add_argument("--features", required=True)
    p.add_argument("--mask", help="color, geom, contact, color+contact or all")
    p.add_argument("--C", type=float, dest="C")
    p.add_argument("--kfold", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--per-class", type=int, dest="per_class", help="training samples per class (default all)")
    p.add_argument("--out", required=True, help="output model JSON")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", parents=[common], help="score a model on labelled features")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--report", required=True, help="report path (.json for JSON, text otherwise)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("classify", parents=[common], help="classify a log and export the terrain map")
    p.add_argument("--model", required=True)
    p.add_argument("--log", required=True)
    p.add_argument("--map", required=True, help="output map JSON")
    p.set_defaults(func=cmd_classify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _Config(args.config)
        return args.func(args, cfg)
    except (TerrainError, ValueError, OSError, KeyError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"agriterrain {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
