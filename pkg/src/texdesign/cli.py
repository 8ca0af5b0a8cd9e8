"""Command-line interface: extract, stats, run, synth.

Exit codes: 0 success, 1 usage error, 2 data error, 3 partial failure.
All report files are plain CSV/JSON, written deterministically: same
manifest, config, and seed give byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .designs import ModelVector, all_designs
from .hyperopt import build_space
from .imageio import GrayImage, load_image, resize
from .pipeline import (Dataset, DesignFailure, DesignReport, Sample,
                       selection_rates, sweep_designs)
from .stats import significance_report
from .synth import write_dataset
from .texture import FEATURE_NAMES, TextureParams, extract_features

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PARTIAL = 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); we reserve 2 for data
        raise UsageError(message)


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    k: int = 5
    b: int = 300
    seed: int = 0
    width: Optional[int] = None  # target dims; None = per-command default
    height: Optional[int] = None
    workers: int = 1
    per_class: int = 20
    alpha: float = 0.05
    designs: Optional[tuple[str, ...]] = None
    texture: TextureParams = TextureParams()

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.b < 1:
            raise ValueError("b must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        for dim in (self.width, self.height):
            if dim is not None and dim < 8:
                raise ValueError("target dims must be at least 8x8")


_TEXTURE_KEYS = ("fos_levels", "glds_levels", "glds_distance", "glcm_levels",
                 "glcm_distance", "glrlm_levels", "adf_angle_step", "rdf_radius_step")
_INT_KEYS = ("k", "b", "seed", "width", "height", "workers", "per_class")


def _parse_config_text(text: str) -> dict:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return json.loads(text)
    values = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line is not key=value: {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def load_config(path: Optional[str], overrides: dict) -> RunConfig:
    """Config file (JSON or key=value lines) with flag overrides winning."""
    values: dict = {}
    if path is not None:
        values.update(_parse_config_text(Path(path).read_text(encoding="utf-8")))
    values.update({k: v for k, v in overrides.items() if v is not None})

    kwargs: dict = {}
    texture_kwargs: dict = {}
    for key, value in values.items():
        if key in _INT_KEYS:
            kwargs[key] = int(value)
        elif key == "alpha":
            kwargs[key] = float(value)
        elif key == "designs":
            if isinstance(value, str):
                value = [v for v in value.split(",") if v]
            kwargs[key] = tuple(value)
        elif key in _TEXTURE_KEYS:
            texture_kwargs[key] = int(value)
        else:
            raise ValueError(f"unknown config key {key!r}")
    if texture_kwargs:
        kwargs["texture"] = TextureParams(**texture_kwargs)
    return RunConfig(**kwargs)


def _parse_designs(config: RunConfig) -> Optional[list[ModelVector]]:
    if config.designs is None:
        return None
    known = {d.label: d for d in all_designs()}
    chosen = []
    for label in config.designs:
        norm = label.strip().replace(",", "+")
        if norm not in known:
            raise UsageError(f"unknown design {label!r}; expected one of "
                             + ", ".join(known))
        chosen.append(known[norm])
    return chosen


# ---------------------------------------------------------------------------
# manifest loading


@dataclass(frozen=True)
class ManifestRow:
    path: Path
    label: str
    subject: Optional[str] = None


def load_manifest(path: str) -> list[ManifestRow]:
    """CSV (path,label[,subject]) with header, or a JSON list of objects."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    base = p.parent
    rows: list[ManifestRow] = []
    if text.lstrip().startswith(("[", "{")):
        payload = json.loads(text)
        if isinstance(payload, dict):
            payload = payload.get("samples")
        if not isinstance(payload, list):
            raise DataError("JSON manifest must be a list or {'samples': [...]}")
        for entry in payload:
            rows.append(ManifestRow(path=base / entry["path"], label=str(entry["label"]),
                                    subject=entry.get("subject")))
    else:
        reader = csv.DictReader(text.splitlines())
        if reader.fieldnames is None or "path" not in reader.fieldnames \
                or "label" not in reader.fieldnames:
            raise DataError("manifest CSV needs a header with path,label columns")
        for entry in reader:
            rows.append(ManifestRow(path=base / entry["path"], label=entry["label"],
                                    subject=entry.get("subject") or None))
    if not rows:
        raise DataError("manifest has no rows")
    return rows


def _load_samples(rows: Sequence[ManifestRow], target: Optional[tuple[int, int]],
                  skip_bad: bool) -> tuple[list[Sample], list[str]]:
    """Load, grayscale, and optionally resize every manifest row.

    skip_bad collects unreadable rows as warnings instead of failing.
    """
    samples: list[Sample] = []
    skipped: list[str] = []
    for row in rows:
        try:
            img = load_image(row.path)
            if target is not None and (img.width, img.height) != target:
                img = resize(img, target[0], target[1])
        except Exception as exc:
            if not skip_bad:
                raise DataError(f"{row.path}: {exc}") from exc
            logger.warning("skipping %s: %s", row.path, exc)
            skipped.append(str(row.path))
            continue
        samples.append(Sample(sample_id=str(row.path), image=img,
                              label=row.label, subject=row.subject))
    return samples, skipped


# ---------------------------------------------------------------------------
# deterministic file output


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


# ---------------------------------------------------------------------------
# commands


def cmd_extract(args) -> int:
    config = load_config(args.config, _overrides(args))
    rows = load_manifest(args.manifest)
    target = _target_dims(config, default=None)
    samples, skipped = _load_samples(rows, target, skip_bad=True)
    if not samples:
        raise DataError("no readable images in manifest")
    out_dir = _out_dir(args)
    out_rows = []
    for sample in samples:
        vec = extract_features(sample.image, config.texture)
        out_rows.append([sample.sample_id, sample.label] + list(vec))
    _write_csv(out_dir / "features.csv", ["path", "label", *FEATURE_NAMES], out_rows)
    print(f"wrote {out_dir / 'features.csv'} ({len(out_rows)} rows)")
    return EXIT_PARTIAL if skipped else EXIT_OK


def cmd_stats(args) -> int:
    config = load_config(args.config, _overrides(args))
    features, labels = _read_features_csv(Path(args.features))
    if np.unique(labels).size != 3:
        raise DataError("significance analysis needs exactly 3 classes")
    rows, boxes = significance_report(features, labels, alpha=config.alpha)
    out_dir = _out_dir(args)
    _write_csv(out_dir / "significance.csv",
               ["feature", "H", "p_raw", "p_adj", "significant"],
               [[r.feature, r.h_statistic, r.p_raw, r.p_adjusted, r.significant]
                for r in rows])
    _write_csv(out_dir / "boxplot.csv",
               ["feature", "class", "min", "q1", "median", "q3", "max"],
               [[b.feature, b.label, b.minimum, b.q1, b.median, b.q3, b.maximum]
                for b in boxes])
    n_sig = sum(r.significant for r in rows)
    print(f"{n_sig}/{len(rows)} features significant at alpha={config.alpha}")
    return EXIT_OK


def _report_row(outcome) -> list:
    design = outcome.design
    if isinstance(outcome, DesignFailure):
        return [design.label, design.m1, design.m2, design.m3,
                "", "", "", "", "", "", "", "", "", "", "failed", outcome.message]
    r: DesignReport = outcome
    return [design.label, design.m1, design.m2, design.m3,
            r.train_mean, r.train_std, r.valid_mean, r.valid_std,
            r.test_mean, r.test_std, r.dims_input, r.dims_post_fs,
            r.dims_post_dc, r.dimension_trace, "ok", ""]


_TABLE3_HEADER = ["design", "m1", "m2", "m3", "train_mean", "train_std",
                  "valid_mean", "valid_std", "test_mean", "test_std",
                  "dims_input", "dims_post_fs", "dims_post_dc",
                  "dimension_trace", "status", "message"]


def cmd_run(args) -> int:
    config = load_config(args.config, _overrides(args))
    designs = _parse_designs(config)
    rows = load_manifest(args.manifest)
    target = _target_dims(config, default=None)
    samples, _ = _load_samples(rows, target, skip_bad=False)
    dataset = Dataset(samples=tuple(samples))
    out_dir = _out_dir(args)

    outcomes = sweep_designs(dataset, config.k, config.b, config.seed,
                             designs=designs, workers=config.workers)

    _write_csv(out_dir / "table3.csv", _TABLE3_HEADER,
               [_report_row(o) for o in outcomes])
    payload = []
    for outcome in outcomes:
        if isinstance(outcome, DesignFailure):
            payload.append({"design": outcome.design.label, "status": "failed",
                            "message": outcome.message})
            continue
        payload.append({
            "design": outcome.design.label, "status": "ok",
            "train": {"mean": outcome.train_mean, "std": outcome.train_std},
            "valid": {"mean": outcome.valid_mean, "std": outcome.valid_std},
            "test": {"mean": outcome.test_mean, "std": outcome.test_std},
            "dims": {"input": outcome.dims_input, "post_fs": outcome.dims_post_fs,
                     "post_dc": outcome.dims_post_dc,
                     "trace": outcome.dimension_trace},
        })
    _write_json(out_dir / "table3.json", payload)

    for outcome in outcomes:
        if isinstance(outcome, DesignFailure):
            continue
        names = build_space(outcome.design).names
        for fold in outcome.folds:
            _write_csv(
                out_dir / f"trials_{outcome.design.file_stem}_fold{fold.fold}.csv",
                ["trial", *names, "objective"],
                [[t.index, *[t.params[n] for n in names], t.objective]
                 for t in fold.history],
            )

    rate_reports = [o for o in outcomes
                    if isinstance(o, DesignReport) and o.design.m1 == "FS"]
    _write_csv(out_dir / "selection_rates.csv",
               ["feature", *[r.design.label for r in rate_reports]],
               [[FEATURE_NAMES[f], *[selection_rates(r)[f] for r in rate_reports]]
                for f in range(len(FEATURE_NAMES))])

    n_failed = sum(isinstance(o, DesignFailure) for o in outcomes)
    print(f"wrote {out_dir / 'table3.csv'} "
          f"({len(outcomes)} designs, {n_failed} failed)")
    return EXIT_PARTIAL if n_failed else EXIT_OK


def cmd_synth(args) -> int:
    config = load_config(args.config, _overrides(args))
    width, height = _target_dims(config, default=(64, 64))
    out_dir = _out_dir(args)
    manifest = write_dataset(out_dir, config.per_class, width, height, config.seed)
    print(f"wrote {manifest} ({3 * config.per_class} images)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# plumbing


def _overrides(args) -> dict:
    keys = ("k", "b", "seed", "workers", "alpha", "designs", "width", "height",
            "per_class")
    return {key: getattr(args, key, None) for key in keys}


def _target_dims(config: RunConfig, default) -> Optional[tuple[int, int]]:
    if config.width is None and config.height is None:
        return default
    if config.width is None or config.height is None:
        raise UsageError("width and height must be given together")
    return config.width, config.height


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _read_features_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["path", "label"] \
                or tuple(header[2:]) != FEATURE_NAMES:
            raise DataError("not a features CSV (expected path,label,<39 features>)")
        labels, values = [], []
        for row in reader:
            labels.append(row[1])
            values.append([float(v) for v in row[2:]])
    if not values:
        raise DataError("features CSV has no rows")
    return np.array(values), np.array(labels)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="texdesign",
                     description="Texture-based image classification pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, manifest: bool = True):
        if manifest:
            p.add_argument("--manifest", required=True, help="dataset manifest CSV/JSON")
        p.add_argument("--config", help="config file (JSON or key=value lines)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--k", type=int, help="cross-validation folds")
        p.add_argument("--b", type=int, help="optimization iterations")
        p.add_argument("--designs", help="comma-free design labels, e.g. FS+DC+SVM-LK FS+DC+DT",
                       nargs="*")
        p.add_argument("--alpha", type=float, help="significance level")

    p_extract = sub.add_parser("extract", help="write the 39-feature CSV")
    common(p_extract)
    p_extract.set_defaults(func=cmd_extract)

    p_stats = sub.add_parser("stats", help="per-feature significance analysis")
    p_stats.add_argument("features", help="features CSV from extract")
    common(p_stats, manifest=False)
    p_stats.set_defaults(func=cmd_stats)

    p_run = sub.add_parser("run", help="nested cross-validation design sweep")
    common(p_run)
    p_run.add_argument("--width", type=int, help="target image width")
    p_run.add_argument("--height", type=int, help="target image height")
    p_run.set_defaults(func=cmd_run)

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset")
    common(p_synth, manifest=False)
    p_synth.add_argument("--per-class", type=int, dest="per_class")
    p_synth.add_argument("--width", type=int)
    p_synth.add_argument("--height", type=int)
    p_synth.set_defaults(func=cmd_synth)

    p_extract.add_argument("--width", type=int, help="target image width")
    p_extract.add_argument("--height", type=int, help="target image height")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
