"""Ingestion, persistence, and configuration.

File formats:

* series CSV: ``date,ticker,value`` rows, one observation each.
* annotation CSVs: ``label,modifier,angle_deg,anchor_angle_deg,participant_id``
  for slope/modifier rows and ``label,shape_angle_deg,rotation_deg,participant_id``
  for shape rows.
* fitted models: one JSON document holding every model's sample points,
  bandwidths, and a content fingerprint.
* labeled events: JSON lines behind a header line carrying the schema
  version and the fingerprints of the models that produced them.

Writes go to a temp file and are renamed into place, so readers only
ever see complete files.  Event files contain no timestamps: the same
inputs and config produce byte-identical output.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import json
import os
from dataclasses import dataclass, field, fields
from datetime import date
from pathlib import Path

import numpy as np

from .labelmodels import (
    DEFAULT_ANGLE_BANDWIDTH,
    DEFAULT_SCALAR_BANDWIDTH,
    DEFAULT_SHAPE_BANDWIDTH,
    Kde1D,
    KdePeriodic2D,
    LabelDataError,
    LabelSample,
    ModifierScalarModel,
    ShapeSample,
    clean_modifier_samples,
    fit_modifier_scalars,
    fit_shape_kdes,
    fit_slope_kdes,
)
from .labeling import (
    DEFAULT_ASPECT,
    DEFAULT_EPSILONS,
    DEFAULT_KEEP_FRACTION,
    LabeledEvent,
    TimeSeries,
)

EVENTS_SCHEMA_VERSION = 1
MODELS_SCHEMA_VERSION = 1


class DatastoreError(ValueError):
    """Raised for malformed input files or incompatible persisted data."""


@dataclass
class Config:
    """Pipeline knobs, overridable from an INI file and CLI flags."""

    aspect: float = DEFAULT_ASPECT
    epsilons: tuple[float, ...] = DEFAULT_EPSILONS
    keep_fraction: float = DEFAULT_KEEP_FRACTION
    angle_bandwidth: float = DEFAULT_ANGLE_BANDWIDTH
    scalar_bandwidth: float = DEFAULT_SCALAR_BANDWIDTH
    shape_bandwidth: float = DEFAULT_SHAPE_BANDWIDTH
    max_gap_days: int = 14
    fuzzy_threshold: float = 0.5
    retrieval_cap: int = 1000
    superlative_window_days: int = 15
    flat_threshold_degrees: float = 10.0
    partial_overlap_fraction: float = 0.5


def load_config(path: str | Path | None) -> Config:
    """Read a ``[trendsearch]`` INI section; missing file means defaults."""
    cfg = Config()
    if path is None:
        return cfg
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise DatastoreError(f"config file not found: {path}")
    if not parser.has_section("trendsearch"):
        return cfg
    section = parser["trendsearch"]
    for f in fields(Config):
        if f.name not in section:
            continue
        raw = section[f.name]
        if f.name == "epsilons":
            cfg.epsilons = tuple(float(x) for x in raw.split(","))
        elif f.type == "int":
            setattr(cfg, f.name, int(raw))
        else:
            setattr(cfg, f.name, float(raw))
    return cfg


# -- series ---------------------------------------------------------------


def load_series_csv(path: str | Path) -> dict[str, TimeSeries]:
    """Per-ticker series from a ``date,ticker,value`` CSV.

    Rows may arrive in any order; each series is sorted by date.  A
    duplicate (ticker, date) pair or a malformed row fails the load with
    its line number.
    """
    rows: dict[str, dict[date, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DatastoreError(f"{path}: empty file")
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise DatastoreError(f"{path}:{line_no}: expected 3 columns, got {len(row)}")
            raw_date, ticker, raw_value = (c.strip() for c in row)
            try:
                observed = date.fromisoformat(raw_date)
                value = float(raw_value)
            except ValueError as exc:
                raise DatastoreError(f"{path}:{line_no}: {exc}") from None
            if not ticker:
                raise DatastoreError(f"{path}:{line_no}: empty ticker")
            series = rows.setdefault(ticker, {})
            if observed in series:
                raise DatastoreError(
                    f"{path}:{line_no}: duplicate observation for ({ticker}, {observed})"
                )
            series[observed] = value
    if not rows:
        raise DatastoreError(f"{path}: no data rows")
    out = {}
    for ticker, series in rows.items():
        ordered = sorted(series.items())
        out[ticker] = TimeSeries(
            chart_id=ticker,
            dates=tuple(d for d, _ in ordered),
            values=tuple(v for _, v in ordered),
        )
    return out


def load_metadata(path: str | Path) -> dict[str, dict]:
    """Chart metadata: ``{ticker: {"name": ..., "aliases": [...]}}``."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(payload, dict):
        raise DatastoreError(f"{path}: metadata must be a JSON object")
    return payload


def alias_map(metadata: dict[str, dict], charts: dict[str, TimeSeries]) -> dict[str, str]:
    """Lowercased alias -> chart id, including tickers themselves."""
    out = {chart_id.lower(): chart_id for chart_id in charts}
    for chart_id, meta in metadata.items():
        for alias in [meta.get("name", "")] + list(meta.get("aliases", [])):
            if alias:
                out[alias.lower()] = chart_id
    return out


# -- annotation CSVs ------------------------------------------------------


def load_label_csv(path: str | Path) -> tuple[list[LabelSample], list[str]]:
    """Slope/modifier annotation rows; invalid rows become diagnostics."""
    samples: list[LabelSample] = []
    diagnostics: list[str] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"label", "modifier", "angle_deg", "anchor_angle_deg", "participant_id"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise DatastoreError(f"{path}: expected header {sorted(required)}")
        for line_no, row in enumerate(reader, start=2):
            try:
                modifier = (row["modifier"] or "").strip() or None
                anchor_raw = (row["anchor_angle_deg"] or "").strip()
                samples.append(
                    LabelSample(
                        label=(row["label"] or "").strip(),
                        angle=float(row["angle_deg"]),
                        participant=(row["participant_id"] or "").strip(),
                        modifier=modifier,
                        anchor_angle=float(anchor_raw) if anchor_raw else None,
                    )
                )
            except (LabelDataError, ValueError, TypeError) as exc:
                diagnostics.append(f"{path}:{line_no}: rejected: {exc}")
    return samples, diagnostics


def load_shape_csv(path: str | Path) -> tuple[list[ShapeSample], list[str]]:
    """Two-segment shape annotation rows; invalid rows become diagnostics."""
    samples: list[ShapeSample] = []
    diagnostics: list[str] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"label", "shape_angle_deg", "rotation_deg", "participant_id"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise DatastoreError(f"{path}: expected header {sorted(required)}")
        for line_no, row in enumerate(reader, start=2):
            try:
                samples.append(
                    ShapeSample(
                        label=(row["label"] or "").strip(),
                        shape_angle=float(row["shape_angle_deg"]),
                        rotation=float(row["rotation_deg"]),
                        participant=(row["participant_id"] or "").strip(),
                    )
                )
            except (LabelDataError, ValueError, TypeError) as exc:
                diagnostics.append(f"{path}:{line_no}: rejected: {exc}")
    return samples, diagnostics


# -- fitted models --------------------------------------------------------


@dataclass
class ModelBundle:
    """Every fitted model plus bookkeeping from the fitting run."""

    slope: dict[str, Kde1D]
    compound: dict[str, Kde1D]
    shape: dict[str, KdePeriodic2D]
    modifier_scalars: dict[str, ModifierScalarModel]
    cleaning_retention: float
    diagnostics: list[str] = field(default_factory=list)

    def fingerprint(self) -> str:
        return hashlib.sha256(
            json.dumps(self._payload(), sort_keys=True, separators=(",", ":")).encode()
        ).hexdigest()[:16]

    def _payload(self) -> dict:
        return {
            "version": MODELS_SCHEMA_VERSION,
            "slope": {
                k: {"points": list(m.sample_points), "bandwidth": m.bandwidth}
                for k, m in sorted(self.slope.items())
            },
            "compound": {
                k: {"points": list(m.sample_points), "bandwidth": m.bandwidth}
                for k, m in sorted(self.compound.items())
            },
            "shape": {
                k: {
                    "points": [list(p) for p in m.sample_points],
                    "bandwidth": m.bandwidth,
                }
                for k, m in sorted(self.shape.items())
            },
            "modifier_scalars": {
                k: {"ratios": list(m.scalar_samples), "bandwidth": m.bandwidth}
                for k, m in sorted(self.modifier_scalars.items())
            },
            "cleaning_retention": self.cleaning_retention,
        }

    def save(self, path: str | Path) -> None:
        payload = self._payload()
        payload["fingerprint"] = self.fingerprint()
        _atomic_write(path, json.dumps(payload, sort_keys=True, indent=1))

    @classmethod
    def load(cls, path: str | Path) -> "ModelBundle":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("version") != MODELS_SCHEMA_VERSION:
            raise DatastoreError(
                f"{path}: models schema version {payload.get('version')} unsupported; re-run fitting"
            )
        return cls(
            slope={
                k: Kde1D(k, np.array(v["points"]), v["bandwidth"])
                for k, v in payload["slope"].items()
            },
            compound={
                k: Kde1D(k, np.array(v["points"]), v["bandwidth"])
                for k, v in payload["compound"].items()
            },
            shape={
                k: KdePeriodic2D(k, np.array(v["points"]), v["bandwidth"])
                for k, v in payload["shape"].items()
            },
            modifier_scalars={
                k: ModifierScalarModel(k, np.array(v["ratios"]), v["bandwidth"])
                for k, v in payload["modifier_scalars"].items()
            },
            cleaning_retention=payload["cleaning_retention"],
        )

    def vocabulary_words(self) -> set[str]:
        words: set[str] = {"maximum", "minimum"}
        for key in (*self.slope, *self.compound, *self.shape):
            words.update(key.lower().split())
        return words

    def label_kinds(self) -> dict[str, str]:
        kinds = {k: "slope" for k in self.slope}
        kinds.update({k: "compound" for k in self.compound})
        kinds.update({k: "shape" for k in self.shape})
        kinds.update({"maximum": "superlative", "minimum": "superlative"})
        return kinds


def fit_models(
    label_samples: list[LabelSample],
    shape_samples: list[ShapeSample],
    config: Config | None = None,
) -> ModelBundle:
    """Fit slope, compound, shape, and modifier-scalar models.

    Plain rows (no modifier) feed the slope models.  Modifier rows are
    cleaned first; the survivors feed both the compound-phrase models and
    the per-modifier scalar models.
    """
    cfg = config or Config()
    plain = [s for s in label_samples if s.modifier is None]
    modified = [s for s in label_samples if s.modifier is not None]
    slope = fit_slope_kdes(plain, cfg.angle_bandwidth) if plain else {}
    compound: dict[str, Kde1D] = {}
    scalars: dict[str, ModifierScalarModel] = {}
    retention = 1.0
    if modified:
        retained, retention = clean_modifier_samples(modified)
        if retained:
            compound = fit_slope_kdes(retained, cfg.angle_bandwidth)
            scalars = fit_modifier_scalars(retained, cfg.scalar_bandwidth)
    shape = fit_shape_kdes(shape_samples, cfg.shape_bandwidth) if shape_samples else {}
    return ModelBundle(
        slope=slope,
        compound=compound,
        shape=shape,
        modifier_scalars=scalars,
        cleaning_retention=retention,
    )


# -- labeled events -------------------------------------------------------


def event_to_dict(event: LabeledEvent) -> dict:
    return {
        "chart_id": event.chart_id,
        "start_date": event.start_date.isoformat(),
        "end_date": event.end_date.isoformat(),
        "label": event.label,
        "kind": event.kind,
        "density": event.density,
        "saliency": event.saliency,
        "epsilon_level": event.epsilon_level,
        "x_event_start": event.x_event_start.isoformat(),
        "x_event_end": event.x_event_end.isoformat(),
        "y_event_start": event.y_event_start,
        "y_event_end": event.y_event_end,
        "y_event_min": event.y_event_min,
        "y_event_max": event.y_event_max,
    }


def event_from_dict(payload: dict) -> LabeledEvent:
    return LabeledEvent(
        chart_id=payload["chart_id"],
        start_date=date.fromisoformat(payload["start_date"]),
        end_date=date.fromisoformat(payload["end_date"]),
        label=payload["label"],
        kind=payload["kind"],
        density=payload["density"],
        saliency=payload["saliency"],
        epsilon_level=payload["epsilon_level"],
        x_event_start=date.fromisoformat(payload["x_event_start"]),
        x_event_end=date.fromisoformat(payload["x_event_end"]),
        y_event_start=payload["y_event_start"],
        y_event_end=payload["y_event_end"],
        y_event_min=payload["y_event_min"],
        y_event_max=payload["y_event_max"],
    )


def persist_events(
    events: list[LabeledEvent],
    path: str | Path,
    model_fingerprint: str | None = None,
) -> None:
    """Write the header line plus one JSON line per event, atomically."""
    header = {
        "format": "trendsearch-events",
        "schema_version": EVENTS_SCHEMA_VERSION,
        "model_fingerprint": model_fingerprint,
        "event_count": len(events),
    }
    lines = [json.dumps(header, sort_keys=True, separators=(",", ":"))]
    lines.extend(
        json.dumps(event_to_dict(e), sort_keys=True, separators=(",", ":"))
        for e in events
    )
    _atomic_write(path, "\n".join(lines) + "\n")


def load_events(path: str | Path) -> tuple[list[LabeledEvent], dict]:
    """Read events and the file header; wrong versions fail loudly."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise DatastoreError(f"{path}: empty events file")
    header = json.loads(lines[0])
    if header.get("format") != "trendsearch-events":
        raise DatastoreError(f"{path}: not an events file")
    if header.get("schema_version") != EVENTS_SCHEMA_VERSION:
        raise DatastoreError(
            f"{path}: events schema version {header.get('schema_version')} unsupported; "
            "re-run labeling to regenerate this file"
        )
    events = [event_from_dict(json.loads(line)) for line in lines[1:]]
    return events, header


def _atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


@dataclass
class Corpus:
    """Everything the search surfaces need, loaded once."""

    charts: dict[str, TimeSeries]
    metadata: dict[str, dict]
    events: list[LabeledEvent]
    model_fingerprint: str | None = None
