"""Gaussian KDE models mapping slope angles and two-segment shapes to trend labels.

Three model families are fitted from crowdsourced annotation rows:

* 1D angle models, one per label (or per modifier+label phrase), over
  slope angles in degrees.
* modifier scalar models, one per modifier adverb, over the dimensionless
  ratio ``angle / anchor_angle``.
* 2D shape models over (interior angle, rotation) pairs, periodic in the
  rotation axis.

All kernels are Gaussian with a fixed bandwidth interpreted as the standard
deviation, and every model is normalized over its own sample count so that
its density integrates to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_ANGLE_BANDWIDTH = 5.0
DEFAULT_SCALAR_BANDWIDTH = 0.1
DEFAULT_SHAPE_BANDWIDTH = 15.0

# Modifiers that soften a slope vs. those that exaggerate it; used by the
# sample-cleaning rules.
SOFTENING_MODIFIERS = frozenset({"slowly", "gradually"})
INTENSIFYING_MODIFIERS = frozenset({"quickly", "sharply"})

MODE_GRID_STEP = 0.1      # degrees, argmax grid for angle models
SCALAR_GRID_STEP = 0.001  # ratio units, argmax grid for modifier models


class LabelDataError(ValueError):
    """Raised for annotation rows or model inputs that violate the schema."""


@dataclass(frozen=True)
class LabelSample:
    """One crowdsourced slope annotation.

    ``modifier`` and ``anchor_angle`` are set together: plain slope rows
    carry neither, modifier rows carry both.
    """

    label: str
    angle: float
    participant: str = ""
    modifier: str | None = None
    anchor_angle: float | None = None

    def __post_init__(self) -> None:
        if not self.label:
            raise LabelDataError("label must be non-empty")
        if not -90.0 <= self.angle <= 90.0:
            raise LabelDataError(f"angle {self.angle} outside [-90, 90]")
        if (self.modifier is None) != (self.anchor_angle is None):
            raise LabelDataError("modifier and anchor_angle must be set together")

    @property
    def phrase(self) -> str:
        """Full label text; modifier rows yield e.g. ``"slowly falling"``."""
        if self.modifier:
            return f"{self.modifier} {self.label}"
        return self.label


@dataclass(frozen=True)
class ShapeSample:
    """One crowdsourced two-segment shape annotation."""

    label: str
    shape_angle: float
    rotation: float
    participant: str = ""

    def __post_init__(self) -> None:
        if not self.label:
            raise LabelDataError("label must be non-empty")
        if not 0.0 <= self.shape_angle <= 180.0:
            raise LabelDataError(f"shape angle {self.shape_angle} outside [0, 180]")
        if not 0.0 <= self.rotation < 360.0:
            raise LabelDataError(f"rotation {self.rotation} outside [0, 360)")


@dataclass
class Kde1D:
    """Gaussian kernel density over slope angles for one label."""

    label: str
    sample_points: np.ndarray
    bandwidth: float = DEFAULT_ANGLE_BANDWIDTH

    def __post_init__(self) -> None:
        self.sample_points = np.asarray(self.sample_points, dtype=float)
        if self.sample_points.size == 0:
            raise LabelDataError(f"no sample points for label {self.label!r}")
        if self.bandwidth <= 0:
            raise LabelDataError("bandwidth must be positive")

    def density(self, angle) -> np.ndarray | float:
        """Probability density at ``angle`` (scalar or array), in 1/degrees."""
        x = np.asarray(angle, dtype=float)
        z = (x[..., None] - self.sample_points) / self.bandwidth
        norm = self.sample_points.size * self.bandwidth * math.sqrt(2.0 * math.pi)
        dens = np.exp(-0.5 * z * z).sum(axis=-1) / norm
        if np.isscalar(angle) or np.ndim(angle) == 0:
            return float(dens)
        return dens

    def mode(self) -> float:
        """Peak-density angle on a fixed 0.1-degree grid over [-90, 90]."""
        grid = np.linspace(-90.0, 90.0, 1801)
        return float(grid[int(np.argmax(self.density(grid)))])


@dataclass
class ModifierScalarModel:
    """Gaussian KDE over the slope-scaling ratios of one modifier adverb."""

    modifier: str
    scalar_samples: np.ndarray
    bandwidth: float = DEFAULT_SCALAR_BANDWIDTH
    peak_scalar: float = field(init=False)

    def __post_init__(self) -> None:
        self.scalar_samples = np.asarray(self.scalar_samples, dtype=float)
        if self.scalar_samples.size == 0:
            raise LabelDataError(f"no retained ratios for modifier {self.modifier!r}")
        if self.bandwidth <= 0:
            raise LabelDataError("bandwidth must be positive")
        self.peak_scalar = self._peak()

    def density(self, ratio) -> np.ndarray | float:
        x = np.asarray(ratio, dtype=float)
        z = (x[..., None] - self.scalar_samples) / self.bandwidth
        norm = self.scalar_samples.size * self.bandwidth * math.sqrt(2.0 * math.pi)
        dens = np.exp(-0.5 * z * z).sum(axis=-1) / norm
        if np.isscalar(ratio) or np.ndim(ratio) == 0:
            return float(dens)
        return dens

    def _peak(self) -> float:
        grid = np.linspace(0.0, 4.0, 4001)
        return float(grid[int(np.argmax(self.density(grid)))])


@dataclass
class KdePeriodic2D:
    """Gaussian KDE over (shape angle, rotation), periodic in rotation.

    Rotation wraps at the 0/360 seam: each sample also contributes through
    images shifted by +-360 degrees, which carry essentially the whole
    kernel mass of any sample within ``wrap_overlap`` (three bandwidths) of
    the seam.  The shape-angle axis is not wrapped.
    """

    label: str
    sample_points: np.ndarray  # shape (n, 2): (shape_angle, rotation)
    bandwidth: float = DEFAULT_SHAPE_BANDWIDTH

    def __post_init__(self) -> None:
        self.sample_points = np.asarray(self.sample_points, dtype=float)
        if self.sample_points.ndim != 2 or self.sample_points.shape[1] != 2:
            raise LabelDataError("sample_points must be (n, 2)")
        if self.sample_points.size == 0:
            raise LabelDataError(f"no sample points for label {self.label!r}")
        if self.bandwidth <= 0:
            raise LabelDataError("bandwidth must be positive")

    @property
    def wrap_overlap(self) -> float:
        return 3.0 * self.bandwidth

    def density(self, shape_angle: float, rotation: float) -> float:
        """Density at one (shape_angle, rotation) point, in 1/degrees^2."""
        if not 0.0 <= shape_angle <= 180.0:
            raise LabelDataError(f"shape angle {shape_angle} outside [0, 180]")
        if not 0.0 <= rotation < 360.0:
            raise LabelDataError(f"rotation {rotation} outside [0, 360)")
        h2 = self.bandwidth * self.bandwidth
        da = shape_angle - self.sample_points[:, 0]
        dr = rotation - self.sample_points[:, 1]
        # Sum the kernel over the rotation value and both wrapped images.
        rot_part = (
            np.exp(-0.5 * dr * dr / h2)
            + np.exp(-0.5 * (dr - 360.0) ** 2 / h2)
            + np.exp(-0.5 * (dr + 360.0) ** 2 / h2)
        )
        ang_part = np.exp(-0.5 * da * da / h2)
        norm = self.sample_points.shape[0] * 2.0 * math.pi * h2
        return float((ang_part * rot_part).sum() / norm)


@dataclass(frozen=True)
class LabelStats:
    """Distribution summary for one angle label.

    The distributions are generally not normal, so the mode can fall
    outside the interquartile range.
    """

    label: str
    mode: float
    median: float
    iqr_low: float
    iqr_high: float

    @property
    def iqr_width(self) -> float:
        return self.iqr_high - self.iqr_low


def fit_slope_kdes(
    samples: list[LabelSample],
    bandwidth: float = DEFAULT_ANGLE_BANDWIDTH,
) -> dict[str, Kde1D]:
    """Fit one angle KDE per distinct label phrase.

    Rows with a modifier are keyed by the full phrase ("slowly falling"),
    so modifier phrases get their own models alongside the plain labels.
    Each model is normalized over its own sample count.
    """
    if not samples:
        raise LabelDataError("no samples to fit")
    if bandwidth <= 0:
        raise LabelDataError("bandwidth must be positive")
    by_phrase: dict[str, list[float]] = {}
    for s in samples:
        by_phrase.setdefault(s.phrase, []).append(s.angle)
    return {
        phrase: Kde1D(phrase, np.array(angles), bandwidth)
        for phrase, angles in sorted(by_phrase.items())
    }


def argmax_label(models: dict[str, Kde1D], angle: float) -> tuple[str, float]:
    """Label whose density is highest at ``angle``; ties break lexicographically."""
    if not models:
        raise LabelDataError("no models")
    best_label = None
    best_density = -1.0
    for label in sorted(models):
        d = models[label].density(angle)
        if d > best_density:
            best_label, best_density = label, d
    return best_label, best_density


def clean_modifier_samples(
    samples: list[LabelSample],
) -> tuple[list[LabelSample], float]:
    """Drop modifier rows whose anchor ratio contradicts the modifier.

    A row's ratio is ``angle / anchor_angle``.  Softening modifiers
    ("slowly", "gradually") must not have ratios above 1.0 and
    intensifying ones ("quickly", "sharply") must not fall below 1.0;
    rows with a zero anchor are dropped outright since the ratio is
    undefined.  Returns the retained rows and the retained fraction.
    """
    retained: list[LabelSample] = []
    for s in samples:
        if s.modifier is None or s.anchor_angle is None:
            raise LabelDataError("clean_modifier_samples expects modifier rows")
        if s.anchor_angle == 0.0:
            continue
        ratio = s.angle / s.anchor_angle
        if s.modifier in SOFTENING_MODIFIERS and ratio > 1.0:
            continue
        if s.modifier in INTENSIFYING_MODIFIERS and ratio < 1.0:
            continue
        retained.append(s)
    fraction = len(retained) / len(samples) if samples else 0.0
    return retained, fraction


def fit_modifier_scalars(
    retained: list[LabelSample],
    bandwidth: float = DEFAULT_SCALAR_BANDWIDTH,
) -> dict[str, ModifierScalarModel]:
    """Fit a scalar-ratio KDE per modifier from cleaned rows."""
    by_modifier: dict[str, list[float]] = {}
    for s in retained:
        if s.modifier is None or not s.anchor_angle:
            raise LabelDataError("fit_modifier_scalars expects cleaned modifier rows")
        by_modifier.setdefault(s.modifier, []).append(s.angle / s.anchor_angle)
    return {
        modifier: ModifierScalarModel(modifier, np.array(ratios), bandwidth)
        for modifier, ratios in sorted(by_modifier.items())
    }


def fit_shape_kdes(
    samples: list[ShapeSample],
    bandwidth: float = DEFAULT_SHAPE_BANDWIDTH,
) -> dict[str, KdePeriodic2D]:
    """Fit one periodic 2D KDE per shape label."""
    if not samples:
        raise LabelDataError("no samples to fit")
    by_label: dict[str, list[tuple[float, float]]] = {}
    for s in samples:
        by_label.setdefault(s.label, []).append((s.shape_angle, s.rotation))
    return {
        label: KdePeriodic2D(label, np.array(points), bandwidth)
        for label, points in sorted(by_label.items())
    }


def argmax_shape_label(
    models: dict[str, KdePeriodic2D], shape_angle: float, rotation: float
) -> tuple[str, float]:
    """Shape label with the highest density at (shape_angle, rotation)."""
    if not models:
        raise LabelDataError("no models")
    best_label = None
    best_density = -1.0
    for label in sorted(models):
        d = models[label].density(shape_angle, rotation)
        if d > best_density:
            best_label, best_density = label, d
    return best_label, best_density


def label_stats(model: Kde1D) -> LabelStats:
    """Mode from the density grid; median and IQR from the raw samples."""
    q25, q50, q75 = np.percentile(model.sample_points, [25.0, 50.0, 75.0])
    return LabelStats(
        label=model.label,
        mode=model.mode(),
        median=float(q50),
        iqr_low=float(q25),
        iqr_high=float(q75),
    )
