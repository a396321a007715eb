"""Turn raw univariate series into labeled trend events.

Pipeline per chart: normalize both axes to [0, 1], stretch x by the 3:1
presentation aspect ratio, simplify the polyline at three error levels,
label each linear segment (and each adjacent segment pair) by KDE argmax,
attach superlative max/min window events, score visual saliency, and keep
the top share of labels per kind and level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from datetime import date, timedelta

import numpy as np

from .labelmodels import Kde1D, KdePeriodic2D, argmax_label, argmax_shape_label

DEFAULT_ASPECT = 3.0
DEFAULT_EPSILONS = (0.03, 0.1, 0.2)
DEFAULT_KEEP_FRACTION = 0.75
SUPERLATIVE_WINDOW_DAYS = 15

KIND_SLOPE = "slope"
KIND_COMPOUND = "compound"
KIND_SHAPE = "shape"
KIND_SUPERLATIVE = "superlative"


class SeriesError(ValueError):
    """Raised for malformed input series."""


@dataclass(frozen=True)
class TimeSeries:
    """Univariate series for one chart, dates strictly increasing."""

    chart_id: str
    dates: tuple[date, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.dates) != len(self.values):
            raise SeriesError("dates and values differ in length")
        if len(self.dates) < 2:
            raise SeriesError(f"chart {self.chart_id!r} needs at least 2 points")
        for a, b in zip(self.dates, self.dates[1:]):
            if a >= b:
                raise SeriesError(
                    f"chart {self.chart_id!r} dates not strictly increasing at {b}"
                )

    def extents(self) -> ChartExtents:
        return ChartExtents(
            x_min=self.dates[0],
            x_max=self.dates[-1],
            y_min=min(self.values),
            y_max=max(self.values),
        )


@dataclass(frozen=True)
class ChartExtents:
    """Full-chart axis ranges, in original data units."""

    x_min: date
    x_max: date
    y_min: float
    y_max: float


@dataclass(frozen=True)
class NormalizedSeries:
    """Series mapped to x in [0, aspect] and y in [0, 1].

    Positions correspond one-to-one with the source series, so segment
    indices are valid in both.  A constant-value series maps every y to 0.
    """

    source: TimeSeries
    aspect: float
    xs: np.ndarray
    ys: np.ndarray


@dataclass(frozen=True)
class LinearSegment:
    """One straight stretch between simplification keep-points."""

    start_idx: int
    end_idx: int
    start_date: date
    end_date: date
    perceived_angle: float
    epsilon_level: float


@dataclass(frozen=True)
class LabeledEvent:
    """A labeled time span of one chart; the searchable document."""

    chart_id: str
    start_date: date
    end_date: date
    label: str
    kind: str
    density: float
    saliency: float
    epsilon_level: float | None
    x_event_start: date
    x_event_end: date
    y_event_start: float
    y_event_end: float
    y_event_min: float
    y_event_max: float


def normalize(series: TimeSeries, aspect: float = DEFAULT_ASPECT) -> NormalizedSeries:
    """Map dates to [0, aspect] and values to [0, 1].

    Normalized values are quantized to 1e-9 so that affine rescaling of
    the raw values (absorbed exactly in real arithmetic) cannot flip a
    simplification or labeling decision through float rounding noise.
    """
    if aspect <= 0:
        raise SeriesError("aspect must be positive")
    t = np.array([d.toordinal() for d in series.dates], dtype=float)
    v = np.array(series.values, dtype=float)
    xs = aspect * (t - t[0]) / (t[-1] - t[0])
    v_span = v.max() - v.min()
    if v_span == 0.0:
        ys = np.zeros_like(v)
    else:
        ys = np.round((v - v.min()) / v_span, 9)
    return NormalizedSeries(source=series, aspect=aspect, xs=xs, ys=ys)


def _point_segment_distance(
    px: float, py: float, ax: float, ay: float, bx: float, by: float
) -> float:
    """Perpendicular distance from a point to the segment a-b."""
    dx, dy = bx - ax, by - ay
    seg_len2 = dx * dx + dy * dy
    if seg_len2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / seg_len2
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def simplify_indices(xs: np.ndarray, ys: np.ndarray, epsilon: float) -> list[int]:
    """Ramer-Douglas-Peucker keep-point indices.

    Guarantees every dropped point lies within ``epsilon`` of the segment
    that replaces it (distance measured to the segment, not the infinite
    line).
    """
    if epsilon <= 0:
        raise SeriesError("epsilon must be positive")
    n = len(xs)
    keep = [0, n - 1]
    stack = [(0, n - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        ax, ay, bx, by = xs[lo], ys[lo], xs[hi], ys[hi]
        worst_idx = -1
        worst_dist = 0.0
        for i in range(lo + 1, hi):
            d = _point_segment_distance(xs[i], ys[i], ax, ay, bx, by)
            if d > worst_dist:
                worst_idx, worst_dist = i, d
        if worst_dist > epsilon:
            keep.append(worst_idx)
            stack.append((lo, worst_idx))
            stack.append((worst_idx, hi))
    return sorted(set(keep))


def linearize(norm: NormalizedSeries, epsilon: float) -> list[LinearSegment]:
    """Consecutive linear segments after polyline simplification."""
    kept = simplify_indices(norm.xs, norm.ys, epsilon)
    dates = norm.source.dates
    segments = []
    for i, j in zip(kept, kept[1:]):
        segments.append(
            LinearSegment(
                start_idx=i,
                end_idx=j,
                start_date=dates[i],
                end_date=dates[j],
                perceived_angle=_angle_between_points(norm, i, j),
                epsilon_level=epsilon,
            )
        )
    return segments


def _angle_between_points(norm: NormalizedSeries, i: int, j: int) -> float:
    return math.degrees(math.atan2(norm.ys[j] - norm.ys[i], norm.xs[j] - norm.xs[i]))


def segment_angle(seg: LinearSegment, norm: NormalizedSeries) -> float:
    """Perceived slope angle of a segment in the aspect-scaled plane."""
    return _angle_between_points(norm, seg.start_idx, seg.end_idx)


def shape_params(
    seg_a: LinearSegment, seg_b: LinearSegment, norm: NormalizedSeries
) -> tuple[float, float]:
    """Interior angle and rotation of the two-segment shape a-b.

    The interior angle is measured at the shared vertex between the limb
    toward seg_a's start and the limb toward seg_b's end.  Rotation is the
    compass direction of the outward (apex-pointing) bisector, clockwise
    from straight up, so a symmetric peak reads 0 and a symmetric valley
    reads 180.
    """
    if seg_a.end_idx != seg_b.start_idx:
        raise SeriesError("segments must share a vertex")
    vx, vy = norm.xs[seg_a.end_idx], norm.ys[seg_a.end_idx]
    a1 = (norm.xs[seg_a.start_idx] - vx, norm.ys[seg_a.start_idx] - vy)
    a2 = (norm.xs[seg_b.end_idx] - vx, norm.ys[seg_b.end_idx] - vy)
    u1 = _unit(a1)
    u2 = _unit(a2)
    cos_angle = min(1.0, max(-1.0, u1[0] * u2[0] + u1[1] * u2[1]))
    interior = math.degrees(math.acos(cos_angle))
    bx, by = u1[0] + u2[0], u1[1] + u2[1]
    if math.hypot(bx, by) < 1e-12:
        # Degenerate straight continuation: use the upper-side normal of
        # the direction of travel.
        ox, oy = -u2[1], u2[0]
    else:
        ox, oy = -bx, -by
    rotation = math.degrees(math.atan2(ox, oy)) % 360.0
    return interior, rotation


def _unit(v: tuple[float, float]) -> tuple[float, float]:
    n = math.hypot(v[0], v[1])
    if n == 0.0:
        raise SeriesError("zero-length segment limb")
    return (v[0] / n, v[1] / n)


def saliency(event: LabeledEvent, extents: ChartExtents) -> float:
    """L2 norm of the event's fractional x and y spans within its chart.

    Slope and compound events use the start-to-end value change; shape and
    superlative events use the min-to-max value range over their span.  A
    zero-width chart axis contributes 0 for that component.
    """
    x_denom = (extents.x_max - extents.x_min).days
    if x_denom == 0:
        x_part = 0.0
    else:
        x_part = (event.x_event_end - event.x_event_start).days / x_denom
    y_denom = extents.y_max - extents.y_min
    if y_denom == 0:
        y_part = 0.0
    elif event.kind in (KIND_SHAPE, KIND_SUPERLATIVE):
        y_part = (event.y_event_max - event.y_event_min) / y_denom
    else:
        y_part = (event.y_event_end - event.y_event_start) / y_denom
    return math.hypot(x_part, y_part)


def _span_event(
    series: TimeSeries,
    start_idx: int,
    end_idx: int,
    label: str,
    kind: str,
    density: float,
    epsilon_level: float | None,
) -> LabeledEvent:
    window = series.values[start_idx : end_idx + 1]
    event = LabeledEvent(
        chart_id=series.chart_id,
        start_date=series.dates[start_idx],
        end_date=series.dates[end_idx],
        label=label,
        kind=kind,
        density=density,
        saliency=0.0,
        epsilon_level=epsilon_level,
        x_event_start=series.dates[start_idx],
        x_event_end=series.dates[end_idx],
        y_event_start=series.values[start_idx],
        y_event_end=series.values[end_idx],
        y_event_min=min(window),
        y_event_max=max(window),
    )
    return replace(event, saliency=saliency(event, series.extents()))


def superlative_events(
    series: TimeSeries, window_days: int = SUPERLATIVE_WINDOW_DAYS
) -> list[LabeledEvent]:
    """Fixed windows around the global maximum and minimum.

    Windows span ``window_days`` calendar days on each side of the extreme
    observation, clamped to the series range; value ties resolve to the
    earliest date.
    """
    values = np.array(series.values)
    events = []
    for label, idx in (("maximum", int(np.argmax(values))), ("minimum", int(np.argmin(values)))):
        center = series.dates[idx]
        start = max(series.dates[0], center - timedelta(days=window_days))
        end = min(series.dates[-1], center + timedelta(days=window_days))
        in_window = [
            (d, v) for d, v in zip(series.dates, series.values) if start <= d <= end
        ]
        window_values = [v for _, v in in_window]
        event = LabeledEvent(
            chart_id=series.chart_id,
            start_date=start,
            end_date=end,
            label=label,
            kind=KIND_SUPERLATIVE,
            density=0.0,
            saliency=0.0,
            epsilon_level=None,
            x_event_start=start,
            x_event_end=end,
            y_event_start=window_values[0],
            y_event_end=window_values[-1],
            y_event_min=min(window_values),
            y_event_max=max(window_values),
        )
        events.append(replace(event, saliency=saliency(event, series.extents())))
    return events


def label_series(
    series: TimeSeries,
    slope_models: dict[str, Kde1D],
    compound_models: dict[str, Kde1D],
    shape_models: dict[str, KdePeriodic2D],
    epsilons: tuple[float, ...] = DEFAULT_EPSILONS,
    aspect: float = DEFAULT_ASPECT,
) -> list[LabeledEvent]:
    """All candidate events for one chart, before corpus-level pruning."""
    norm = normalize(series, aspect)
    events: list[LabeledEvent] = []
    for eps in epsilons:
        segments = linearize(norm, eps)
        for seg in segments:
            angle = seg.perceived_angle
            if slope_models:
                label, density = argmax_label(slope_models, angle)
                events.append(
                    _span_event(series, seg.start_idx, seg.end_idx, label, KIND_SLOPE, density, eps)
                )
            if compound_models:
                label, density = argmax_label(compound_models, angle)
                events.append(
                    _span_event(
                        series, seg.start_idx, seg.end_idx, label, KIND_COMPOUND, density, eps
                    )
                )
        if shape_models:
            for seg_a, seg_b in zip(segments, segments[1:]):
                interior, rotation = shape_params(seg_a, seg_b, norm)
                label, density = argmax_shape_label(shape_models, interior, rotation)
                events.append(
                    _span_event(
                        series, seg_a.start_idx, seg_b.end_idx, label, KIND_SHAPE, density, eps
                    )
                )
    events.extend(superlative_events(series))
    return events


def prune_events(
    events: list[LabeledEvent], keep: float = DEFAULT_KEEP_FRACTION
) -> list[LabeledEvent]:
    """Keep the top ``ceil(keep * n)`` events by density per (kind, level).

    Superlative events are fixed landmarks and are never pruned.
    """
    if not 0.0 < keep <= 1.0:
        raise SeriesError("keep fraction must be in (0, 1]")
    groups: dict[tuple[str, float | None], list[LabeledEvent]] = {}
    kept: list[LabeledEvent] = []
    for e in events:
        if e.kind == KIND_SUPERLATIVE:
            kept.append(e)
        else:
            groups.setdefault((e.kind, e.epsilon_level), []).append(e)
    for group in groups.values():
        group.sort(
            key=lambda e: (-e.density, e.chart_id, e.start_date, e.end_date, e.label)
        )
        kept.extend(group[: math.ceil(keep * len(group))])
    kept.sort(
        key=lambda e: (
            e.chart_id,
            e.kind,
            e.epsilon_level if e.epsilon_level is not None else -1.0,
            e.start_date,
            e.end_date,
            e.label,
        )
    )
    return kept


def label_corpus(
    charts: list[TimeSeries],
    slope_models: dict[str, Kde1D],
    compound_models: dict[str, Kde1D],
    shape_models: dict[str, KdePeriodic2D],
    epsilons: tuple[float, ...] = DEFAULT_EPSILONS,
    aspect: float = DEFAULT_ASPECT,
    keep: float = DEFAULT_KEEP_FRACTION,
) -> list[LabeledEvent]:
    """Label every chart, then prune per kind and level across the corpus."""
    events: list[LabeledEvent] = []
    for series in charts:
        events.extend(
            label_series(series, slope_models, compound_models, shape_models, epsilons, aspect)
        )
    return prune_events(events, keep)


def label_chart(
    series: TimeSeries,
    slope_models: dict[str, Kde1D],
    compound_models: dict[str, Kde1D],
    shape_models: dict[str, KdePeriodic2D],
    epsilons: tuple[float, ...] = DEFAULT_EPSILONS,
    aspect: float = DEFAULT_ASPECT,
    keep: float = DEFAULT_KEEP_FRACTION,
) -> list[LabeledEvent]:
    """Label a single chart (a corpus of one)."""
    return label_corpus([series], slope_models, compound_models, shape_models, epsilons, aspect, keep)
