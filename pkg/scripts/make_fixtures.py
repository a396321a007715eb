#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixtures deterministically.

Outputs (under fixtures/):
  slope_labels.csv  - plain + modifier annotation rows
  shape_labels.csv  - two-segment shape annotation rows
  stocks.csv        - weekly price series for a handful of tickers
  metadata.json     - ticker names and aliases

The numbers are engineered, not sampled from the published experiments:
label clusters are well separated so argmax labeling is stable across
nearby bandwidths, "rising" spans a wider angle range than "climbing",
and the modifier rows contain exactly ten rule-violating rows so the
cleaning retention is 240/250.
"""

from __future__ import annotations

import csv
import json
from datetime import date, timedelta
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "fixtures"

# label: (center deg, half spread deg, rows)
SLOPE_LABELS = {
    "tanking": (-80.0, 6.0, 30),
    "plunging": (-65.0, 7.0, 30),
    "falling": (-45.0, 10.0, 40),
    "dropping": (-30.0, 8.0, 30),
    "fading": (-16.0, 6.0, 25),
    "flatline": (0.0, 3.0, 30),
    "stable": (0.0, 9.0, 25),
    "growing": (16.0, 6.0, 25),
    "climbing": (32.0, 6.0, 30),
    "rising": (33.0, 14.0, 40),
    "soaring": (60.0, 8.0, 35),
    "booming": (80.0, 6.0, 30),
}

# modifier: (ratio center, ratio half spread)
MODIFIERS = {
    "slowly": (0.4, 0.15),
    "gradually": (0.6, 0.15),
    "quickly": (1.3, 0.18),
    "sharply": (1.5, 0.2),
}
SOFTENED_ANCHORS = ["falling", "climbing", "soaring", "tanking", "dropping"]
INTENSIFIED_ANCHORS = ["falling", "dropping", "climbing"]
ROWS_PER_PAIR = 15

# label: (shape angle center, rotation center, angle spread, rotation spread, rows)
SHAPE_LABELS = {
    "peak": (70.0, 0.0, 18.0, 20.0, 20),
    "valley": (70.0, 180.0, 18.0, 20.0, 20),
    "spike": (25.0, 0.0, 10.0, 12.0, 20),
    "dip": (25.0, 180.0, 10.0, 12.0, 20),
    "hump": (125.0, 0.0, 14.0, 15.0, 20),
    "lull": (125.0, 180.0, 14.0, 15.0, 20),
    "cliff": (105.0, 35.0, 14.0, 14.0, 20),
    "ramp": (120.0, 330.0, 14.0, 14.0, 20),
    "rebound": (45.0, 160.0, 10.0, 12.0, 20),
}


def make_slope_rows(rng) -> list[list[str]]:
    rows = []
    participant = 0
    for label, (center, spread, n) in SLOPE_LABELS.items():
        # Stratified angles: even coverage keeps each label's density
        # smooth, so argmax boundaries stay put across nearby bandwidths.
        positions = np.linspace(-1.0, 1.0, n)
        jitter = rng.uniform(-0.3, 0.3, n)
        for pos, jit in zip(positions, jitter):
            angle = float(np.clip(center + spread * pos + jit, -89.5, 89.5))
            rows.append([label, "", f"{angle:.1f}", "", f"p{participant % 40:03d}"])
            participant += 1

    def modifier_rows(anchors: list[str], modifiers: list[str]) -> None:
        nonlocal participant
        for label in anchors:
            center, spread, _ = SLOPE_LABELS[label]
            for modifier in modifiers:
                m_center, m_spread = MODIFIERS[modifier]
                for _ in range(ROWS_PER_PAIR):
                    anchor = center + spread * (2.0 * rng.random() - 1.0)
                    anchor = float(np.clip(anchor, -85.0, 85.0))
                    ratio = m_center + m_spread * (2.0 * rng.random() - 1.0)
                    if modifier in ("slowly", "gradually"):
                        ratio = min(ratio, 0.99)
                    else:
                        ratio = max(ratio, 1.01)
                        ratio = min(ratio, 88.0 / abs(anchor))
                    angle = float(np.clip(anchor * ratio, -89.5, 89.5))
                    rows.append(
                        [label, modifier, f"{angle:.1f}", f"{anchor:.1f}", f"p{participant % 40:03d}"]
                    )
                    participant += 1

    modifier_rows(SOFTENED_ANCHORS, ["slowly", "gradually"])
    modifier_rows(INTENSIFIED_ANCHORS, ["quickly", "sharply"])

    # Exactly ten rule-violating rows: six softening ratios above 1.0 and
    # four zero anchors; cleaning must drop all of them (240/250 retained).
    for i in range(6):
        anchor = -40.0 - i
        rows.append(["falling", "slowly", f"{anchor * 1.2:.1f}", f"{anchor:.1f}", f"v{i:03d}"])
    for i in range(4):
        rows.append(["climbing", "sharply", f"{10.0 + i:.1f}", "0.0", f"v{6 + i:03d}"])
    return rows


def make_shape_rows(rng) -> list[list[str]]:
    rows = []
    participant = 0
    for label, (a_center, r_center, a_spread, r_spread, n) in SHAPE_LABELS.items():
        for _ in range(n):
            angle = a_center + a_spread * (2.0 * rng.random() - 1.0)
            angle = float(np.clip(angle, 0.0, 180.0))
            rotation = (r_center + r_spread * (2.0 * rng.random() - 1.0)) % 360.0
            rows.append([label, f"{angle:.1f}", f"{rotation:.1f}", f"s{participant % 24:03d}"])
            participant += 1
    return rows


# Piecewise-linear series anchors: (fraction of range, relative level).
SERIES_SHAPES = {
    # Rise through 2015, then a hard fall in autumn 2016 (searchable as
    # "tanking before november 2016" for the alias golden query).
    "ALK": [(0.00, 40), (0.30, 55), (0.55, 70), (0.78, 72), (0.86, 38), (1.00, 42)],
    # Up, down, up: sequence-query material with steep climbs.
    "FSLR": [(0.00, 45), (0.18, 85), (0.45, 42), (0.62, 44), (0.82, 88), (1.00, 90)],
    # Global max mid-2015, cliff near the end.
    "AMGN": [(0.00, 110), (0.35, 135), (0.50, 165), (0.70, 150), (0.92, 152), (1.00, 118)],
    # Long slow declines.
    "HP": [(0.00, 95), (0.40, 88), (0.70, 80), (1.00, 70)],
    # Short steep drops between recoveries.
    "ALXN": [(0.00, 120), (0.15, 118), (0.22, 90), (0.45, 100), (0.55, 72), (0.80, 80), (1.00, 78)],
    # Gradual climb into a hump.
    "ILMN": [(0.00, 130), (0.45, 170), (0.62, 195), (0.80, 172), (1.00, 168)],
    # A broad valley through 2015.
    "TECH": [(0.00, 85), (0.30, 60), (0.55, 48), (0.80, 68), (1.00, 82)],
}

METADATA = {
    "ALK": {"name": "Alaska Airlines", "aliases": ["alaska air group", "alaska"]},
    "FSLR": {"name": "First Solar", "aliases": []},
    "AMGN": {"name": "Amgen", "aliases": []},
    "HP": {"name": "Helmerich and Payne", "aliases": []},
    "ALXN": {"name": "Alexion", "aliases": []},
    "ILMN": {"name": "Illumina", "aliases": []},
    "TECH": {"name": "Bio-Techne", "aliases": []},
}


def make_series_rows(rng) -> list[list[str]]:
    start = date(2014, 1, 3)
    end = date(2016, 12, 30)
    dates = []
    d = start
    while d <= end:
        dates.append(d)
        d += timedelta(days=7)
    n = len(dates)
    rows = []
    for ticker, anchors in SERIES_SHAPES.items():
        xs = np.array([a for a, _ in anchors])
        ys = np.array([b for _, b in anchors])
        level = np.interp(np.linspace(0.0, 1.0, n), xs, ys)
        span = ys.max() - ys.min()
        noise = rng.normal(0.0, 0.008 * span, size=n)
        values = level + noise
        for dt, value in zip(dates, values):
            rows.append([dt.isoformat(), ticker, f"{value:.2f}"])
    return rows


def main() -> None:
    OUT.mkdir(exist_ok=True)
    rng = np.random.default_rng(20140103)

    with open(OUT / "slope_labels.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "modifier", "angle_deg", "anchor_angle_deg", "participant_id"])
        writer.writerows(make_slope_rows(rng))

    with open(OUT / "shape_labels.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "shape_angle_deg", "rotation_deg", "participant_id"])
        writer.writerows(make_shape_rows(rng))

    with open(OUT / "stocks.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "ticker", "value"])
        writer.writerows(make_series_rows(rng))

    (OUT / "metadata.json").write_text(
        json.dumps(METADATA, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
