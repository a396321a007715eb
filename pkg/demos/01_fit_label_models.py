# Fit the quantified-semantics models from the bundled annotation CSVs
# and poke at what they learned.

from pathlib import Path

from trendsearch.datastore import fit_models, load_label_csv, load_shape_csv
from trendsearch.labelmodels import argmax_label, argmax_shape_label, label_stats

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

samples, diagnostics = load_label_csv(FIXTURES / "slope_labels.csv")
shapes, _ = load_shape_csv(FIXTURES / "shape_labels.csv")
print(f"{len(samples)} slope/modifier rows, {len(shapes)} shape rows")

bundle = fit_models(samples, shapes)
print(f"slope labels: {sorted(bundle.slope)}")
print(f"compound phrases: {len(bundle.compound)}, shape labels: {sorted(bundle.shape)}")
print(f"modifier-row cleaning retention: {bundle.cleaning_retention:.1%}")

# Which label does a given perceived angle get?
for angle in (-75.0, -40.0, 0.0, 20.0, 62.0):
    label, density = argmax_label(bundle.slope, angle)
    print(f"angle {angle:+6.1f} deg -> {label!r} (density {density:.4f})")

# Shape lookup: a symmetric peak vs. a symmetric valley.
print("shape (70 deg, rot 0)  ->", argmax_shape_label(bundle.shape, 70.0, 0.0)[0])
print("shape (70 deg, rot 180) ->", argmax_shape_label(bundle.shape, 70.0, 180.0)[0])

# The modifier adverbs as slope scalars.
for modifier, model in bundle.modifier_scalars.items():
    print(f"{modifier!r} scales a base slope by ~{model.peak_scalar:.2f}")

# Distribution summaries; wide IQRs suggest broader words.
rows = sorted(
    (label_stats(m) for m in bundle.slope.values()),
    key=lambda s: s.iqr_width,
    reverse=True,
)
print("\nlabel           mode    median  IQR")
for s in rows:
    print(f"{s.label:<14} {s.mode:+7.1f} {s.median:+8.1f}  [{s.iqr_low:+.1f}, {s.iqr_high:+.1f}]")
