# Run the labeling pipeline over one stock and watch what each
# simplification level contributes.

from pathlib import Path

from trendsearch.datastore import fit_models, load_label_csv, load_series_csv, load_shape_csv
from trendsearch.labeling import label_chart, linearize, normalize

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

samples, _ = load_label_csv(FIXTURES / "slope_labels.csv")
shapes, _ = load_shape_csv(FIXTURES / "shape_labels.csv")
bundle = fit_models(samples, shapes)

charts = load_series_csv(FIXTURES / "stocks.csv")
series = charts["ALK"]
print(f"{series.chart_id}: {len(series.dates)} observations "
      f"{series.dates[0]} .. {series.dates[-1]}")

# The 3:1 presentation stretch: perceived slope is what the labels mean.
norm = normalize(series)
for eps in (0.03, 0.1, 0.2):
    segments = linearize(norm, eps)
    print(f"\nepsilon {eps}: {len(segments)} segments")
    for seg in segments:
        print(f"  {seg.start_date} .. {seg.end_date}  perceived {seg.perceived_angle:+6.1f} deg")

events = label_chart(series, bundle.slope, bundle.compound, bundle.shape)
print(f"\n{len(events)} labeled events after keeping the top 75% per kind and level:")
for e in events:
    level = f"eps {e.epsilon_level}" if e.epsilon_level is not None else "superlative"
    print(f"  [{e.kind:<11}] {e.label:<22} {e.start_date} .. {e.end_date}  "
          f"saliency {e.saliency:.3f}  ({level})")
