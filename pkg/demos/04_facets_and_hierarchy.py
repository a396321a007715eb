# Facet families over search matches, exclusion filtering, and the
# IQR-based hypernym suggestions.

from pathlib import Path

from trendsearch.datastore import (
    Corpus,
    fit_models,
    load_label_csv,
    load_metadata,
    load_series_csv,
    load_shape_csv,
)
from trendsearch.engine import SearchEngine
from trendsearch.facets import derive_hierarchy
from trendsearch.labeling import label_corpus
from trendsearch.labelmodels import label_stats

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

samples, _ = load_label_csv(FIXTURES / "slope_labels.csv")
shapes, _ = load_shape_csv(FIXTURES / "shape_labels.csv")
bundle = fit_models(samples, shapes)
charts = load_series_csv(FIXTURES / "stocks.csv")
events = label_corpus(
    sorted(charts.values(), key=lambda s: s.chart_id),
    bundle.slope, bundle.compound, bundle.shape,
)
engine = SearchEngine(
    corpus=Corpus(charts=charts, metadata=load_metadata(FIXTURES / "metadata.json"),
                  events=events),
    models=bundle,
)

result = engine.search("stocks that went up")
print("facet tree for 'stocks that went up':")
for root in result["facet_tree"]:
    print(f"  [{'x' if root['checked'] else ' '}] {root['label']} ({root['match_count']})")
    for child in root["children"]:
        print(f"       [{'x' if child['checked'] else ' '}] {child['label']} ({child['match_count']})")

# Unchecking a family removes it (and its variants) from the buckets.
filtered = engine.search("stocks that went up", exclude={"soaring"})
before = {e["label"] for b in result["buckets"] for e in b["events"]}
after = {e["label"] for b in filtered["buckets"] for e in b["events"]}
print(f"\nlabels before excluding 'soaring': {sorted(before)}")
print(f"labels after:                      {sorted(after)}")

# Angle-range containment suggests hypernym -> hyponym edges.
stats = [label_stats(m) for m in bundle.slope.values()]
print("\nfull subsumption edges (hypernym -> hyponym):")
for edge in derive_hierarchy(stats):
    if edge.kind == "full":
        print(f"  {edge.hypernym} -> {edge.hyponym}")
