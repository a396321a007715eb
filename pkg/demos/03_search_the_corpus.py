# Build the full search engine over the bundled corpus and run the
# kinds of queries the interface supports.

from pathlib import Path

from trendsearch.datastore import (
    Corpus,
    fit_models,
    load_label_csv,
    load_metadata,
    load_series_csv,
    load_shape_csv,
)
from trendsearch.engine import SearchEngine, compose_tile_sentence
from trendsearch.labeling import label_corpus

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

QUERIES = [
    "Show me when Alaska Airlines was tanking before November 2016",
    "stocks that went up",           # synonym expansion + notification
    "slow climbing",                 # modifier + descriptor scoring
    "tankng",                        # typo, fuzzy n-gram match
    "peak in 2015",                  # shape label + date filter
    "up, down, up",                  # sequence with per-slot colors
    "maximum",                       # superlative window events
]

for query in QUERIES:
    result = engine.search(query)
    print(f"\n=== {query!r}")
    if result["notification"]:
        print(f"    note: {result['notification']}")
    for bucket in result["buckets"][:3]:
        print(f"    {bucket['chart_id']:<6} score {bucket['bucket_score']:.3f} "
              f"({bucket['match_count']} matches)")
        print(f"      {compose_tile_sentence(bucket['snippets'])}")
