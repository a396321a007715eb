"""Command-line front door for the fitting, labeling, and search pipeline.

Subcommands:

* ``fit-models``: annotation CSVs -> fitted model file.
* ``label``: series CSV + models -> labeled-event JSON lines.
* ``index``: events -> postings sidecar.
* ``serve``: start the HTTP API (and the bundled UI when built).
* ``query``: one-shot search printed as a table or as the API JSON.
* ``stats``: corpus counts and fitting diagnostics.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .datastore import (
    Config,
    Corpus,
    DatastoreError,
    ModelBundle,
    fit_models,
    load_config,
    load_events,
    load_label_csv,
    load_metadata,
    load_series_csv,
    load_shape_csv,
    persist_events,
)
from .engine import SearchEngine, compose_tile_sentence
from .labeling import label_corpus
from .queryparse import QueryParseError
from .search import Index


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (DatastoreError, QueryParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trendsearch")
    parser.add_argument("--config", help="INI config file", default=None)
    sub = parser.add_subparsers(required=True)

    fit = sub.add_parser("fit-models", help="fit KDE models from annotation CSVs")
    fit.add_argument("--labels", required=True, help="slope/modifier annotation CSV")
    fit.add_argument("--shapes", help="shape annotation CSV")
    fit.add_argument("--models", required=True, help="output model file")
    fit.set_defaults(handler=_cmd_fit)

    label = sub.add_parser("label", help="label a series corpus into events")
    label.add_argument("--corpus", required=True, help="series CSV")
    label.add_argument("--models", required=True)
    label.add_argument("--events", required=True, help="output events file")
    label.add_argument("--keep", type=float, default=None)
    label.add_argument("--aspect", type=float, default=None)
    label.set_defaults(handler=_cmd_label)

    index = sub.add_parser("index", help="build the postings sidecar")
    index.add_argument("--events", required=True)
    index.add_argument("--postings", required=True, help="output sidecar file")
    index.set_defaults(handler=_cmd_index)

    serve = sub.add_parser("serve", help="start the HTTP API")
    _add_engine_args(serve)
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--static", default=None, help="directory with the built UI")
    serve.set_defaults(handler=_cmd_serve)

    query = sub.add_parser("query", help="run one search and print results")
    _add_engine_args(query)
    query.add_argument("text")
    query.add_argument("--exclude", default="", help="comma-separated excluded labels")
    query.add_argument("--page", type=int, default=1)
    query.add_argument("--json", action="store_true", help="print the API response body")
    query.add_argument("--max-gap", type=int, default=None, help="sequence gap budget, days")
    query.set_defaults(handler=_cmd_query)

    stats = sub.add_parser("stats", help="print corpus statistics")
    _add_engine_args(stats)
    stats.set_defaults(handler=_cmd_stats)
    return parser


def _add_engine_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--events", required=True)
    sub.add_argument("--corpus", required=True, help="series CSV")
    sub.add_argument("--models", default=None)
    sub.add_argument("--metadata", default=None, help="chart metadata JSON")
    sub.add_argument("--postings", default=None, help="postings sidecar (else rebuilt)")


def _cmd_fit(args) -> int:
    config = load_config(args.config)
    samples, diagnostics = load_label_csv(args.labels)
    shapes = []
    if args.shapes:
        shapes, shape_diags = load_shape_csv(args.shapes)
        diagnostics.extend(shape_diags)
    bundle = fit_models(samples, shapes, config)
    bundle.save(args.models)
    for line in diagnostics:
        print(line, file=sys.stderr)
    print(
        f"fitted {len(bundle.slope)} slope, {len(bundle.compound)} compound, "
        f"{len(bundle.shape)} shape models "
        f"(modifier-row retention {bundle.cleaning_retention:.1%}) -> {args.models}"
    )
    return 0


def _cmd_label(args) -> int:
    config = load_config(args.config)
    if args.keep is not None:
        config.keep_fraction = args.keep
    if args.aspect is not None:
        config.aspect = args.aspect
    charts = load_series_csv(args.corpus)
    bundle = ModelBundle.load(args.models)
    events = label_corpus(
        sorted(charts.values(), key=lambda s: s.chart_id),
        bundle.slope,
        bundle.compound,
        bundle.shape,
        epsilons=config.epsilons,
        aspect=config.aspect,
        keep=config.keep_fraction,
    )
    persist_events(events, args.events, model_fingerprint=bundle.fingerprint())
    print(f"labeled {len(charts)} charts -> {len(events)} events -> {args.events}")
    return 0


def _cmd_index(args) -> int:
    events, _header = load_events(args.events)
    index = Index(events)
    index.save_postings(args.postings)
    print(f"indexed {len(events)} events, {len(index.postings)} tokens -> {args.postings}")
    return 0


def _load_engine(args) -> SearchEngine:
    config = load_config(args.config)
    if getattr(args, "max_gap", None) is not None:
        config.max_gap_days = args.max_gap
    events, header = load_events(args.events)
    charts = load_series_csv(args.corpus)
    metadata = load_metadata(args.metadata) if args.metadata else {}
    models = ModelBundle.load(args.models) if args.models else None
    corpus = Corpus(
        charts=charts,
        metadata=metadata,
        events=events,
        model_fingerprint=header.get("model_fingerprint"),
    )
    return SearchEngine(
        corpus=corpus, models=models, config=config, postings_path=args.postings
    )


def _cmd_serve(args) -> int:
    import signal

    import uvicorn

    from .server import create_app

    engine = _load_engine(args)
    static = args.static if args.static and Path(args.static).is_dir() else None
    app = create_app(engine, static_dir=static)

    def reload_engine(_signum, _frame) -> None:
        # Atomic swap: requests in flight keep the engine they started
        # with; new requests see the freshly loaded one.
        app.state.engine = _load_engine(args)
        print("index reloaded", file=sys.stderr)

    if hasattr(signal, "SIGHUP"):
        signal.signal(signal.SIGHUP, reload_engine)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_query(args) -> int:
    engine = _load_engine(args)
    excluded = {part.strip() for part in args.exclude.split(",") if part.strip()}
    payload = engine.search(args.text, exclude=excluded, page=args.page)
    for bucket in payload["buckets"]:
        bucket["sentence"] = compose_tile_sentence(bucket["snippets"])
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=1))
        return 0
    if payload["notification"]:
        print(f"note: {payload['notification']}")
    if not payload["buckets"]:
        print("no results")
        return 0
    for rank, bucket in enumerate(payload["buckets"], start=1):
        print(
            f"{rank:>3}. {bucket['chart_id']:<8} score {bucket['bucket_score']:.4f} "
            f"({bucket['match_count']} matches)"
        )
        print(f"     {bucket['sentence']}")
    return 0


def _cmd_stats(args) -> int:
    engine = _load_engine(args)
    stats = engine.corpus_stats()
    for key, value in stats.items():
        print(f"{key}: {value}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
