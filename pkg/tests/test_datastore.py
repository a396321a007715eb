from __future__ import annotations

from datetime import date

import pytest

from conftest import mk_event
from trendsearch.datastore import (
    Config,
    DatastoreError,
    ModelBundle,
    fit_models,
    load_config,
    load_events,
    load_label_csv,
    load_series_csv,
    persist_events,
)


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


# -- series CSV -----------------------------------------------------------------


def test_load_two_tickers(tmp_path):
    csv_path = _write(
        tmp_path / "s.csv",
        "date,ticker,value\n"
        "2015-01-01,AAA,1.0\n2015-01-02,AAA,2.0\n2015-01-03,AAA,3.0\n"
        "2015-01-01,BBB,9.0\n2015-01-02,BBB,8.0\n2015-01-03,BBB,7.0\n",
    )
    charts = load_series_csv(csv_path)
    assert sorted(charts) == ["AAA", "BBB"]
    assert len(charts["AAA"].dates) == 3


def test_out_of_order_rows_are_sorted(tmp_path):
    csv_path = _write(
        tmp_path / "s.csv",
        "date,ticker,value\n2015-01-03,AAA,3.0\n2015-01-01,AAA,1.0\n2015-01-02,AAA,2.0\n",
    )
    series = load_series_csv(csv_path)["AAA"]
    assert series.dates == (date(2015, 1, 1), date(2015, 1, 2), date(2015, 1, 3))
    assert series.values == (1.0, 2.0, 3.0)


def test_duplicate_observation_fails_with_line(tmp_path):
    csv_path = _write(
        tmp_path / "s.csv",
        "date,ticker,value\n2015-01-01,AAA,1.0\n2015-01-02,AAA,2.0\n2015-01-01,AAA,9.0\n",
    )
    with pytest.raises(DatastoreError, match=r"s\.csv:4.*duplicate"):
        load_series_csv(csv_path)


def test_malformed_row_fails_with_line(tmp_path):
    csv_path = _write(
        tmp_path / "s.csv",
        "date,ticker,value\n2015-01-01,AAA,1.0\nnot-a-date,AAA,2.0\n",
    )
    with pytest.raises(DatastoreError, match=r"s\.csv:3"):
        load_series_csv(csv_path)


def test_empty_file_fails(tmp_path):
    csv_path = _write(tmp_path / "s.csv", "")
    with pytest.raises(DatastoreError, match="empty"):
        load_series_csv(csv_path)
    header_only = _write(tmp_path / "h.csv", "date,ticker,value\n")
    with pytest.raises(DatastoreError, match="no data rows"):
        load_series_csv(header_only)


# -- annotation CSV ----------------------------------------------------------------


def test_label_csv_rejects_bad_rows_with_diagnostics(tmp_path):
    csv_path = _write(
        tmp_path / "l.csv",
        "label,modifier,angle_deg,anchor_angle_deg,participant_id\n"
        "falling,,-45.0,,p1\n"
        "broken,,120.0,,p2\n"      # angle outside [-90, 90]
        "orphan,slowly,-10.0,,p3\n",  # modifier without anchor
    )
    samples, diagnostics = load_label_csv(csv_path)
    assert [s.label for s in samples] == ["falling"]
    assert len(diagnostics) == 2
    assert "l.csv:3" in diagnostics[0]


# -- events round trip ----------------------------------------------------------------


def test_events_roundtrip_lossless(tmp_path):
    events = [
        mk_event("A", "tanking", "slope"),
        mk_event("B", "peak", "shape", days=12, saliency=0.25),
    ]
    path = tmp_path / "events.jsonl"
    persist_events(events, path, model_fingerprint="abc123")
    loaded, header = load_events(path)
    assert loaded == events
    assert header["model_fingerprint"] == "abc123"
    assert header["event_count"] == 2


def test_empty_event_list_roundtrip(tmp_path):
    path = tmp_path / "events.jsonl"
    persist_events([], path)
    loaded, header = load_events(path)
    assert loaded == []
    assert header["event_count"] == 0


def test_version_mismatch_instructs_relabel(tmp_path):
    path = tmp_path / "events.jsonl"
    _write(
        path,
        '{"format":"trendsearch-events","schema_version":99,"model_fingerprint":null,"event_count":0}\n',
    )
    with pytest.raises(DatastoreError, match="re-run labeling"):
        load_events(path)


def test_foreign_file_rejected(tmp_path):
    path = _write(tmp_path / "events.jsonl", '{"something": "else"}\n')
    with pytest.raises(DatastoreError, match="not an events file"):
        load_events(path)


def test_persist_is_deterministic(tmp_path):
    events = [mk_event("A", "tanking", "slope"), mk_event("B", "rising", "slope")]
    p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    persist_events(events, p1, model_fingerprint="f")
    persist_events(events, p2, model_fingerprint="f")
    assert p1.read_bytes() == p2.read_bytes()


def test_corpus_roundtrip_speed_and_fidelity(tmp_path, corpus_events):
    import time

    path = tmp_path / "events.jsonl"
    start = time.monotonic()
    persist_events(corpus_events, path)
    loaded, _ = load_events(path)
    elapsed = time.monotonic() - start
    assert loaded == corpus_events
    assert elapsed < 5.0


# -- models ------------------------------------------------------------------------


def test_model_bundle_roundtrip(tmp_path, label_samples, shape_samples):
    bundle = fit_models(label_samples, shape_samples)
    path = tmp_path / "models.json"
    bundle.save(path)
    loaded = ModelBundle.load(path)
    assert loaded.fingerprint() == bundle.fingerprint()
    assert set(loaded.slope) == set(bundle.slope)
    assert loaded.cleaning_retention == bundle.cleaning_retention
    some_label = sorted(bundle.slope)[0]
    assert loaded.slope[some_label].density(0.0) == pytest.approx(
        bundle.slope[some_label].density(0.0), abs=1e-15
    )


def test_model_version_mismatch(tmp_path):
    path = _write(tmp_path / "models.json", '{"version": 99}')
    with pytest.raises(DatastoreError, match="re-run fitting"):
        ModelBundle.load(path)


# -- config ------------------------------------------------------------------------


def test_config_defaults():
    cfg = load_config(None)
    assert cfg == Config()


def test_config_overrides(tmp_path):
    path = _write(
        tmp_path / "cfg.ini",
        "[trendsearch]\naspect = 2.5\nepsilons = 0.05, 0.15\nmax_gap_days = 30\n"
        "keep_fraction = 0.5\nfuzzy_threshold = 0.6\n",
    )
    cfg = load_config(path)
    assert cfg.aspect == 2.5
    assert cfg.epsilons == (0.05, 0.15)
    assert cfg.max_gap_days == 30
    assert cfg.keep_fraction == 0.5
    assert cfg.fuzzy_threshold == 0.6
    assert cfg.retrieval_cap == 1000  # untouched default


def test_config_missing_file_fails(tmp_path):
    with pytest.raises(DatastoreError, match="not found"):
        load_config(tmp_path / "nope.ini")
