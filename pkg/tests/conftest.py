from __future__ import annotations

from datetime import date, timedelta
from pathlib import Path

import pytest

from trendsearch.datastore import (
    Corpus,
    fit_models,
    load_label_csv,
    load_metadata,
    load_series_csv,
    load_shape_csv,
)
from trendsearch.engine import SearchEngine
from trendsearch.labeling import LabeledEvent, label_corpus

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def mk_event(
    chart="A",
    label="climbing",
    kind="slope",
    start=date(2015, 1, 1),
    days=30,
    saliency=1.0,
):
    """Bare labeled event for index-level tests."""
    end = start + timedelta(days=days)
    return LabeledEvent(
        chart_id=chart,
        start_date=start,
        end_date=end,
        label=label,
        kind=kind,
        density=1.0,
        saliency=saliency,
        epsilon_level=0.1,
        x_event_start=start,
        x_event_end=end,
        y_event_start=0.0,
        y_event_end=1.0,
        y_event_min=0.0,
        y_event_max=1.0,
    )


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def label_samples():
    samples, diagnostics = load_label_csv(FIXTURES / "slope_labels.csv")
    assert not diagnostics
    return samples


@pytest.fixture(scope="session")
def shape_samples():
    samples, diagnostics = load_shape_csv(FIXTURES / "shape_labels.csv")
    assert not diagnostics
    return samples


@pytest.fixture(scope="session")
def bundle(label_samples, shape_samples):
    return fit_models(label_samples, shape_samples)


@pytest.fixture(scope="session")
def charts():
    return load_series_csv(FIXTURES / "stocks.csv")


@pytest.fixture(scope="session")
def corpus_events(bundle, charts):
    return label_corpus(
        sorted(charts.values(), key=lambda s: s.chart_id),
        bundle.slope,
        bundle.compound,
        bundle.shape,
    )


@pytest.fixture(scope="session")
def engine(bundle, charts, corpus_events):
    corpus = Corpus(
        charts=charts,
        metadata=load_metadata(FIXTURES / "metadata.json"),
        events=corpus_events,
        model_fingerprint=bundle.fingerprint(),
    )
    return SearchEngine(corpus=corpus, models=bundle)
