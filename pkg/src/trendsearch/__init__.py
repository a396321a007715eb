"""Quantified-semantics trend labeling and search for univariate series.

The package fits Gaussian KDE models that map slope angles and
two-segment shapes to crowdsourced trend labels, labels raw time series
with those models, and answers natural-language trend queries over the
labeled events with saliency-weighted ranking, sequence matching, and
faceted filtering.
"""

from .labelmodels import (
    Kde1D,
    KdePeriodic2D,
    LabelSample,
    LabelStats,
    ModifierScalarModel,
    ShapeSample,
    argmax_label,
    argmax_shape_label,
    clean_modifier_samples,
    fit_modifier_scalars,
    fit_shape_kdes,
    fit_slope_kdes,
    label_stats,
)
from .labeling import (
    ChartExtents,
    LabeledEvent,
    LinearSegment,
    NormalizedSeries,
    TimeSeries,
    label_chart,
    label_corpus,
    linearize,
    normalize,
    saliency,
    segment_angle,
    shape_params,
    superlative_events,
)
from .queryparse import DateRange, ParsedQuery, QueryParser, parse_date_range
from .search import Bucket, Index, ScoredMatch, encode, label_score, retrieve, score_and_bucket
from .sequences import (
    SequenceBucket,
    SequenceMatch,
    bucket_sequences,
    enumerate_subsequences,
    join_sequences,
    penalized_score,
)
from .facets import FacetNode, SubsumptionEdge, build_facet_tree, derive_hierarchy, related_labels
from .datastore import Config, Corpus, ModelBundle, fit_models, load_events, persist_events
from .engine import SearchEngine

__all__ = [name for name in dir() if not name.startswith("_")]
