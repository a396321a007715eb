"""End-to-end query pipeline: parse, retrieve, score, facet, bucket.

The engine owns the immutable pieces (index, charts, models, parser) and
turns a raw query string plus an exclusion set into the response payload
served over HTTP and printed by the one-shot CLI.  Responses are fully
deterministic for a fixed corpus and configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date

from . import facets as facets_mod
from . import search as search_mod
from . import sequences as sequences_mod
from .datastore import Config, Corpus, ModelBundle
from .labelmodels import LabelStats, label_stats
from .labeling import LabeledEvent
from .queryparse import ParsedQuery, QueryParseError, QueryParser, load_default_synonyms
from .search import Index, ScoredMatch, TermResolution

PAGE_SIZE = 20
MAX_SNIPPETS = 3


@dataclass
class SearchEngine:
    corpus: Corpus
    models: ModelBundle | None = None
    config: Config = field(default_factory=Config)
    postings_path: str | None = None

    def __post_init__(self) -> None:
        self.index = Index.load(self.corpus.events, self.postings_path)
        self.synonyms = load_default_synonyms()
        vocabulary = (
            self.models.vocabulary_words()
            if self.models
            else set(self.index.vocabulary_words)
        )
        self.parser = QueryParser(
            vocabulary=vocabulary,
            alias_map=self._alias_map(),
            synonyms=self.synonyms,
        )
        self.stats: dict[str, LabelStats] = {}
        self.label_kinds: dict[str, str] = {}
        if self.models:
            for key, model in {**self.models.slope, **self.models.compound}.items():
                self.stats[key] = label_stats(model)
            self.label_kinds = self.models.label_kinds()
        else:
            self.label_kinds = self.index.labels()
        self._expansion_table = self._expansions()

    def _alias_map(self) -> dict[str, str]:
        out = {chart_id.lower(): chart_id for chart_id in self.corpus.charts}
        for chart_id, meta in self.corpus.metadata.items():
            for alias in [meta.get("name", "")] + list(meta.get("aliases", [])):
                if alias:
                    out[alias.lower()] = chart_id
        return out

    # -- term resolution --------------------------------------------------

    def _expansions(self) -> dict[str, set[str]]:
        """Synonym-table entries resolved to index word tokens.

        Slope-family selectors become the descriptor words of every label
        whose peak-density angle passes the selector; plain entries stand
        for themselves.
        """
        thr = self.config.flat_threshold_degrees
        out: dict[str, set[str]] = {}
        for term, entries in self.synonyms.items():
            tokens: set[str] = set()
            for entry in entries:
                if entry in ("+slope", "-slope", "flat"):
                    for label, s in self.stats.items():
                        kind = self.label_kinds.get(label)
                        if kind is None:
                            continue
                        passes = (
                            (entry == "+slope" and s.mode > thr)
                            or (entry == "-slope" and s.mode < -thr)
                            or (entry == "flat" and abs(s.mode) <= thr)
                        )
                        if passes:
                            tokens.add(facets_mod.descriptor_of(label, kind))
                else:
                    tokens.add(entry.lower())
            if tokens:
                out[term] = tokens
        return out

    def resolve_slot(self, terms: tuple[str, ...]) -> list[TermResolution]:
        return [
            search_mod.resolve_term(
                self.index,
                term,
                fuzzy_threshold=self.config.fuzzy_threshold,
                expansions=self._expansion_table,
            )
            for term in terms
        ]

    # -- search -----------------------------------------------------------

    def search(self, raw_query: str, exclude: set[str] | None = None, page: int = 1) -> dict:
        parsed = self.parser.parse(raw_query)
        excluded = {e.lower() for e in (exclude or set()) if e}
        if parsed.event_type == "single":
            return self._search_single(parsed, excluded, page)
        return self._search_sequence(parsed, excluded, page)

    def _search_single(self, parsed: ParsedQuery, excluded: set[str], page: int) -> dict:
        resolutions = self.resolve_slot(parsed.trend_terms[0])
        inexact = list(parsed.inexact_terms)
        inexact.extend(
            r.term for r in resolutions if not r.exact and r.term not in inexact
        )
        retrieved = search_mod.retrieve(
            self.index,
            resolutions,
            attr=parsed.attr,
            date_range=parsed.date_range,
            cap=self.config.retrieval_cap,
        )
        scored = search_mod.score_matches(self.index, retrieved, resolutions)
        matched_events = [self.index.documents[m.doc_id].event for m in scored]
        tree = facets_mod.build_facet_tree(matched_events)
        closed = facets_mod.expand_exclusions(tree, excluded)
        facets_mod.apply_checkbox_state(tree, excluded)
        visible = [
            m
            for m in scored
            if self.index.documents[m.doc_id].event.label.lower() not in closed
        ]
        buckets = search_mod.score_and_bucket(self.index, visible)
        bucket_payloads = [self._bucket_payload(b) for b in buckets]
        return self._response(parsed, inexact, tree, bucket_payloads, page)

    def _search_sequence(self, parsed: ParsedQuery, excluded: set[str], page: int) -> dict:
        per_slot: list[list[ScoredMatch]] = []
        inexact = list(parsed.inexact_terms)
        for slot in parsed.trend_terms:
            resolutions = self.resolve_slot(slot)
            inexact.extend(
                r.term for r in resolutions if not r.exact and r.term not in inexact
            )
            retrieved = search_mod.retrieve(
                self.index,
                resolutions,
                attr=parsed.attr,
                date_range=parsed.date_range,
                cap=self.config.retrieval_cap,
            )
            per_slot.append(search_mod.score_matches(self.index, retrieved, resolutions))
        matches = sequences_mod.search_sequence(
            self.index, per_slot, max_gap_days=self.config.max_gap_days
        )
        matched_events = [
            self.index.documents[e.doc_id].event for m in matches for e in m.events
        ]
        tree = facets_mod.build_facet_tree(matched_events)
        closed = facets_mod.expand_exclusions(tree, excluded)
        facets_mod.apply_checkbox_state(tree, excluded)
        visible = [
            m
            for m in matches
            if not any(
                self.index.documents[e.doc_id].event.label.lower() in closed
                for e in m.events
            )
        ]
        buckets = sequences_mod.bucket_sequences(visible)
        bucket_payloads = [self._sequence_bucket_payload(b) for b in buckets]
        return self._response(parsed, inexact, tree, bucket_payloads, page)

    # -- payload assembly ---------------------------------------------------

    def _event_payload(self, m: ScoredMatch, match_id: int | None = None) -> dict:
        event = self.index.documents[m.doc_id].event
        payload = {
            "doc_id": m.doc_id,
            "start_date": event.start_date.isoformat(),
            "end_date": event.end_date.isoformat(),
            "label": event.label,
            "kind": event.kind,
            "label_score": m.label_score,
            "saliency": m.saliency,
            "composite": m.composite,
        }
        if m.slot_index is not None:
            payload["slot_index"] = m.slot_index
            payload["slot_color"] = sequences_mod.slot_color(m.slot_index)
        if match_id is not None:
            payload["match_id"] = match_id
        return payload

    def _bucket_payload(self, bucket: search_mod.Bucket) -> dict:
        events = [self._event_payload(m) for m in bucket.events]
        snippets = [
            _span_fragment(e["label"], e["start_date"], e["end_date"])
            for e in events[:MAX_SNIPPETS]
        ]
        return {
            "chart_id": bucket.chart_id,
            "bucket_score": bucket.bucket_score,
            "match_count": len(events),
            "events": events,
            "snippets": snippets,
        }

    def _sequence_bucket_payload(self, bucket: sequences_mod.SequenceBucket) -> dict:
        events = []
        snippets = []
        for match_id, match in enumerate(bucket.matches):
            events.extend(self._event_payload(e, match_id) for e in match.events)
            if match_id < MAX_SNIPPETS:
                labels = ", then ".join(
                    self.index.documents[e.doc_id].event.label for e in match.events
                )
                snippets.append(
                    _span_fragment(
                        labels,
                        self.index.documents[match.events[0].doc_id].event.start_date.isoformat(),
                        self.index.documents[match.events[-1].doc_id].event.end_date.isoformat(),
                    )
                )
        return {
            "chart_id": bucket.chart_id,
            "bucket_score": bucket.bucket_score,
            "match_count": len(bucket.matches),
            "events": events,
            "snippets": snippets,
        }

    def _response(
        self,
        parsed: ParsedQuery,
        inexact: list[str],
        tree: list[facets_mod.FacetNode],
        bucket_payloads: list[dict],
        page: int,
    ) -> dict:
        notification = None
        if inexact:
            quoted = ", ".join(f"'{t}'" for t in inexact)
            notification = (
                f"No exact matches for {quoted}. "
                "Synonyms or partial matches are shown below."
            )
        page = max(1, page)
        start = (page - 1) * PAGE_SIZE
        query_echo = parsed.as_query_dict()
        query_echo["inexact_terms"] = inexact
        return {
            "notification": notification,
            "facet_tree": [n.as_dict() for n in tree],
            "buckets": bucket_payloads[start : start + PAGE_SIZE],
            "total_buckets": len(bucket_payloads),
            "page": page,
            "query_echo": query_echo,
        }

    # -- auxiliary surfaces -------------------------------------------------

    def chart_points(
        self, chart_id: str, start: date | None = None, end: date | None = None
    ) -> list[dict]:
        if chart_id not in self.corpus.charts:
            raise KeyError(chart_id)
        series = self.corpus.charts[chart_id]
        out = []
        for d, v in zip(series.dates, series.values):
            if start is not None and d < start:
                continue
            if end is not None and d >= end:
                continue
            out.append({"date": d.isoformat(), "value": v})
        return out

    def label_catalog(self) -> list[dict]:
        """Every indexed label with its kind and family descriptor."""
        out = []
        for label, kind in sorted(self.index.labels().items()):
            out.append(
                {
                    "label": label,
                    "kind": kind,
                    "family": facets_mod.descriptor_of(label, kind),
                }
            )
        return out

    def corpus_stats(self) -> dict:
        by_kind: dict[str, int] = {}
        for e in self.corpus.events:
            by_kind[e.kind] = by_kind.get(e.kind, 0) + 1
        out = {
            "charts": len(self.corpus.charts),
            "events": len(self.corpus.events),
            "events_by_kind": dict(sorted(by_kind.items())),
            "labels": len(self.index.labels()),
        }
        if self.models:
            out["cleaning_retention"] = self.models.cleaning_retention
        return out


def _span_fragment(label: str, start_iso: str, end_iso: str) -> str:
    return f"{label} from {_pretty_date(start_iso)} to {_pretty_date(end_iso)}"


def _pretty_date(iso: str) -> str:
    d = date.fromisoformat(iso)
    return f"{d.strftime('%B')} {d.day}, {d.year}"


def compose_tile_sentence(snippets: list[str]) -> str:
    """Join up to three span fragments into the tile's one-line summary."""
    if not snippets:
        return "No matches."
    if len(snippets) == 1:
        body = snippets[0]
    elif len(snippets) == 2:
        body = f"{snippets[0]} and {snippets[1]}"
    else:
        body = f"{snippets[0]}, {snippets[1]}, and {snippets[2]}"
    return f"This stock was {body}."
