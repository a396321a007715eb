"""In-process inverted index over labeled events with match scoring.

Each labeled event is one document.  Documents are encoded as token sets
(lowercased label words plus character trigrams of each word) to support
exact and fuzzy lookups.  Retrieval collects word-token overlaps, falls
back to n-gram similarity for unknown words, enforces the descriptor
filter, applies attribute and date filters, and caps the candidate list.
Matches are scored by label precision times visual saliency and grouped
into per-chart buckets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .labeling import KIND_COMPOUND, LabeledEvent
from .queryparse import DateRange

POSTINGS_FORMAT_VERSION = 1
DEFAULT_RETRIEVAL_CAP = 1000
DEFAULT_FUZZY_THRESHOLD = 0.5

PART_DESCRIPTOR = "descriptor"
PART_MODIFIER = "modifier"


class IndexError_(RuntimeError):
    """Raised for malformed or incompatible index sidecar files."""


def encode(text: str) -> frozenset[str]:
    """Token set for a label or query: words plus per-word trigrams."""
    tokens: set[str] = set()
    for word in text.lower().split():
        tokens.add(word)
        if len(word) >= 3:
            tokens.update(word[i : i + 3] for i in range(len(word) - 2))
    return frozenset(tokens)


def ngrams(word: str, n: int = 2) -> frozenset[str]:
    """Character n-grams used by the fuzzy path (bigrams by default)."""
    if len(word) < n:
        return frozenset({word})
    return frozenset(word[i : i + n] for i in range(len(word) - n + 1))


def ngram_similarity(a: str, b: str, n: int = 2) -> float:
    """Jaccard similarity of the two words' character n-gram sets."""
    ga, gb = ngrams(a, n), ngrams(b, n)
    union = len(ga | gb)
    return len(ga & gb) / union if union else 0.0


@dataclass(frozen=True)
class Document:
    """One indexed event with its encoded token set."""

    doc_id: int
    event: LabeledEvent
    words: frozenset[str]
    tokens: frozenset[str]


@dataclass(frozen=True)
class TermResolution:
    """How one query term maps onto index word tokens.

    ``word_tokens`` is empty when the term resolved to nothing; ``exact``
    is False for fuzzy or synonym resolutions.
    """

    term: str
    word_tokens: frozenset[str]
    exact: bool


@dataclass(frozen=True)
class RetrievedDoc:
    doc_id: int
    matched_tokens: int


@dataclass(frozen=True)
class ScoredMatch:
    doc_id: int
    matched_tokens: int
    label_score: float
    saliency: float
    slot_index: int | None = None

    @property
    def composite(self) -> float:
        return self.label_score * self.saliency


@dataclass(frozen=True)
class Bucket:
    """Per-chart group of matches, ranked by the sum of composites."""

    chart_id: str
    events: tuple[ScoredMatch, ...]

    @property
    def bucket_score(self) -> float:
        return sum(e.composite for e in self.events)


class Index:
    """Immutable inverted index; build once, read from any thread."""

    def __init__(
        self, events: list[LabeledEvent], postings: dict[str, list[int]] | None = None
    ) -> None:
        self.documents: list[Document] = []
        self.word_parts: dict[str, set[str]] = {}
        for doc_id, event in enumerate(events):
            words = frozenset(event.label.lower().split())
            doc = Document(doc_id, event, words, encode(event.label))
            self.documents.append(doc)
            self._tag_parts(event)
        if postings is None:
            postings = {}
            for doc in self.documents:
                for token in doc.tokens:
                    postings.setdefault(token, []).append(doc.doc_id)
            for ids in postings.values():
                ids.sort()
        self.postings = postings
        self.word_postings = {
            w: [d for d in ids if w in self.documents[d].words]
            for w, ids in self.postings.items()
        }

    def _tag_parts(self, event: LabeledEvent) -> None:
        words = event.label.lower().split()
        for i, word in enumerate(words):
            part = PART_MODIFIER if event.kind == KIND_COMPOUND and i == 0 else PART_DESCRIPTOR
            self.word_parts.setdefault(word, set()).add(part)

    @property
    def vocabulary_words(self) -> list[str]:
        return sorted(self.word_parts)

    def labels(self) -> dict[str, str]:
        """Distinct label text -> kind over all documents."""
        return {d.event.label: d.event.kind for d in self.documents}

    def is_descriptor(self, word: str) -> bool:
        return PART_DESCRIPTOR in self.word_parts.get(word, set())

    # -- persistence ----------------------------------------------------

    def postings_payload(self) -> dict:
        return {
            "version": POSTINGS_FORMAT_VERSION,
            "doc_count": len(self.documents),
            "postings": {t: self.postings[t] for t in sorted(self.postings)},
        }

    def save_postings(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.postings_payload(), sort_keys=True, separators=(",", ":")),
            encoding="utf-8",
        )

    @classmethod
    def load(cls, events: list[LabeledEvent], sidecar: str | Path | None = None) -> "Index":
        """Load postings from a sidecar when present, else rebuild them.

        Both paths produce identical postings for the same event list.
        """
        if sidecar is None or not Path(sidecar).exists():
            return cls(events)
        payload = json.loads(Path(sidecar).read_text(encoding="utf-8"))
        if payload.get("version") != POSTINGS_FORMAT_VERSION:
            raise IndexError_(
                f"postings sidecar version {payload.get('version')} unsupported; re-index"
            )
        if payload.get("doc_count") != len(events):
            raise IndexError_("postings sidecar does not match events; re-index")
        return cls(events, postings=payload["postings"])


def resolve_term(
    index: Index,
    term: str,
    fuzzy_threshold: float = DEFAULT_FUZZY_THRESHOLD,
    expansions: dict[str, set[str]] | None = None,
) -> TermResolution:
    """Resolve one query term to index word tokens.

    Exact vocabulary words resolve to themselves.  Unknown words try the
    n-gram fuzzy path against the index vocabulary, then any provided
    expansion table (synonym word tokens); both mark the result inexact.
    """
    word = term.lower()
    if word in index.word_parts:
        return TermResolution(term, frozenset({word}), exact=True)
    fuzzy = frozenset(
        w
        for w in index.vocabulary_words
        if ngram_similarity(word, w) >= fuzzy_threshold
    )
    if fuzzy:
        return TermResolution(term, fuzzy, exact=False)
    if expansions and word in expansions:
        expanded = frozenset(
            t.lower() for t in expansions[word] if t.lower() in index.word_parts
        )
        return TermResolution(term, expanded, exact=False)
    return TermResolution(term, frozenset(), exact=False)


def retrieve(
    index: Index,
    resolutions: list[TermResolution],
    attr: str | None = None,
    date_range: DateRange | None = None,
    cap: int = DEFAULT_RETRIEVAL_CAP,
) -> list[RetrievedDoc]:
    """Candidate documents for one query slot, most-overlapping first.

    Candidates need at least one resolved word token in their label.  If a
    term resolved to any descriptor-part word, every candidate must carry
    one of that term's descriptor words (a query for a modifier+descriptor
    pair must not match documents sharing only the modifier).  Attribute
    and date filters come last, then the cap.
    """
    all_words = frozenset().union(*(r.word_tokens for r in resolutions)) if resolutions else frozenset()
    candidate_ids: set[int] = set()
    for word in all_words:
        candidate_ids.update(index.word_postings.get(word, ()))

    descriptor_constraints = []
    for r in resolutions:
        descriptors = {w for w in r.word_tokens if index.is_descriptor(w)}
        if descriptors:
            descriptor_constraints.append(descriptors)

    query_tokens = encode(" ".join(sorted(all_words)))
    out = []
    for doc_id in sorted(candidate_ids):
        doc = index.documents[doc_id]
        if any(not (doc.words & ds) for ds in descriptor_constraints):
            continue
        if attr is not None and doc.event.chart_id != attr:
            continue
        if date_range is not None and not _intersects(doc.event, date_range):
            continue
        out.append(RetrievedDoc(doc_id, len(query_tokens & doc.tokens)))
    out.sort(key=lambda m: (-m.matched_tokens, m.doc_id))
    return out[:cap]


def _intersects(event: LabeledEvent, r: DateRange) -> bool:
    """Does [start_date, end_date) cross the query window?"""
    if r.lt is not None and event.start_date >= r.lt:
        return False
    if r.gte is not None and event.end_date <= r.gte:
        return False
    return True


def label_score(query_words: set[str], label: str) -> float:
    """Matching-token count over the square root of the label's length.

    Length is counted in non-space characters, so longer labels rank
    below shorter ones at equal match counts.
    """
    label_words = set(label.lower().split())
    matches = sum(1 for w in query_words if w.lower() in label_words)
    length = len(label.replace(" ", ""))
    if length == 0:
        return 0.0
    return matches / math.sqrt(length)


def score_matches(
    index: Index,
    retrieved: list[RetrievedDoc],
    resolutions: list[TermResolution],
    slot_index: int | None = None,
) -> list[ScoredMatch]:
    """Composite scores (label score x saliency) for retrieved docs."""
    scoring_words: set[str] = set()
    for r in resolutions:
        scoring_words.update(r.word_tokens)
    out = []
    for m in retrieved:
        event = index.documents[m.doc_id].event
        score = label_score(scoring_words, event.label)
        if score <= 0.0:
            continue
        out.append(
            ScoredMatch(
                doc_id=m.doc_id,
                matched_tokens=m.matched_tokens,
                label_score=score,
                saliency=event.saliency,
                slot_index=slot_index,
            )
        )
    return out


def score_and_bucket(index: Index, matches: list[ScoredMatch]) -> list[Bucket]:
    """Group matches per chart; rank buckets by summed composite score."""
    by_chart: dict[str, list[ScoredMatch]] = {}
    for m in matches:
        by_chart.setdefault(index.documents[m.doc_id].event.chart_id, []).append(m)
    buckets = []
    for chart_id, chart_matches in by_chart.items():
        chart_matches.sort(
            key=lambda m: (
                -m.composite,
                index.documents[m.doc_id].event.start_date,
                index.documents[m.doc_id].event.end_date,
                index.documents[m.doc_id].event.label,
                m.doc_id,
            )
        )
        buckets.append(Bucket(chart_id, tuple(chart_matches)))
    buckets.sort(key=lambda b: (-b.bucket_score, b.chart_id))
    return buckets
