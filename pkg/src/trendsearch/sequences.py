"""Multi-slot trend-sequence matching with partial-match penalties.

A sequence query like "up, flat, down" retrieves each slot independently
and then joins matches within a chart into chronological, non-overlapping
chains whose inter-event gaps stay within a tunable day budget.  Partial
matches cover every contiguous in-order sub-sequence; their scores decay
quadratically with missing slots and with the offset of the first matched
slot.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .search import Index, ScoredMatch

DEFAULT_MAX_GAP_DAYS = 14

# Per-slot display colors, cycling after the third slot.
SLOT_PALETTE = ("#d62728", "#1f77b4", "#2ca02c")


@dataclass(frozen=True)
class SequenceMatch:
    """One chain of events matching a (sub-)sequence of query slots."""

    chart_id: str
    events: tuple[ScoredMatch, ...]
    slot_indices: tuple[int, ...]
    query_length: int

    @property
    def matched_length(self) -> int:
        return len(self.events)

    @property
    def offset(self) -> int:
        return self.slot_indices[0]

    @property
    def base_score(self) -> float:
        return sum(e.composite for e in self.events)

    @property
    def score(self) -> float:
        return penalized_score(
            self.base_score, self.matched_length, self.query_length, self.offset
        )


@dataclass(frozen=True)
class SequenceBucket:
    """Per-chart group of sequence matches; same ranking math as buckets."""

    chart_id: str
    matches: tuple[SequenceMatch, ...]

    @property
    def bucket_score(self) -> float:
        return sum(m.score for m in self.matches)


def penalized_score(
    base_score: float, matched_length: int, query_length: int, offset: int
) -> float:
    """Down-weight partial matches: base * (matched / (query + offset))^2."""
    if not 1 <= matched_length <= query_length:
        raise ValueError("matched length must be in [1, query length]")
    if offset < 0:
        raise ValueError("offset must be non-negative")
    ratio = matched_length / (query_length + offset)
    return base_score * ratio * ratio


def enumerate_subsequences(slot_count: int) -> list[tuple[tuple[int, ...], int]]:
    """All contiguous in-order slot runs, longest first, with their offset."""
    if slot_count < 1:
        raise ValueError("need at least one slot")
    out = []
    for length in range(slot_count, 0, -1):
        for start in range(slot_count - length + 1):
            indices = tuple(range(start, start + length))
            out.append((indices, start))
    return out


def join_sequences(
    index: Index,
    per_slot_matches: list[list[ScoredMatch]],
    slot_indices: tuple[int, ...],
    query_length: int,
    max_gap_days: int = DEFAULT_MAX_GAP_DAYS,
) -> list[SequenceMatch]:
    """Chains of one event per sub-sequence slot within each chart.

    Chains are chronological and non-overlapping, with each event starting
    within ``max_gap_days`` of the previous event's end.  Every valid
    chain is enumerated, then collapsed to the best-scoring chain per
    (chart, first-event start date).
    """
    if max_gap_days < 0:
        raise ValueError("max gap must be non-negative")
    per_chart: dict[str, list[list[ScoredMatch]]] = {}
    for position, slot in enumerate(slot_indices):
        for m in per_slot_matches[slot]:
            chart_id = index.documents[m.doc_id].event.chart_id
            chart_slots = per_chart.setdefault(
                chart_id, [[] for _ in slot_indices]
            )
            chart_slots[position].append(m)

    out: list[SequenceMatch] = []
    for chart_id in sorted(per_chart):
        chart_slots = per_chart[chart_id]
        if any(not slot for slot in chart_slots):
            continue
        for slot in chart_slots:
            slot.sort(key=lambda m: (index.documents[m.doc_id].event.start_date, m.doc_id))
        chains = _enumerate_chains(index, chart_slots, max_gap_days)
        best: dict = {}
        for chain in chains:
            first_start = index.documents[chain[0].doc_id].event.start_date
            score = sum(m.composite for m in chain)
            ids = tuple(m.doc_id for m in chain)
            current = best.get(first_start)
            if current is None or score > current[1] or (score == current[1] and ids < current[2]):
                best[first_start] = (chain, score, ids)
        for first_start in sorted(best):
            chain, _, _ = best[first_start]
            events = tuple(
                ScoredMatch(
                    doc_id=m.doc_id,
                    matched_tokens=m.matched_tokens,
                    label_score=m.label_score,
                    saliency=m.saliency,
                    slot_index=slot_indices[pos],
                )
                for pos, m in enumerate(chain)
            )
            out.append(
                SequenceMatch(
                    chart_id=chart_id,
                    events=events,
                    slot_indices=slot_indices,
                    query_length=query_length,
                )
            )
    return out


def _enumerate_chains(
    index: Index, chart_slots: list[list[ScoredMatch]], max_gap_days: int
) -> list[list[ScoredMatch]]:
    slot_starts = [
        [index.documents[m.doc_id].event.start_date for m in slot]
        for slot in chart_slots
    ]
    chains: list[list[ScoredMatch]] = []
    stack: list[ScoredMatch] = []

    def extend(position: int) -> None:
        if position == len(chart_slots):
            chains.append(list(stack))
            return
        candidates = chart_slots[position]
        if not stack:
            eligible = range(len(candidates))
        else:
            prev_end = index.documents[stack[-1].doc_id].event.end_date
            lo = bisect.bisect_left(slot_starts[position], prev_end)
            eligible = range(lo, len(candidates))
        for i in eligible:
            m = candidates[i]
            start = slot_starts[position][i]
            if stack:
                gap = (start - index.documents[stack[-1].doc_id].event.end_date).days
                if gap > max_gap_days:
                    break  # starts are sorted; later ones only grow the gap
                if gap < 0:
                    continue
            stack.append(m)
            extend(position + 1)
            stack.pop()

    extend(0)
    return chains


def search_sequence(
    index: Index,
    per_slot_matches: list[list[ScoredMatch]],
    max_gap_days: int = DEFAULT_MAX_GAP_DAYS,
) -> list[SequenceMatch]:
    """All full and partial sequence matches for per-slot results."""
    query_length = len(per_slot_matches)
    matches: list[SequenceMatch] = []
    for slot_indices, _offset in enumerate_subsequences(query_length):
        matches.extend(
            join_sequences(index, per_slot_matches, slot_indices, query_length, max_gap_days)
        )
    return matches


def bucket_sequences(matches: list[SequenceMatch]) -> list[SequenceBucket]:
    """Group sequence matches per chart and rank by summed penalized score."""
    by_chart: dict[str, list[SequenceMatch]] = {}
    for m in matches:
        by_chart.setdefault(m.chart_id, []).append(m)
    buckets = []
    for chart_id, chart_matches in by_chart.items():
        chart_matches.sort(
            key=lambda m: (
                -m.score,
                -m.matched_length,
                m.offset,
                tuple(e.doc_id for e in m.events),
            )
        )
        buckets.append(SequenceBucket(chart_id, tuple(chart_matches)))
    buckets.sort(key=lambda b: (-b.bucket_score, b.chart_id))
    return buckets


def slot_color(slot_index: int) -> str:
    return SLOT_PALETTE[slot_index % len(SLOT_PALETTE)]
