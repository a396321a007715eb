"""Rule-based parser mapping a raw trend query to its structured form.

The parser assigns every input token one of five roles: stop phrase,
trend term, chart attribute, date phrase, or inexact leftover.  Sequence
queries are split on "then" and on commas whose both sides carry trend
terms.  All rule tables (stop phrases, synonyms, irregular verb forms)
are plain data so behavior is auditable and editable without code
changes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import date
from importlib import resources

MONTHS = (
    "january", "february", "march", "april", "may", "june",
    "july", "august", "september", "october", "november", "december",
)
MONTH_NUMBER = {name: i + 1 for i, name in enumerate(MONTHS)}
DATE_PREPOSITIONS = {"before", "after", "since", "in", "during"}
SEQUENCE_SEPARATOR = "then"

# Multi-token rewrites applied before any other rule, longest first.
PHRASE_REWRITES = (
    (("went", "up"), ("up",)),
    (("go", "up"), ("up",)),
    (("goes", "up"), ("up",)),
    (("going", "up"), ("up",)),
    (("gone", "up"), ("up",)),
    (("went", "down"), ("down",)),
    (("go", "down"), ("down",)),
    (("goes", "down"), ("down",)),
    (("going", "down"), ("down",)),
    (("gone", "down"), ("down",)),
    (("went", "bust"), ("tanking",)),
    (("highest", "point"), ("maximum",)),
    (("lowest", "point"), ("minimum",)),
)

# Verb forms the suffix rules cannot reach.
IRREGULAR_GERUNDS = {
    "fell": "falling",
    "rose": "rising",
    "grew": "growing",
    "sank": "sinking",
    "sunk": "sinking",
    "shrank": "shrinking",
    "lost": "losing",
    "dove": "diving",
    "ran": "running",
}

_YEAR_RE = re.compile(r"^(1[0-9]{3}|2[0-9]{3})$")


class QueryParseError(ValueError):
    """Raised when a query carries no usable content."""


@dataclass(frozen=True)
class DateRange:
    """Half-open [gte, lt) date window; either side may be open."""

    gte: date | None = None
    lt: date | None = None

    def __post_init__(self) -> None:
        if self.gte is not None and self.lt is not None and self.gte >= self.lt:
            raise QueryParseError(f"empty date range {self.gte}..{self.lt}")

    def as_dict(self) -> dict[str, str]:
        out = {}
        if self.gte is not None:
            out["gte"] = self.gte.isoformat()
        if self.lt is not None:
            out["lt"] = self.lt.isoformat()
        return out


@dataclass(frozen=True)
class ParsedQuery:
    """Structured query: event type, slot terms, attribute, date window."""

    event_type: str  # "single" | "sequence"
    trend_terms: tuple[tuple[str, ...], ...]
    attr: str | None = None       # resolved chart id
    attr_text: str | None = None  # alias text as it appeared in the query
    date_range: DateRange | None = None
    inexact_terms: tuple[str, ...] = ()

    def as_query_dict(self) -> dict:
        """Compact dict form; single queries flatten their one slot."""
        out: dict = {"event_type": self.event_type}
        if self.event_type == "single":
            out["trend_terms"] = list(self.trend_terms[0])
        else:
            out["trend_terms"] = [list(slot) for slot in self.trend_terms]
        if self.attr_text is not None:
            out["attr"] = self.attr_text
        if self.date_range is not None:
            out["date_range"] = self.date_range.as_dict()
        return out


def load_default_synonyms() -> dict[str, list[str]]:
    text = resources.files("trendsearch.data").joinpath("synonyms.json").read_text("utf-8")
    return json.loads(text)


def load_default_stop_phrases() -> list[str]:
    text = resources.files("trendsearch.data").joinpath("stop_phrases.txt").read_text("utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]


def _month_start(year: int, month: int) -> date:
    return date(year, month, 1)


def _next_month(year: int, month: int) -> date:
    if month == 12:
        return date(year + 1, 1, 1)
    return date(year, month + 1, 1)


def parse_date_range(phrase: str) -> DateRange | None:
    """Parse one supported date phrase, or None if the grammar misses.

    Grammar: (before|after|since|in|during) + optional month + year, or a
    bare year.  "before" is strict (year-only means before Jan 1), and
    "after"/"since" start the month (or year) following the named one.
    """
    tokens = phrase.lower().split()
    if not tokens:
        return None
    prep = tokens[0] if tokens[0] in DATE_PREPOSITIONS else None
    rest = tokens[1:] if prep else tokens
    month: int | None = None
    year: int | None = None
    for tok in rest:
        if tok in MONTH_NUMBER and month is None:
            month = MONTH_NUMBER[tok]
        elif _YEAR_RE.match(tok) and year is None:
            year = int(tok)
        else:
            return None
    if year is None:
        return None
    if prep == "before":
        return DateRange(lt=_month_start(year, month) if month else date(year, 1, 1))
    if prep in ("after", "since"):
        if month:
            return DateRange(gte=_next_month(year, month))
        return DateRange(gte=date(year + 1, 1, 1))
    # "in" / "during" / bare year: the named month or whole year.
    if month:
        return DateRange(gte=_month_start(year, month), lt=_next_month(year, month))
    return DateRange(gte=date(year, 1, 1), lt=date(year + 1, 1, 1))


def _merge_ranges(a: DateRange | None, b: DateRange) -> DateRange:
    """Intersect two windows (tightest gte, tightest lt)."""
    if a is None:
        return b
    gte = max(filter(None, (a.gte, b.gte)), default=None)
    lt = min(filter(None, (a.lt, b.lt)), default=None)
    return DateRange(gte=gte, lt=lt)


def gerund(token: str) -> str:
    """Map a verb form to its -ing form by fixed suffix rules."""
    if token in IRREGULAR_GERUNDS:
        return IRREGULAR_GERUNDS[token]
    if token.endswith("ied") and len(token) > 4:
        return token[:-3] + "ying"
    if token.endswith("ed") and len(token) > 3:
        return token[:-2] + "ing"
    if token.endswith("es") and len(token) > 3 and token[-3] in "shxz":
        return token[:-2] + "ing"
    if token.endswith("s") and len(token) > 2:
        stem = token[:-1]
        if stem.endswith("e") and not stem.endswith("ee"):
            stem = stem[:-1]
        return stem + "ing"
    return token


class QueryParser:
    """Tokenizer and role assigner over a fixed vocabulary and alias map."""

    def __init__(
        self,
        vocabulary: set[str],
        alias_map: dict[str, str] | None = None,
        synonyms: dict[str, list[str]] | None = None,
        stop_phrases: list[str] | None = None,
    ) -> None:
        self.vocabulary = {w.lower() for w in vocabulary}
        self.alias_map = {
            alias.lower(): chart_id for alias, chart_id in (alias_map or {}).items()
        }
        self.synonyms = synonyms if synonyms is not None else load_default_synonyms()
        stop = stop_phrases if stop_phrases is not None else load_default_stop_phrases()
        self.stop_words = {p for p in stop if " " not in p}
        self.stop_sequences = sorted(
            (tuple(p.split()) for p in stop if " " in p), key=len, reverse=True
        )
        self._alias_tokens = sorted(
            (tuple(a.split()) for a in self.alias_map), key=len, reverse=True
        )

    def parse(self, raw: str) -> ParsedQuery:
        tokens = self._tokenize(raw)
        tokens = self._apply_phrase_rewrites(tokens)
        tokens, attr, attr_text = self._extract_attr(tokens)
        tokens, date_range, bad_date_phrases = self._extract_dates(tokens)
        slots, inexact = self._build_slots(tokens)
        inexact.extend(bad_date_phrases)
        slots = [slot for slot in slots if slot] or [[]]
        has_terms = any(slot for slot in slots)
        if not has_terms and attr is None and date_range is None:
            raise QueryParseError("no query terms")
        event_type = "sequence" if len(slots) >= 2 else "single"
        return ParsedQuery(
            event_type=event_type,
            trend_terms=tuple(tuple(slot) for slot in slots),
            attr=attr,
            attr_text=attr_text,
            date_range=date_range,
            inexact_terms=tuple(dict.fromkeys(inexact)),
        )

    def render(self, parsed: ParsedQuery) -> str:
        """Canonical text form that re-parses to the same structure."""
        parts = [" ".join(slot) for slot in parsed.trend_terms]
        text = " then ".join(p for p in parts if p)
        if parsed.attr_text:
            text = f"{text} {parsed.attr_text}".strip()
        if parsed.date_range:
            text = f"{text} {self._render_range(parsed.date_range)}".strip()
        return text

    @staticmethod
    def _render_range(r: DateRange) -> str:
        phrases = []
        if r.gte is not None and r.lt is not None:
            if r.gte == date(r.gte.year, 1, 1) and r.lt == date(r.gte.year + 1, 1, 1):
                return f"in {r.gte.year}"
            if r.gte.day == 1 and r.lt == _next_month(r.gte.year, r.gte.month):
                return f"in {MONTHS[r.gte.month - 1]} {r.gte.year}"
        if r.gte is not None:
            if r.gte.month == 1 and r.gte.day == 1:
                phrases.append(f"after {r.gte.year - 1}")
            else:
                phrases.append(f"after {MONTHS[r.gte.month - 2]} {r.gte.year}")
        if r.lt is not None:
            if r.lt.month == 1 and r.lt.day == 1:
                phrases.append(f"before {r.lt.year}")
            else:
                phrases.append(f"before {MONTHS[r.lt.month - 1]} {r.lt.year}")
        return " ".join(phrases)

    @staticmethod
    def _tokenize(raw: str) -> list[str]:
        text = raw.lower()
        text = re.sub(r"[,]", " , ", text)
        text = re.sub(r"[^a-z0-9, ]+", " ", text)
        return [t for t in text.split() if t]

    @staticmethod
    def _apply_phrase_rewrites(tokens: list[str]) -> list[str]:
        out: list[str] = []
        i = 0
        while i < len(tokens):
            for pattern, replacement in PHRASE_REWRITES:
                if tuple(tokens[i : i + len(pattern)]) == pattern:
                    out.extend(replacement)
                    i += len(pattern)
                    break
            else:
                out.append(tokens[i])
                i += 1
        return out

    def _extract_attr(
        self, tokens: list[str]
    ) -> tuple[list[str], str | None, str | None]:
        attr = attr_text = None
        out: list[str] = []
        i = 0
        while i < len(tokens):
            matched = False
            for alias in self._alias_tokens:
                if tuple(tokens[i : i + len(alias)]) == alias:
                    if attr is None:
                        attr_text = " ".join(alias)
                        attr = self.alias_map[attr_text]
                    i += len(alias)
                    matched = True
                    break
            if not matched:
                out.append(tokens[i])
                i += 1
        return out, attr, attr_text

    def _extract_dates(
        self, tokens: list[str]
    ) -> tuple[list[str], DateRange | None, list[str]]:
        out: list[str] = []
        bad_phrases: list[str] = []
        merged: DateRange | None = None
        i = 0
        while i < len(tokens):
            tok = tokens[i]
            if tok in DATE_PREPOSITIONS:
                for width in (3, 2):  # prep month year | prep year
                    phrase = tokens[i : i + width]
                    parsed = parse_date_range(" ".join(phrase)) if len(phrase) == width else None
                    if parsed is not None:
                        try:
                            merged = _merge_ranges(merged, parsed)
                        except QueryParseError:
                            bad_phrases.append(" ".join(phrase))
                        i += width
                        break
                else:
                    out.append(tok)
                    i += 1
            elif _YEAR_RE.match(tok):
                parsed = parse_date_range(tok)
                try:
                    merged = _merge_ranges(merged, parsed)
                except QueryParseError:
                    bad_phrases.append(tok)
                i += 1
            else:
                out.append(tok)
                i += 1
        return out, merged, bad_phrases

    def _build_slots(self, tokens: list[str]) -> tuple[list[list[str]], list[str]]:
        tokens = self._strip_stop_sequences(tokens)
        parts = self._split_sequence(tokens)
        slots: list[list[str]] = []
        inexact: list[str] = []
        for part in parts:
            slot: list[str] = []
            for tok in part:
                if tok in self.stop_words or tok == ",":
                    continue
                term, is_exact = self._resolve_term(tok)
                slot.append(term)
                if not is_exact:
                    inexact.append(term)
            slots.append(slot)
        return slots, inexact

    def _strip_stop_sequences(self, tokens: list[str]) -> list[str]:
        out: list[str] = []
        i = 0
        while i < len(tokens):
            for seq in self.stop_sequences:
                if tuple(tokens[i : i + len(seq)]) == seq:
                    i += len(seq)
                    break
            else:
                out.append(tokens[i])
                i += 1
        return out

    def _split_sequence(self, tokens: list[str]) -> list[list[str]]:
        parts: list[list[str]] = [[]]
        for i, tok in enumerate(tokens):
            if tok == SEQUENCE_SEPARATOR:
                parts.append([])
            elif tok == "," and self._comma_splits(tokens, i):
                parts.append([])
            else:
                parts[-1].append(tok)
        return parts

    def _comma_splits(self, tokens: list[str], i: int) -> bool:
        """A comma separates slots only between two trend-term tokens."""
        left = next(
            (t for t in reversed(tokens[:i]) if t not in (",", SEQUENCE_SEPARATOR)),
            None,
        )
        right = next(
            (t for t in tokens[i + 1 :] if t not in (",", SEQUENCE_SEPARATOR)), None
        )
        return (
            left is not None
            and right is not None
            and self._is_trend_like(left)
            and self._is_trend_like(right)
        )

    def _is_trend_like(self, token: str) -> bool:
        return token not in self.stop_words

    def _resolve_term(self, token: str) -> tuple[str, bool]:
        """Return the term to search for and whether it matched exactly."""
        if token in self.vocabulary:
            return token, True
        lemma = gerund(token)
        if lemma in self.vocabulary:
            return lemma, True
        if token in self.synonyms:
            return token, False
        if lemma in self.synonyms:
            return lemma, False
        return lemma, False
