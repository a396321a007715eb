"""Label families, facet checkbox trees, and the angle-range hierarchy.

A label family is a base descriptor ("soaring") plus its modifier
variants ("slow soaring", "fast soaring"); families back the nested
checkbox filters.  Separately, interquartile ranges of the per-label
angle distributions suggest hypernym/hyponym edges: a broader label whose
IQR contains another's subsumes it fully, while a substantial overlap
yields a partial edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .labelmodels import LabelStats
from .labeling import KIND_COMPOUND, LabeledEvent

FLAT_THRESHOLD_DEGREES = 10.0
PARTIAL_OVERLAP_FRACTION = 0.5

EDGE_FULL = "full"
EDGE_PARTIAL = "partial"

_SELECTORS = ("+slope", "-slope", "flat")


@dataclass
class FacetNode:
    """One checkbox in the facet sidebar."""

    label: str
    match_count: int = 0
    checked: bool = True
    children: list["FacetNode"] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "match_count": self.match_count,
            "checked": self.checked,
            "children": [c.as_dict() for c in self.children],
        }


@dataclass(frozen=True)
class SubsumptionEdge:
    hypernym: str
    hyponym: str
    kind: str  # EDGE_FULL | EDGE_PARTIAL


def descriptor_of(label: str, kind: str) -> str:
    """Base descriptor text of a label; compound labels drop the modifier."""
    words = label.lower().split()
    if kind == KIND_COMPOUND and len(words) > 1:
        return " ".join(words[1:])
    return label.lower()


def build_facet_tree(events: list[LabeledEvent]) -> list[FacetNode]:
    """Group matched labels into family trees with per-node match counts.

    The base label is the parent and modifier variants are children; a
    family whose only member is the base renders as a leaf.  Parent counts
    include all descendant events.
    """
    own_counts: dict[str, int] = {}
    families: dict[str, dict[str, int]] = {}
    for e in events:
        base = descriptor_of(e.label, e.kind)
        label = e.label.lower()
        families.setdefault(base, {})
        if label == base:
            own_counts[base] = own_counts.get(base, 0) + 1
        else:
            variants = families[base]
            variants[label] = variants.get(label, 0) + 1
    roots = []
    for base in families:
        children = [
            FacetNode(label=v, match_count=c)
            for v, c in sorted(families[base].items())
        ]
        total = own_counts.get(base, 0) + sum(c.match_count for c in children)
        roots.append(FacetNode(label=base, match_count=total, children=children))
    roots.sort(key=lambda n: (-n.match_count, n.label))
    return roots


def family_of(
    term: str, label_kinds: dict[str, str]
) -> set[str]:
    """All labels sharing ``term``'s descriptor; empty if unknown.

    A modifier word ("slowly") falls back to every label containing it.
    """
    term = term.lower()
    by_descriptor: dict[str, set[str]] = {}
    for label, kind in label_kinds.items():
        by_descriptor.setdefault(descriptor_of(label, kind), set()).add(label.lower())
    if term in by_descriptor:
        return set(by_descriptor[term])
    for label, kind in label_kinds.items():
        if label.lower() == term:
            return set(by_descriptor[descriptor_of(label, kind)])
    containing = {
        label.lower() for label in label_kinds if term in label.lower().split()
    }
    return containing


def related_labels(
    term: str,
    label_kinds: dict[str, str],
    stats: dict[str, LabelStats],
    synonyms: dict[str, list[str]],
    flat_threshold: float = FLAT_THRESHOLD_DEGREES,
) -> set[str]:
    """Labels related to a query term.

    Vocabulary terms map to their own family.  Other terms resolve through
    the synonym table, whose entries are either vocabulary tokens or slope
    family selectors ("+slope", "-slope", "flat") evaluated against each
    label's peak-density angle.  Unresolvable terms yield an empty set.
    """
    term = term.lower()
    direct = family_of(term, label_kinds)
    if direct:
        return direct
    out: set[str] = set()
    for entry in synonyms.get(term, ()):
        if entry in _SELECTORS:
            for label, s in stats.items():
                if label not in label_kinds:
                    continue
                if entry == "+slope" and s.mode > flat_threshold:
                    out |= family_of(label, label_kinds)
                elif entry == "-slope" and s.mode < -flat_threshold:
                    out |= family_of(label, label_kinds)
                elif entry == "flat" and abs(s.mode) <= flat_threshold:
                    out |= family_of(label, label_kinds)
        else:
            out |= family_of(entry, label_kinds)
    return out


def derive_hierarchy(
    stats: list[LabelStats],
    partial_overlap: float = PARTIAL_OVERLAP_FRACTION,
) -> list[SubsumptionEdge]:
    """Hypernym edges from IQR containment and overlap.

    Full edges require the hyponym's IQR to sit inside the hypernym's
    (identical IQRs produce mutual full edges, flagging synonym
    candidates).  Otherwise an overlap of at least ``partial_overlap`` of
    the hyponym's IQR width yields a partial edge.
    """
    edges = []
    for hyper in stats:
        for hypo in stats:
            if hyper.label == hypo.label:
                continue
            if hyper.iqr_low <= hypo.iqr_low and hypo.iqr_high <= hyper.iqr_high:
                edges.append(SubsumptionEdge(hyper.label, hypo.label, EDGE_FULL))
                continue
            overlap = min(hyper.iqr_high, hypo.iqr_high) - max(hyper.iqr_low, hypo.iqr_low)
            if hypo.iqr_width > 0 and overlap >= partial_overlap * hypo.iqr_width:
                edges.append(SubsumptionEdge(hyper.label, hypo.label, EDGE_PARTIAL))
    edges.sort(key=lambda e: (e.hypernym, e.hyponym))
    return edges


def expand_exclusions(tree: list[FacetNode], excluded: set[str]) -> set[str]:
    """Close an exclusion set over facet-tree descendants."""
    excluded = {e.lower() for e in excluded}
    out = set(excluded)

    def walk(node: FacetNode, under_excluded: bool) -> None:
        hit = under_excluded or node.label in excluded
        if hit:
            out.add(node.label)
        for child in node.children:
            walk(child, hit)

    for root in tree:
        walk(root, False)
    return out


def apply_checkbox_state(tree: list[FacetNode], excluded: set[str]) -> None:
    """Mark tree checkboxes to mirror an exclusion set (parents cascade)."""
    closed = expand_exclusions(tree, excluded)

    def walk(node: FacetNode) -> None:
        node.checked = node.label not in closed
        for child in node.children:
            walk(child)

    for root in tree:
        walk(root)
