"""Subpopulation-level aggregation of per-token attribution scores.

For a class and a set of documents, count per token how many documents keep
it in their retained attribution list with net positive influence and how
many with net negative influence. Scores for repeated occurrences of the
same token within one document are summed before taking the sign; an exact
zero counts in neither bucket, so cnt_pos + cnt_neg never exceeds the number
of documents mentioning the token.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from errlens.ingest import DatasetStore

__all__ = ["AggregatedAttribution", "aggregate_counts", "chart_order"]


@dataclass
class AggregatedAttribution:
    cls: str
    counts: dict[str, tuple[int, int]] = field(default_factory=dict)  # token -> (cnt_pos, cnt_neg)
    subpop_size: int = 0

    def cnt_pos(self, token: str) -> int:
        return self.counts.get(token, (0, 0))[0]

    def cnt_neg(self, token: str) -> int:
        return self.counts.get(token, (0, 0))[1]


def aggregate_counts(subpop: list[str], cls: str, store: DatasetStore) -> AggregatedAttribution:
    """Per-token (cnt_pos, cnt_neg) document counts over a subpopulation."""
    if cls not in store.classes:
        raise ValueError(f"unknown class {cls!r}")
    agg = AggregatedAttribution(cls=cls, subpop_size=len(subpop))
    counts: dict[str, list[int]] = {}
    for doc_id in subpop:
        idx = store.id_to_test_index.get(doc_id)
        if idx is None:
            raise ValueError(f"document {doc_id!r} is not a test record")
        rec = store.test_records[idx]
        net: dict[str, float] = {}
        for entry in rec.attributions.get(cls, ()):
            net[entry.token] = net.get(entry.token, 0.0) + entry.score
        for token, score in net.items():
            pair = counts.setdefault(token, [0, 0])
            if score > 0.0:
                pair[0] += 1
            elif score < 0.0:
                pair[1] += 1
    agg.counts = {t: (p, m) for t, (p, m) in counts.items()}
    return agg


def chart_order(agg: AggregatedAttribution) -> list[str]:
    """Column order for the aggregated bar chart.

    Sorted by cnt_pos descending when positive mentions dominate overall
    (ties included), by cnt_neg descending otherwise; ties break on the
    token string.
    """
    total_pos = sum(p for p, _ in agg.counts.values())
    total_neg = sum(m for _, m in agg.counts.values())
    col = 0 if total_pos >= total_neg else 1
    return sorted(agg.counts, key=lambda t: (-agg.counts[t][col], t))
