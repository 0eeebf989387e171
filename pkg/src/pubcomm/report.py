"""Summary tables of data-set and network sizes.

Every proportion is recomputed from its two counts at formatting time; the
report never stores a ratio.
"""
from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from typing import Mapping, Sequence

__all__ = ["SummaryReport", "fmt_count", "fmt_share", "NOT_COMPUTED"]

NOT_COMPUTED = "not computed"

# (label, count key, denominator key or None)
DATA_LINES = (
    ("# of publications", "publications", None),
    ("# of authors", "authors", None),
    ("# of 1-time authors", "one_time_authors", None),
)
NETWORK_LINES = (
    ("# of documents excl. singletons", "documents", None),
    ("# of document clusters", "document_clusters", None),
    ("# of clusters of document clusters", "topic_clusters", None),
    ("# authors after filtering", "authors_filtered", None),
    ("# of clusters", "clusters", None),
    ("# of nodes in giant (proportion)", "giant_nodes", "authors_filtered"),
    ("# of clusters in giant (proportion)", "giant_clusters", "clusters"),
    ("Average cluster size in giant (median)", None, None),
    ("# of linked clusters in collaboration network (proportion)", "linked_clusters", "giant_clusters"),
)


def fmt_count(n: int) -> str:
    return f"{int(n):,}"


def fmt_share(n: int, d: int) -> str:
    """``"6,645 (72.9%)"``: thousands separators, one decimal."""
    if not d:
        return f"{fmt_count(n)} (N.A.)"
    return f"{fmt_count(n)} ({100 * n / d:.1f}%)"


def _fmt_number(x: float) -> str:
    return f"{x:g}" if float(x).is_integer() else f"{x:.1f}"


@dataclass
class SummaryReport:
    """Line items for one or more data sets (columns)."""

    columns: dict[str, dict] = field(default_factory=dict)

    @classmethod
    def from_counts(cls, counts: Mapping) -> "SummaryReport":
        if "columns" in counts:
            return cls({str(k): dict(v) for k, v in counts["columns"].items()})
        return cls({"value": dict(counts)})

    @classmethod
    def from_json(cls, text: str) -> "SummaryReport":
        return cls.from_counts(json.loads(text))

    def _cell(self, col: Mapping, key: str | None, den: str | None) -> str:
        if key is None:
            return self._cluster_size_cell(col)
        if col.get(key) is None:
            return NOT_COMPUTED
        if den is None:
            return fmt_count(col[key])
        if col.get(den) is None:
            return NOT_COMPUTED
        return fmt_share(col[key], col[den])

    @staticmethod
    def _cluster_size_cell(col: Mapping) -> str:
        sizes: Sequence[int] | None = col.get("giant_cluster_sizes")
        if sizes:
            mean, median = statistics.fmean(sizes), statistics.median(sizes)
        elif col.get("giant_cluster_mean") is not None and col.get("giant_cluster_median") is not None:
            mean, median = col["giant_cluster_mean"], col["giant_cluster_median"]
        else:
            return NOT_COMPUTED
        return f"{mean:.1f} ({_fmt_number(median)})"

    def lines(self) -> list[tuple[str, list[str]]]:
        out = []
        for label, key, den in DATA_LINES + NETWORK_LINES:
            out.append((label, [self._cell(c, key, den) for c in self.columns.values()]))
        return out

    def as_text(self) -> str:
        names = list(self.columns)
        rows = ["\t" + "\t".join(names)]
        rows.append("Data set")
        for label, cells in self.lines()[: len(DATA_LINES)]:
            rows.append(label + "\t" + "\t".join(cells))
        rows.append("Networks")
        for label, cells in self.lines()[len(DATA_LINES):]:
            rows.append(label + "\t" + "\t".join(cells))
        return "\n".join(rows) + "\n"
