"""Topic areas from double-clustered citation networks, reference inclusion
rates and labeling metadata."""
from __future__ import annotations

import csv
import io
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Hashable, Iterable, Mapping, Sequence

from .corpus import Corpus
from .graph import Network, node_key

__all__ = [
    "TopicArea",
    "RirPoint",
    "RirSeries",
    "AreaMetadata",
    "extract_topic_areas",
    "reference_inclusion_rate",
    "rir_series",
    "rir_csv",
    "area_label_metadata",
    "inter_area_citation_network",
    "areas_to_csv",
    "areas_from_csv",
    "load_stopwords",
    "cited_ids",
]


@dataclass(frozen=True)
class TopicArea:
    area_id: int
    doc_ids: frozenset[str]
    label: str | None = None
    source_cluster: Hashable | None = None

    @property
    def size(self) -> int:
        return len(self.doc_ids)


def extract_topic_areas(
    docmap: Mapping[str, Hashable],
    total_docs: int | None = None,
    min_fraction: float = 0.02,
) -> tuple[list[TopicArea], float]:
    """Level-2 clusters holding at least ``ceil(min_fraction * total_docs)``
    documents, largest first, numbered from 1. Returns ``(areas, coverage)``."""
    if total_docs is None:
        total_docs = len(docmap)
    if total_docs <= 0:
        return [], 0.0
    # round() guards against 0.02 * 50 == 1.0000000000000002
    threshold = math.ceil(round(min_fraction * total_docs, 9))
    groups: dict[Hashable, list[str]] = {}
    for doc, cluster in docmap.items():
        groups.setdefault(cluster, []).append(doc)
    kept = [(c, docs) for c, docs in groups.items() if len(docs) >= threshold]
    kept.sort(key=lambda cd: (-len(cd[1]), min(node_key(d) for d in cd[1])))
    areas = [TopicArea(i, frozenset(docs), source_cluster=c) for i, (c, docs) in enumerate(kept, 1)]
    covered = sum(a.size for a in areas)
    return areas, covered / total_docs


def areas_to_csv(areas: Iterable[TopicArea]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["area_id", "record_id"])
    for a in areas:
        for d in sorted(a.doc_ids, key=node_key):
            w.writerow([a.area_id, d])
    return buf.getvalue()


def areas_from_csv(text: str) -> list[TopicArea]:
    groups: dict[int, set[str]] = {}
    for row in list(csv.reader(io.StringIO(text)))[1:]:
        if row:
            groups.setdefault(int(row[0]), set()).add(row[1])
    return [TopicArea(a, frozenset(d)) for a, d in sorted(groups.items())]


# ---------------------------------------------------------------------------
# reference inclusion rate


def reference_inclusion_rate(
    area: TopicArea, corpus: Corpus, year: int, window: int = 5
) -> tuple[float | None, int, int]:
    """Share of an area's references from ``year`` to the previous ``window``
    years that resolve inside ``corpus``.

    Only references with a known cited year in ``[year - window, year - 1]``
    count. Returns ``(rate, numerator, denominator)``; rate is None when the
    denominator is zero.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    num = den = 0
    lo, hi = year - window, year - 1
    for doc in area.doc_ids:
        rec = corpus.get(doc)
        if rec is None or rec.year != year:
            continue
        for ref in rec.cited_refs:
            if ref.year is None or not (lo <= ref.year <= hi):
                continue
            den += 1
            if ref.matched_record_id is not None and ref.matched_record_id in corpus:
                num += 1
    return (num / den if den else None), num, den


@dataclass(frozen=True)
class RirPoint:
    year: int
    rate: float
    numerator: int
    denominator: int


@dataclass(frozen=True)
class RirSeries:
    area_id: int
    points: tuple[RirPoint, ...]

    def rates(self) -> list[float]:
        return [p.rate for p in self.points]


def rir_series(area: TopicArea, corpus: Corpus, start: int = 1996, end: int = 2010, window: int = 5) -> RirSeries:
    if start > end:
        raise ValueError("start must be <= end")
    pts = []
    for y in range(start, end + 1):
        rate, num, den = reference_inclusion_rate(area, corpus, y, window)
        if rate is not None:
            pts.append(RirPoint(y, rate, num, den))
    return RirSeries(area.area_id, tuple(pts))


def rir_csv(series: Iterable[RirSeries]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["area", "year", "rate", "num", "den"])
    for s in series:
        for p in s.points:
            w.writerow([s.area_id, p.year, repr(p.rate), p.numerator, p.denominator])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# labeling metadata


def load_stopwords() -> frozenset[str]:
    text = resources.files("pubcomm.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#"))


_TOKEN = re.compile(r"[^0-9a-z]+")


def _top(counts: Counter, n: int) -> list[tuple[str, int]]:
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:n]


@dataclass(frozen=True)
class AreaMetadata:
    area_id: int
    size: int
    journals: list[tuple[str, int]]
    authors: list[tuple[str, int]]
    terms: list[tuple[str, int]]

    def as_text(self) -> str:
        fmt = lambda items: " ".join(f"{k} ({v})" for k, v in items)  # noqa: E731
        return (f"Area {self.area_id} ({self.size} articles)\n"
                f"  journals: {fmt(self.journals)}\n"
                f"  authors: {fmt(self.authors)}\n"
                f"  title terms: {fmt(self.terms)}\n")


def area_label_metadata(
    area: TopicArea, corpus: Corpus, top_n: int = 5, stopwords: frozenset[str] | None = None
) -> AreaMetadata:
    """Most frequent journals, authors and title terms of an area's documents.

    Ties are broken alphabetically. Labeling itself stays manual.
    """
    if stopwords is None:
        stopwords = load_stopwords()
    journals: Counter = Counter()
    authors: Counter = Counter()
    terms: Counter = Counter()
    for doc in area.doc_ids:
        rec = corpus.get(doc)
        if rec is None:
            continue
        if rec.journal:
            journals[rec.journal] += 1
        authors.update(rec.author_keys())
        for tok in _TOKEN.split(rec.title.lower()):
            if len(tok) > 1 and not tok.isdigit() and tok not in stopwords:
                terms[tok] += 1
    return AreaMetadata(area.area_id, area.size, _top(journals, top_n), _top(authors, top_n), _top(terms, top_n))


def cited_ids(rec) -> set[str]:
    """Distinct in-corpus records cited by ``rec`` (one edge per pair)."""
    return {r.matched_record_id for r in rec.cited_refs
            if r.matched_record_id is not None and r.matched_record_id != rec.record_id}


def inter_area_citation_network(areas: Sequence[TopicArea], corpus: Corpus) -> Network:
    """Directed citations between areas; weight counts document-level citations."""
    home: dict[str, int] = {}
    for a in areas:
        for d in a.doc_ids:
            if d in home:
                raise ValueError(f"document {d} in more than one area")
            home[d] = a.area_id
    weights: dict[tuple[int, int], int] = {}
    for doc, s in home.items():
        rec = corpus.get(doc)
        if rec is None:
            continue
        for cited in sorted(cited_ids(rec)):
            t = home.get(cited)
            if t is not None and t != s:
                weights[(s, t)] = weights.get((s, t), 0) + 1
    return Network(
        [a.area_id for a in areas], weights, directed=True,
        node_attrs={a.area_id: {"size": a.size} for a in areas},
    )
