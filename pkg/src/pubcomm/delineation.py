"""Recall and precision checks for a lexical field-delineation query."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from typing import Sequence

from .affinity import AssociationMatrix, association_matrix, heatmap_csv, residual_table_csv
from .community import detect_communities, double_cluster
from .community.partition import Partition
from .corpus import BiblioRecord, Corpus, normalize_corpus
from .graph import Network, build_citation_graph, components, node_key
from .topics import TopicArea, extract_topic_areas

log = logging.getLogger(__name__)

__all__ = [
    "RecallCluster",
    "RecallReport",
    "PrecisionReport",
    "self_citation_network",
    "recall_report",
    "precision_report",
    "precision_from_areas",
]


def self_citation_network(pubs: Sequence[BiblioRecord]) -> Network:
    """Directed, unweighted citations among one researcher's publications."""
    if not pubs:
        raise ValueError("researcher has no publications")
    own = normalize_corpus(pubs)
    edges = {}
    for rec in own:
        for ref in rec.cited_refs:
            if ref.matched_record_id is not None:
                edges[(rec.record_id, ref.matched_record_id)] = 1
    return Network([r.record_id for r in own], edges, directed=True)


@dataclass(frozen=True)
class RecallCluster:
    cluster_id: int
    size: int
    in_field: int
    overlap: float
    sample_titles: tuple[str, ...]


@dataclass(frozen=True)
class RecallReport:
    researcher_id: str
    clusters: tuple[RecallCluster, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["researcher", "cluster", "docs", "in_field", "overlap", "sample_titles"])
        for c in self.clusters:
            w.writerow([self.researcher_id, c.cluster_id, c.size, c.in_field,
                        f"{c.overlap:.4f}", " | ".join(c.sample_titles)])
        return buf.getvalue()

    def as_text(self) -> str:
        lines = [f"# recall check for {self.researcher_id} (weakest clusters first)"]
        for c in self.clusters:
            lines.append(f"cluster {c.cluster_id}: {c.in_field}/{c.size} in field (overlap {c.overlap:.3f})")
            lines.extend(f"    {t}" for t in c.sample_titles)
        return "\n".join(lines) + "\n"


def recall_report(
    pubs: Sequence[BiblioRecord],
    field_corpus: Corpus,
    seed: int = 0,
    trials: int = 20,
    researcher_id: str = "researcher",
    n_titles: int = 3,
) -> RecallReport:
    """Cluster a researcher's self-citation network and rank the clusters by
    how much of each the field corpus already holds."""
    net = self_citation_network(pubs)
    if net.edges:
        part, _ = detect_communities(net, seed, trials)
    else:
        part = Partition.singletons(net.nodes)
    titles = {r.record_id: r.title for r in pubs}
    out = []
    for cid, docs in part.clusters().items():
        docs = sorted(docs, key=node_key)
        inside = sum(1 for d in docs if d in field_corpus)
        sample = tuple(titles[d] for d in docs[:n_titles])
        out.append(RecallCluster(int(cid), len(docs), inside, inside / len(docs), sample))
    out.sort(key=lambda c: (c.overlap, c.cluster_id))
    return RecallReport(researcher_id, tuple(out))


@dataclass(frozen=True)
class PrecisionReport:
    areas: tuple[TopicArea, ...]
    matrix: AssociationMatrix
    affinity: Network
    components: tuple[frozenset, ...]

    @property
    def disjoint_flag(self) -> bool:
        return len(self.components) > 1

    def as_text(self) -> str:
        lines = [f"# precision check over the {len(self.areas)} largest topic areas"]
        lines.append("areas: " + ", ".join(f"{a.area_id} ({a.size} docs)" for a in self.areas))
        lines.append("affinity components: " + "; ".join(
            "{" + ", ".join(str(x) for x in sorted(c)) + "}" for c in self.components))
        lines.append(f"disjoint: {'yes, reconsider query terms' if self.disjoint_flag else 'no'}")
        return "\n".join(lines) + "\n"

    def heatmap_csv(self) -> str:
        return heatmap_csv(self.matrix)

    def residual_csv(self) -> str:
        return residual_table_csv(self.matrix)


def precision_from_areas(areas: Sequence[TopicArea], corpus: Corpus, top_k: int = 4) -> PrecisionReport:
    if len(areas) < 2:
        raise ValueError("precision check needs at least two topic areas")
    ranked = sorted(areas, key=lambda a: (-a.size, a.area_id))
    if len(ranked) < top_k:
        log.warning("only %d topic areas available, wanted %d", len(ranked), top_k)
    top = ranked[:top_k]
    m = association_matrix(top, corpus, "author_activity")
    aff = m.affinity_network()
    comps = tuple(frozenset(c) for c in components(aff))
    return PrecisionReport(tuple(top), m, aff, comps)


def precision_report(
    field_corpus: Corpus,
    top_k: int = 4,
    seed: int = 0,
    trials: int = 20,
    min_fraction: float = 0.02,
) -> PrecisionReport:
    """Topic areas from the citation network, then author-activity affinity
    among the ``top_k`` largest; more than one component suggests the query
    pulled in a neighbouring field."""
    net = build_citation_graph(field_corpus)
    if not net.edges:
        raise ValueError("citation network has no edges")
    dc = double_cluster(net, seed, trials)
    areas, _ = extract_topic_areas(dc.docmap, len(net.nodes), min_fraction)
    return precision_from_areas(areas, field_corpus, top_k)
