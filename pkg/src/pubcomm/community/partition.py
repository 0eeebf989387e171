"""Node-to-cluster assignments and partition similarity."""
from __future__ import annotations

import csv
import io
import math
from collections import Counter
from types import MappingProxyType
from typing import Hashable, Iterable, Mapping

from ..graph import node_key

__all__ = ["Partition", "nmi"]


class Partition:
    """Assignment of node ids to cluster ids.

    ``canonical()`` relabels clusters ``0..k-1`` in order of first appearance
    over ascending node ids, which makes equal groupings compare equal.
    """

    __slots__ = ("assignment", "canonical_form")

    def __init__(self, assignment: Mapping[Hashable, Hashable], canonical: bool = False):
        self.assignment = MappingProxyType(dict(sorted(assignment.items(), key=lambda kv: node_key(kv[0]))))
        self.canonical_form = canonical

    @classmethod
    def from_clusters(cls, clusters: Iterable[Iterable[Hashable]]) -> "Partition":
        return cls({n: i for i, members in enumerate(clusters) for n in members}).canonical()

    @classmethod
    def singletons(cls, nodes: Iterable[Hashable]) -> "Partition":
        return cls({n: i for i, n in enumerate(sorted(nodes, key=node_key))}, canonical=True)

    def __len__(self) -> int:
        return len(self.assignment)

    def __getitem__(self, node: Hashable) -> Hashable:
        return self.assignment[node]

    def __contains__(self, node: object) -> bool:
        return node in self.assignment

    def __iter__(self):
        return iter(self.assignment)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.encoding() == other.encoding() and set(self.assignment) == set(other.assignment)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"<Partition nodes={len(self)} clusters={self.num_clusters}>"

    @property
    def nodes(self) -> tuple:
        return tuple(self.assignment)

    @property
    def num_clusters(self) -> int:
        return len(set(self.assignment.values()))

    def canonical(self) -> "Partition":
        relabel: dict[Hashable, int] = {}
        out = {}
        for n, c in self.assignment.items():
            out[n] = relabel.setdefault(c, len(relabel))
        return Partition(out, canonical=True)

    def encoding(self) -> tuple[int, ...]:
        """Canonical labels in ascending node order; comparable across runs."""
        relabel: dict[Hashable, int] = {}
        return tuple(relabel.setdefault(c, len(relabel)) for c in self.assignment.values())

    def clusters(self) -> dict[Hashable, list]:
        out: dict[Hashable, list] = {}
        for n, c in self.assignment.items():
            out.setdefault(c, []).append(n)
        return out

    def sizes(self) -> Counter:
        return Counter(self.assignment.values())

    def restrict(self, nodes: Iterable[Hashable]) -> "Partition":
        keep = set(nodes)
        return Partition({n: c for n, c in self.assignment.items() if n in keep})

    def compose(self, upper: "Partition") -> "Partition":
        """Map each node through ``self`` then through ``upper`` (a partition of clusters)."""
        return Partition({n: upper[c] for n, c in self.assignment.items()})

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node_id", "cluster_id"])
        for n, c in self.assignment.items():
            w.writerow([n, c])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, node_type=str) -> "Partition":
        rows = list(csv.reader(io.StringIO(text)))
        out = {}
        for row in rows[1:]:
            if row:
                out[node_type(row[0])] = int(row[1])
        return cls(out)


def _entropy(counts: Iterable[int], n: int) -> float:
    return -sum(c / n * math.log(c / n) for c in counts if c)


def nmi(a: Partition, b: Partition) -> float:
    """Normalized mutual information, arithmetic-mean normalization."""
    if set(a.assignment) != set(b.assignment):
        raise ValueError("partitions cover different node sets")
    n = len(a)
    if n == 0:
        raise ValueError("empty partitions")
    joint = Counter((a[x], b[x]) for x in a.assignment)
    ca, cb = a.sizes(), b.sizes()
    ha, hb = _entropy(ca.values(), n), _entropy(cb.values(), n)
    if ha + hb == 0:
        return 1.0
    mi = sum(c / n * math.log(c * n / (ca[i] * cb[j])) for (i, j), c in joint.items())
    return min(1.0, max(0.0, 2 * mi / (ha + hb)))
