"""Co-author and citation networks, component statistics, exporters."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from itertools import combinations
from types import MappingProxyType
from typing import Any, Hashable, Iterable, Mapping

import networkx as nx

from .corpus import AuthorTable, Corpus

__all__ = [
    "Network",
    "ComponentStats",
    "node_key",
    "build_coauthor_graph",
    "build_citation_graph",
    "component_stats",
    "components",
    "write_graphml",
    "write_dot",
    "write_edgelist_csv",
]


def node_key(node: Hashable) -> tuple:
    """Total order over mixed int/str node ids."""
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        return (1, str(node))
    return (0, node)


class Network:
    """Immutable weighted graph over opaque node ids.

    Undirected edges are stored once, under ``(u, v)`` with ``u`` before ``v``
    in :func:`node_key` order. Self-loops and non-positive weights are rejected.
    """

    __slots__ = ("directed", "nodes", "edges", "node_attrs", "edge_attrs",
                 "_index", "_succ", "_pred")

    def __init__(
        self,
        nodes: Iterable[Hashable],
        edges: Mapping[tuple, float] | Iterable[tuple],
        directed: bool = False,
        node_attrs: Mapping[Hashable, Mapping[str, Any]] | None = None,
        edge_attrs: Mapping[tuple, Mapping[str, Any]] | None = None,
    ):
        nodes = tuple(sorted(set(nodes), key=node_key))
        index = {n: i for i, n in enumerate(nodes)}
        if isinstance(edges, Mapping):
            edges = edges.items()
        store: dict[tuple, float] = {}
        for item in edges:
            if len(item) == 2 and isinstance(item[0], tuple):
                (u, v), w = item
            elif len(item) == 3:
                u, v, w = item
            else:
                (u, v), w = item, 1.0
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if u not in index or v not in index:
                raise ValueError(f"edge ({u!r}, {v!r}) references unknown node")
            if not w > 0:
                raise ValueError(f"edge ({u!r}, {v!r}) has non-positive weight {w}")
            if not directed and index[u] > index[v]:
                u, v = v, u
            store[(u, v)] = store.get((u, v), 0) + w
        ordered = dict(sorted(store.items(), key=lambda kv: (index[kv[0][0]], index[kv[0][1]])))

        eattrs = {}
        for (u, v), attrs in (edge_attrs or {}).items():
            if not directed and index[u] > index[v]:
                u, v = v, u
            eattrs[(u, v)] = MappingProxyType(dict(attrs))

        succ: dict[Hashable, dict[Hashable, float]] = {n: {} for n in nodes}
        pred: dict[Hashable, dict[Hashable, float]] = {n: {} for n in nodes}
        for (u, v), w in ordered.items():
            succ[u][v] = w
            pred[v][u] = w
            if not directed:
                succ[v][u] = w
                pred[u][v] = w

        object.__setattr__(self, "directed", bool(directed))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", MappingProxyType(ordered))
        object.__setattr__(self, "node_attrs", MappingProxyType(
            {n: MappingProxyType(dict((node_attrs or {}).get(n, {}))) for n in nodes}))
        object.__setattr__(self, "edge_attrs", MappingProxyType(eattrs))
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_succ", succ)
        object.__setattr__(self, "_pred", pred)

    def __setattr__(self, name, value):
        raise AttributeError("Network is immutable")

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"<Network {kind} nodes={len(self.nodes)} edges={len(self.edges)}>"

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, node: object) -> bool:
        return node in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return (self.directed == other.directed and self.nodes == other.nodes
                and dict(self.edges) == dict(other.edges))

    __hash__ = None  # type: ignore[assignment]

    def index(self, node: Hashable) -> int:
        return self._index[node]

    def successors(self, node: Hashable) -> Mapping[Hashable, float]:
        return self._succ[node]

    def predecessors(self, node: Hashable) -> Mapping[Hashable, float]:
        return self._pred[node]

    def neighbors(self, node: Hashable) -> set:
        """Adjacent nodes ignoring direction."""
        return set(self._succ[node]) | set(self._pred[node])

    def degree(self, node: Hashable) -> int:
        return len(self.neighbors(node))

    def weight(self, u: Hashable, v: Hashable) -> float:
        if not self.directed and self._index[u] > self._index[v]:
            u, v = v, u
        return self.edges.get((u, v), 0)

    @property
    def total_weight(self) -> float:
        return float(sum(self.edges.values()))

    def subgraph(self, nodes: Iterable[Hashable]) -> "Network":
        keep = set(nodes)
        return Network(
            keep,
            {e: w for e, w in self.edges.items() if e[0] in keep and e[1] in keep},
            self.directed,
            {n: self.node_attrs[n] for n in keep},
            {e: a for e, a in self.edge_attrs.items() if e[0] in keep and e[1] in keep},
        )

    def to_networkx(self) -> nx.Graph:
        g = nx.DiGraph() if self.directed else nx.Graph()
        for n in self.nodes:
            g.add_node(n, **self.node_attrs[n])
        for (u, v), w in self.edges.items():
            g.add_edge(u, v, weight=w, **self.edge_attrs.get((u, v), {}))
        return g


@dataclass(frozen=True)
class ComponentStats:
    giant_size: int
    giant_fraction: float
    component_count: int
    node_count: int


def build_coauthor_graph(corpus: Corpus, table: AuthorTable, max_authors: int | None = None) -> Network:
    """Undirected co-author network over the authors in ``table``.

    Edge weight is the number of records two authors share; each edge also
    carries the sorted tuple of those record ids as ``records``.
    """
    shared: dict[tuple, list[str]] = {}
    for rec in corpus:
        keys = [k for k in rec.author_keys() if k in table]
        if max_authors is not None and len(rec.author_keys()) > max_authors:
            continue
        for u, v in combinations(sorted(keys, key=node_key), 2):
            shared.setdefault((u, v), []).append(rec.record_id)
    return Network(
        table.entries.keys(),
        {e: len(r) for e, r in shared.items()},
        directed=False,
        node_attrs={a: {"pub_count": e.publication_count, "last_name": e.last_name}
                    for a, e in table.entries.items()},
        edge_attrs={e: {"records": tuple(sorted(r))} for e, r in shared.items()},
    )


def build_citation_graph(corpus: Corpus) -> Network:
    """Directed unit-weight document citation network, singletons excluded."""
    edges = {}
    for rec in corpus:
        for ref in rec.cited_refs:
            m = ref.matched_record_id
            if m is not None and m != rec.record_id and m in corpus:
                edges[(rec.record_id, m)] = 1
    nodes = {u for e in edges for u in e}
    return Network(
        nodes, edges, directed=True,
        node_attrs={n: {"year": corpus[n].year} for n in nodes},
    )


def components(net: Network) -> list[list]:
    """Weakly connected components, largest first, ties by smallest node."""
    g = net.to_networkx()
    comps = nx.weakly_connected_components(g) if net.directed else nx.connected_components(g)
    out = [sorted(c, key=node_key) for c in comps]
    out.sort(key=lambda c: (-len(c), node_key(c[0])))
    return out


def component_stats(net: Network) -> ComponentStats:
    if not net.nodes:
        raise ValueError("component_stats on an empty graph")
    comps = components(net)
    giant = len(comps[0])
    return ComponentStats(giant, giant / len(net.nodes), len(comps), len(net.nodes))


# ---------------------------------------------------------------------------
# exporters


def _plain(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)):
        return value
    if isinstance(value, (set, frozenset)):
        value = sorted(value, key=node_key)
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    if value is None:
        return ""
    return str(value)


def write_graphml(net: Network, path) -> None:
    g = nx.DiGraph() if net.directed else nx.Graph()
    for n in net.nodes:
        g.add_node(str(n), **{k: _plain(v) for k, v in net.node_attrs[n].items()})
    for (u, v), w in net.edges.items():
        attrs = {k: _plain(x) for k, x in net.edge_attrs.get((u, v), {}).items()}
        g.add_edge(str(u), str(v), weight=float(w), **attrs)
    nx.write_graphml(g, path)


def _dot_quote(value: Any) -> str:
    text = str(_plain(value)).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{text}"'


def write_dot(net: Network, path=None) -> str:
    """Graphviz DOT text; written to ``path`` when given."""
    arrow = "->" if net.directed else "--"
    lines = [("digraph" if net.directed else "graph") + " G {"]
    for n in net.nodes:
        attrs = net.node_attrs[n]
        body = ", ".join(f"{k}={_dot_quote(v)}" for k, v in attrs.items())
        lines.append(f"  {_dot_quote(n)}" + (f" [{body}]" if body else "") + ";")
    for (u, v), w in net.edges.items():
        extra = "".join(
            f", {k}={_dot_quote(x)}" for k, x in net.edge_attrs.get((u, v), {}).items()
        )
        lines.append(f"  {_dot_quote(u)} {arrow} {_dot_quote(v)} [weight={_dot_quote(w)}{extra}];")
    lines.append("}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def write_edgelist_csv(net: Network, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["u", "v", "weight"])
    for (u, v), weight in net.edges.items():
        w.writerow([u, v, repr(float(weight)) if isinstance(weight, float) else weight])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
