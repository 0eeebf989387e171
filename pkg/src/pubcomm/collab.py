"""Group collaboration networks over co-author clusters and their
geographic / topical overlays."""
from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .corpus import CONTINENTS, AuthorTable, Corpus
from .community.partition import Partition
from .graph import Network, node_key
from .roles import NodeRoleProfile
from .topics import TopicArea

__all__ = [
    "InterClusterLink",
    "default_link_rule",
    "intercluster_links",
    "classify_intercluster_link",
    "build_group_collab_network",
    "linked_cluster_proportion",
    "geo_label_from_counts",
    "geographic_affiliation",
    "GEO_ABBREV",
    "GEO_COLORS",
    "TopicalActivity",
    "topical_activity",
    "activity_gray",
    "PropensityTable",
    "geographic_propensity",
    "overlay_network",
]

MAIN_CONTINENTS = ("Asia", "Europe", "North America")
GEO_ABBREV = {
    "Asia": "AS",
    "Europe": "EU",
    "North America": "NA",
    "Asia/Europe": "AS/EU",
    "Asia/North America": "AS/NA",
    "Europe/North America": "EU/NA",
    "Other": "OT",
}
GEO_COLORS = {
    "Asia": "#ffff99",
    "Europe": "#1f4fd8",
    "North America": "#d81f1f",
    "Asia/Europe": "#99e699",
    "Asia/North America": "#ffa64d",
    "Europe/North America": "#8a2be2",
    "Other": "#ffffff",
}


# ---------------------------------------------------------------------------
# transfer vs collaboration links


@dataclass(frozen=True)
class InterClusterLink:
    pair: tuple
    kind: str
    joint_pubs: int
    distinct_pairs: int
    hub_hub: bool


LinkRule = Callable[[int, int, bool], str]


def default_link_rule(distinct_pairs: int, joint_pubs: int, hub_hub: bool) -> str:
    """Collaboration when at least two author pairs share at least two joint
    papers, or a joint paper links a hub of each cluster; else transfer."""
    if (distinct_pairs >= 2 and joint_pubs >= 2) or hub_hub:
        return "collaboration"
    return "transfer"


def _pair(a, b) -> tuple:
    return (a, b) if node_key(a) <= node_key(b) else (b, a)


def intercluster_links(
    net: Network,
    part: Partition,
    roles: Mapping[Hashable, NodeRoleProfile],
    rule: LinkRule = default_link_rule,
) -> dict[tuple, InterClusterLink]:
    """Classify every cluster pair joined by at least one co-author edge.

    Joint publications are the distinct records on the cross edges (edge
    attribute ``records``); without it the summed edge weight is used.
    """
    pairs: dict[tuple, list] = {}
    for (u, v), w in net.edges.items():
        cu, cv = part[u], part[v]
        if cu != cv:
            pairs.setdefault(_pair(cu, cv), []).append((u, v, w))
    out = {}
    for key in sorted(pairs, key=lambda p: (node_key(p[0]), node_key(p[1]))):
        edges = pairs[key]
        records: set = set()
        have_records = True
        weight = 0
        hub_hub = False
        for u, v, w in edges:
            weight += w
            recs = net.edge_attrs.get((u, v), {}).get("records")
            if recs is None:
                have_records = False
            else:
                records.update(recs)
            hub_hub |= roles[u].is_hub and roles[v].is_hub
        joint = len(records) if have_records else int(weight)
        out[key] = InterClusterLink(key, rule(len(edges), joint, hub_hub), joint, len(edges), hub_hub)
    return out


def classify_intercluster_link(
    net: Network,
    part: Partition,
    roles: Mapping[Hashable, NodeRoleProfile],
    pair: tuple,
    rule: LinkRule = default_link_rule,
) -> InterClusterLink:
    a, b = pair
    if a == b:
        raise ValueError("clusters must be distinct")
    sub = {n for n in net.nodes if part[n] in (a, b)}
    link = intercluster_links(net.subgraph(sub), part.restrict(sub), roles, rule).get(_pair(a, b))
    if link is None:
        raise ValueError(f"no co-author edge between clusters {a!r} and {b!r}")
    return link


def build_group_collab_network(
    net: Network,
    part: Partition,
    roles: Mapping[Hashable, NodeRoleProfile],
    rule: LinkRule = default_link_rule,
) -> Network:
    """Clusters as nodes, collaboration links as edges.

    Edge weight is the number of co-author relationships between the two
    clusters; transfer links are left out.
    """
    links = intercluster_links(net, part, roles, rule)
    sizes = part.sizes()
    edges, attrs = {}, {}
    for key, link in links.items():
        if link.kind == "collaboration":
            edges[key] = link.distinct_pairs
            attrs[key] = {"joint_pubs": link.joint_pubs, "hub_hub": link.hub_hub}
    return Network(sizes.keys(), edges, False,
                   node_attrs={c: {"size": n} for c, n in sizes.items()}, edge_attrs=attrs)


def linked_cluster_proportion(collab: Network) -> tuple[int, int, float]:
    """``(linked, total, linked / total)`` for clusters with a collaboration link."""
    total = len(collab.nodes)
    linked = sum(1 for n in collab.nodes if collab.degree(n) > 0)
    return linked, total, (linked / total if total else 0.0)


# ---------------------------------------------------------------------------
# geographic overlay


def geo_label_from_counts(counts: Mapping[str, int], continent_map: Mapping[str, str] = CONTINENTS) -> str:
    """Continent label from country occurrence counts.

    The most listed country decides; if the runner-up is listed at least half
    as often and sits on another continent, the label is the alphabetically
    ordered pair of continents. Count ties are broken alphabetically by code.
    """
    counts = {c: n for c, n in counts.items() if n > 0}
    if not counts:
        return "Other"
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    top, top_n = ranked[0]
    first = continent_map.get(top, "Other")
    if first not in MAIN_CONTINENTS:
        first = "Other"
    if len(ranked) > 1:
        second_code, second_n = ranked[1]
        second = continent_map.get(second_code, "Other")
        if (2 * second_n >= top_n and second != first
                and first in MAIN_CONTINENTS and second in MAIN_CONTINENTS):
            return "/".join(sorted((first, second)))
    return first


def _cluster_records(members: Iterable[str], corpus: Corpus, table: AuthorTable | None) -> set[str]:
    members = set(members)
    if table is not None:
        out: set[str] = set()
        for a in members:
            if a in table:
                out |= table[a].record_ids
        return out
    return {r.record_id for r in corpus if members.intersection(r.author_keys())}


def geographic_affiliation(
    members: Iterable[str],
    corpus: Corpus,
    continent_map: Mapping[str, str] = CONTINENTS,
    table: AuthorTable | None = None,
) -> str:
    """Continent label of a cluster from the addresses on all publications
    co-authored by at least one member."""
    counts: Counter = Counter()
    for rid in _cluster_records(members, corpus, table):
        rec = corpus.get(rid)
        if rec is not None:
            counts.update(rec.addresses)
    return geo_label_from_counts(counts, continent_map)


# ---------------------------------------------------------------------------
# topical overlay


@dataclass(frozen=True)
class TopicalActivity:
    activity: dict[int, float]
    used_hubs: bool
    publications: int
    empty: bool = False


def topical_activity(
    members: Iterable[str],
    areas: Sequence[TopicArea],
    table: AuthorTable,
    roles: Mapping[Hashable, NodeRoleProfile],
) -> TopicalActivity:
    """Share of the cluster's publications falling in each topic area.

    Only hub authors' publications count; a cluster without hubs falls back
    to the publications of all its members.
    """
    members = [m for m in members if m in table]
    hubs = [m for m in members if m in roles and roles[m].is_hub]
    source = hubs or members
    pubs: set[str] = set()
    for a in source:
        pubs |= table[a].record_ids
    if not pubs:
        return TopicalActivity({a.area_id: 0.0 for a in areas}, bool(hubs), 0, empty=True)
    act = {a.area_id: len(pubs & a.doc_ids) / len(pubs) for a in areas}
    return TopicalActivity(act, bool(hubs), len(pubs))


def activity_gray(value: float) -> str:
    """Grey level from white (0) to black (above 0.9).

    Values up to 0.9 stay on a ramp ending at dark grey so that black marks
    only the top bin.
    """
    if value > 0.9:
        return "#000000"
    level = round(255 - 223 * max(value, 0.0) / 0.9)
    return f"#{level:02x}{level:02x}{level:02x}"


# ---------------------------------------------------------------------------
# geographic propensity


@dataclass
class PropensityTable:
    order: list[str]
    deviation: dict[str, dict[str, float | None]]
    observed: dict[str, dict[str, float | None]]
    expected: dict[str, dict[str, float | None]]
    avg_degree: dict[str, float | None]
    group_counts: dict[str, int]

    HEADER = ("Preference for collaboration partners from "
              "[relative deviation from null model; a group is excluded from its own partner pool]")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["Continent affiliation (average node degree)", self.HEADER])
        w.writerow([""] + [GEO_ABBREV.get(t, t) for t in self.order])
        for s in self.order:
            head = f"{GEO_ABBREV.get(s, s)} ({_fmt_degree(self.avg_degree[s])})"
            cells = ["N.A." if self.deviation[s][t] is None else f"{self.deviation[s][t]:.0f}%" for t in self.order]
            w.writerow([head] + cells)
        return buf.getvalue()


def _fmt_degree(d: float | None) -> str:
    if d is None:
        return "N.A."
    return "0" if d == 0 else f"{d:.1f}"


def geographic_propensity(
    collab: Network,
    labels: Mapping[Hashable, str],
    order: Sequence[str] | None = None,
) -> PropensityTable:
    """Deviation (percent) of observed partner-affiliation shares from a null
    model where partners are drawn in proportion to group counts."""
    missing = [n for n in collab.nodes if n not in labels]
    if missing:
        raise ValueError(f"unlabelled groups, e.g. {missing[0]!r}")
    present = set(labels[n] for n in collab.nodes)
    if order is None:
        order = [g for g in GEO_ABBREV if g != "Other" or g in present]
    order = list(order)
    n_groups = Counter(labels[n] for n in collab.nodes)
    total = len(collab.nodes)
    links: dict[str, Counter] = {s: Counter() for s in order}
    degree_sum: Counter = Counter()
    for (u, v) in collab.edges:
        su, sv = labels[u], labels[v]
        links.setdefault(su, Counter())[sv] += 1
        links.setdefault(sv, Counter())[su] += 1
        degree_sum[su] += 1
        degree_sum[sv] += 1
    dev, obs, exp = {}, {}, {}
    for s in order:
        dev[s], obs[s], exp[s] = {}, {}, {}
        out_links = sum(links[s].values())
        for t in order:
            pool = n_groups[t] - (1 if t == s else 0)
            e = pool / (total - 1) if total > 1 and n_groups[s] else 0.0
            o = links[s][t] / out_links if out_links else None
            obs[s][t] = o
            exp[s][t] = e if e > 0 else None
            dev[s][t] = None if (o is None or e <= 0) else (o - e) / e * 100
    avg = {s: (degree_sum[s] / n_groups[s] if n_groups[s] else None) for s in order}
    return PropensityTable(order, dev, obs, exp, avg, {s: n_groups[s] for s in order})


# ---------------------------------------------------------------------------
# overlays


def overlay_network(
    collab: Network,
    geo: Mapping[Hashable, str] | None = None,
    activity: Mapping[Hashable, TopicalActivity] | None = None,
) -> Network:
    """Copy of ``collab`` with geographic and topical node attributes."""
    attrs = {}
    for n in collab.nodes:
        a = dict(collab.node_attrs[n])
        if geo is not None:
            a["geo"] = geo[n]
            a["geo_color"] = GEO_COLORS.get(geo[n], "#ffffff")
        if activity is not None and n in activity:
            for area, v in activity[n].activity.items():
                a[f"activity_{area}"] = v
                a[f"activity_{area}_gray"] = activity_gray(v)
        attrs[n] = a
    return Network(collab.nodes, collab.edges, collab.directed, attrs, collab.edge_attrs)
