import random
from collections import defaultdict

import networkx as nx
import numpy as np
import pytest

from pubcomm.collab import (
    activity_gray,
    build_group_collab_network,
    classify_intercluster_link,
    geo_label_from_counts,
    geographic_affiliation,
    geographic_propensity,
    intercluster_links,
    linked_cluster_proportion,
    overlay_network,
    topical_activity,
)
from pubcomm.community import Partition
from pubcomm.corpus import build_author_table
from pubcomm.graph import Network
from pubcomm.roles import NodeRoleProfile
from pubcomm.topics import TopicArea
from wos import corpus, record

HUB = NodeRoleProfile(3.0, 0.1, "provincial_hub")
PERI = NodeRoleProfile(0.0, 0.1, "peripheral")


# --- geographic labels ------------------------------------------------------

def test_three_affiliation_examples():
    assert geo_label_from_counts({"DE": 10, "US": 6, "FR": 4}) == "Europe/North America"
    assert geo_label_from_counts({"US": 10, "CA": 6}) == "North America"
    assert geo_label_from_counts({"CN": 10, "JP": 3}) == "Asia"


def test_label_edge_cases():
    assert geo_label_from_counts({}) == "Other"
    assert geo_label_from_counts({"CN": 10, "US": 5}) == "Asia/North America"
    assert geo_label_from_counts({"CN": 10, "US": 4}) == "Asia"
    # ties on the top count are broken alphabetically by code
    assert geo_label_from_counts({"US": 5, "DE": 5}) == "Europe/North America"
    assert geo_label_from_counts({"JP": 5, "CN": 5}) == "Asia"


def test_label_scale_invariance():
    rng = random.Random(0)
    codes = ["US", "CA", "DE", "FR", "GB", "CN", "JP", "KR", "BR", "AU"]
    for _ in range(200):
        counts = {c: rng.randint(0, 12) for c in rng.sample(codes, rng.randint(1, 5))}
        k = rng.randint(2, 5)
        assert geo_label_from_counts({c: k * n for c, n in counts.items()}) == geo_label_from_counts(counts)


def test_geographic_affiliation_from_corpus():
    c = corpus(record("1", authors=["A", "B"], addresses=["DE", "DE"]),
               record("2", authors=["A"], addresses=["US"]),
               record("3", authors=["Z"], addresses=["CN", "CN", "CN"]))
    assert geographic_affiliation(["A"], c) == "Europe/North America"
    assert geographic_affiliation(["A"], c, table=build_author_table(c)) == "Europe/North America"
    assert geographic_affiliation(["nobody"], c) == "Other"


# --- link classification ----------------------------------------------------

def _two_clusters(edges, records):
    net = Network("abcdef", edges, edge_attrs={e: {"records": r} for e, r in records.items()})
    part = Partition({"a": 0, "b": 0, "c": 0, "d": 1, "e": 1, "f": 1})
    return net, part


def test_link_rule_examples():
    roles = {n: PERI for n in "abcdef"}
    net, part = _two_clusters({("a", "d"): 1}, {("a", "d"): ("p1",)})
    assert classify_intercluster_link(net, part, roles, (0, 1)).kind == "transfer"
    hubs = dict(roles, a=HUB, d=HUB)
    assert classify_intercluster_link(net, part, hubs, (0, 1)).kind == "collaboration"
    net, part = _two_clusters({("a", "d"): 1, ("b", "e"): 1, ("c", "d"): 1},
                              {("a", "d"): ("p1",), ("b", "e"): ("p2",), ("c", "d"): ("p1",)})
    link = classify_intercluster_link(net, part, roles, (0, 1))
    assert (link.kind, link.distinct_pairs, link.joint_pubs) == ("collaboration", 3, 2)
    with pytest.raises(ValueError):
        classify_intercluster_link(net, part, roles, (0, 0))


def test_collab_network_and_transfer_removal():
    rng = random.Random(1)
    for _ in range(30):
        g = nx.gnp_random_graph(30, 0.12, seed=rng.randint(0, 10**6))
        edges = {e: rng.randint(1, 3) for e in g.edges}
        recs = {e: tuple(f"r{rng.randint(0, 20)}" for _ in range(w)) for e, w in edges.items()}
        net = Network(range(30), edges, edge_attrs={e: {"records": r} for e, r in recs.items()})
        part = Partition({n: n % 5 for n in range(30)})
        roles = {n: HUB if rng.random() < 0.1 else PERI for n in range(30)}
        collab = build_group_collab_network(net, part, roles)
        links = intercluster_links(net, part, roles)
        assert set(collab.edges) <= set(links)
        assert all(links[e].kind == "collaboration" for e in collab.edges)
        # drop every cross edge that belongs to a transfer link
        keep = {e: w for e, w in edges.items()
                if part[e[0]] == part[e[1]]
                or links[tuple(sorted((part[e[0]], part[e[1]])))].kind == "collaboration"}
        pruned = Network(range(30), keep, edge_attrs={e: {"records": recs[e]} for e in keep})
        assert build_group_collab_network(pruned, part, roles).edges == collab.edges


def test_linked_proportion():
    net, part = _two_clusters({("a", "d"): 1}, {("a", "d"): ("p1",)})
    collab = build_group_collab_network(net, part, {n: PERI for n in "abcdef"})
    assert collab.edges == {} and linked_cluster_proportion(collab) == (0, 2, 0.0)
    linked = Network(range(532), {(i, i + 1): 1 for i in range(0, 48, 2)})
    n, total, frac = linked_cluster_proportion(linked)
    assert (n, total, f"{100 * frac:.1f}%") == (48, 532, "9.0%")
    linked = Network(range(2086), {(i, i + 1): 1 for i in range(0, 476, 2)} | {(476, 0): 1})
    n, total, frac = linked_cluster_proportion(linked)
    assert (n, total, f"{100 * frac:.1f}%") == (477, 2086, "22.9%")


# --- topical activity -------------------------------------------------------

def test_topical_activity():
    c = corpus(record("1", authors=["H", "m"]), record("2", authors=["H"]), record("3", authors=["m"]),
               record("4", authors=["x"]))
    table = build_author_table(c)
    areas = [TopicArea(1, frozenset({"1", "2"})), TopicArea(2, frozenset({"3"}))]
    act = topical_activity(["H", "m"], areas, table, {"H": HUB, "m": PERI})
    assert act.activity == {1: 1.0, 2: 0.0} and act.used_hubs
    fallback = topical_activity(["H", "m"], areas, table, {"H": PERI, "m": PERI})
    assert fallback.activity == {1: 2 / 3, 2: 1 / 3} and not fallback.used_hubs
    assert sum(fallback.activity.values()) <= 1
    assert topical_activity(["x"], areas, table, {}).activity == {1: 0.0, 2: 0.0}
    empty = topical_activity(["ghost"], areas, table, {})
    assert empty.empty


def test_activity_gray():
    assert activity_gray(0.0) == "#ffffff"
    assert activity_gray(0.95) == "#000000"
    assert activity_gray(0.9) != "#000000"


# --- propensity -------------------------------------------------------------

def test_propensity_closed_form():
    for n in (2, 3, 5, 8):
        nodes = list(range(2 * n))
        labels = {i: "Europe" if i < n else "Asia" for i in nodes}
        edges = {(i, j): 1 for i in range(n) for j in range(i + 1, n)}
        edges |= {(n + i, n + j): 1 for i in range(n) for j in range(i + 1, n)}
        table = geographic_propensity(Network(nodes, edges), labels)
        expected = ((2 * n - 1) / (n - 1) - 1) * 100
        assert table.deviation["Europe"]["Europe"] == pytest.approx(expected)
        assert table.deviation["Europe"]["Asia"] == pytest.approx(-100)
        assert table.deviation["North America"]["Europe"] is None
        assert table.deviation["Europe"]["North America"] is None
        row = table.observed["Europe"]
        assert sum(v for v in row.values() if v) == pytest.approx(1.0)


def test_propensity_enumeration_oracle():
    rng = random.Random(3)
    g = nx.gnp_random_graph(25, 0.2, seed=3)
    labels = {n: rng.choice(["Asia", "Europe", "North America"]) for n in g}
    table = geographic_propensity(Network(g.nodes, {e: 1 for e in g.edges}), labels)
    for s in ("Asia", "Europe", "North America"):
        src = [n for n in g if labels[n] == s]
        partners = [labels[v] for u in src for v in g[u]]
        for t in ("Asia", "Europe", "North America"):
            pool = np.mean([sum(1 for m in g if m != u and labels[m] == t) / 24 for u in src])
            obs = partners.count(t) / len(partners)
            assert table.deviation[s][t] == pytest.approx((obs - pool) / pool * 100)


def test_random_label_null_simulation():
    cells = defaultdict(list)
    for seed in range(100):
        rng = random.Random(seed)
        g = nx.gnm_random_graph(120, 300, seed=seed)
        labels = {n: rng.choice(["Asia", "Europe", "North America", "Europe/North America"]) for n in g}
        table = geographic_propensity(Network(g.nodes, {e: 1 for e in g.edges}), labels)
        for s, row in table.deviation.items():
            for t, d in row.items():
                if d is not None:
                    cells[(s, t)].append(d)
    assert len(cells) == 16
    for key, values in cells.items():
        assert abs(np.mean(values)) <= 10, key


def test_propensity_csv_and_errors():
    net = Network([0, 1, 2], {(0, 1): 1})
    labels = {0: "Asia", 1: "Europe", 2: "Europe"}
    text = geographic_propensity(net, labels).to_csv()
    lines = text.splitlines()
    assert lines[1] == ",AS,EU,NA,AS/EU,AS/NA,EU/NA"
    assert lines[2].startswith("AS (1.0),")
    assert "AS/EU (N.A.)" in text
    with pytest.raises(ValueError):
        geographic_propensity(net, {0: "Asia"})
    empty = geographic_propensity(Network([], {}), {})
    assert all(v is None for row in empty.deviation.values() for v in row.values())


def test_overlay_attributes():
    collab = Network([0, 1], {(0, 1): 2}, node_attrs={0: {"size": 3}, 1: {"size": 4}})
    act = {0: topical_activity([], [TopicArea(1, frozenset())], build_author_table(corpus()), {})}
    over = overlay_network(collab, {0: "Asia", 1: "Europe"}, act)
    assert over.node_attrs[0]["geo"] == "Asia" and over.node_attrs[0]["activity_1_gray"] == "#ffffff"
    assert over.edges == collab.edges and over.node_attrs[1]["size"] == 4
