import random
import re
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pubcomm.corpus import build_author_table
from pubcomm.graph import (
    Network,
    build_citation_graph,
    build_coauthor_graph,
    component_stats,
    components,
    write_dot,
    write_edgelist_csv,
    write_graphml,
)
from wos import corpus, record


def _uf_components(nodes, edges):
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(u)] = find(v)
    sizes = {}
    for n in nodes:
        sizes[find(n)] = sizes.get(find(n), 0) + 1
    return sorted(sizes.values(), reverse=True)


def test_network_invariants():
    net = Network("abc", {("b", "a"): 1, ("a", "b"): 2, ("b", "c"): 0.5})
    assert net.edges == {("a", "b"): 3, ("b", "c"): 0.5}
    assert net.weight("b", "a") == 3
    with pytest.raises(ValueError):
        Network("ab", {("a", "a"): 1})
    with pytest.raises(ValueError):
        Network("ab", {("a", "b"): 0})
    with pytest.raises(AttributeError):
        net.directed = True
    d = Network("ab", {("a", "b"): 1, ("b", "a"): 1}, directed=True)
    assert len(d.edges) == 2


def test_coauthor_examples():
    c = corpus(record("1", authors=["A", "B", "C"]), record("2", authors=["A", "B"]), record("3", authors=["D", "A"]))
    net = build_coauthor_graph(c, build_author_table(c, 1))
    assert net.edges == {("A", "B"): 2, ("A", "C"): 1, ("B", "C"): 1, ("A", "D"): 1}
    assert net.node_attrs["A"]["pub_count"] == 3
    filtered = build_coauthor_graph(c, build_author_table(c, 2))
    assert filtered.nodes == ("A", "B") and filtered.edges == {("A", "B"): 2}


def test_coauthor_weights_match_brute_force():
    rng = random.Random(3)
    authors = list("ABCDEFGHIJ")
    recs = [record(str(i), authors=rng.sample(authors, rng.randint(1, 4))) for i in range(60)]
    c = corpus(*recs)
    net = build_coauthor_graph(c, build_author_table(c, 1))
    for u, v in combinations(authors, 2):
        shared = sum(1 for r in c if u in r.author_keys() and v in r.author_keys())
        assert net.weight(u, v) == shared
        assert net.weight(u, v) == net.weight(v, u)


def test_citation_graph():
    c = corpus(record("A", refs=["B"]), record("B"), record("C"), record("D", refs=["E"]), record("E", refs=["D"]))
    net = build_citation_graph(c)
    assert net.directed
    assert net.nodes == ("A", "B", "D", "E")
    assert set(net.edges) == {("A", "B"), ("D", "E"), ("E", "D")}
    assert all(w == 1 for w in net.edges.values())


def test_citation_in_degree_equals_citing_records():
    rng = random.Random(5)
    ids = [f"R{i}" for i in range(40)]
    recs = [record(r, refs=rng.sample(ids, 4) + ["R0"]) for r in ids]
    c = corpus(*recs)
    net = build_citation_graph(c)
    for n in net.nodes:
        citing = {r.record_id for r in c if r.record_id != n and any(x.matched_record_id == n for x in r.cited_refs)}
        assert set(net.predecessors(n)) == citing


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 30), st.lists(st.tuples(st.integers(0, 29), st.integers(0, 29)), max_size=40), st.booleans())
def test_component_stats_union_find(n, pairs, directed):
    edges = {(u, v): 1 for u, v in pairs if u != v and u < n and v < n}
    net = Network(range(n), edges, directed=directed)
    sizes = _uf_components(range(n), edges)
    s = component_stats(net)
    assert (s.giant_size, s.component_count) == (sizes[0], len(sizes))
    assert s.giant_fraction == sizes[0] / n
    assert 0 < s.giant_fraction <= 1
    assert [len(c) for c in components(net)] == sizes


def test_component_stats_examples():
    assert component_stats(Network("abc", {("a", "b"): 1, ("b", "c"): 1})).giant_fraction == 1.0
    with pytest.raises(ValueError):
        component_stats(Network([], {}))
    giant = Network(range(9116), {(i, i + 1): 1 for i in range(6644)})
    assert round(component_stats(giant).giant_fraction, 3) == 0.729
    giant2 = Network(range(40808), {(i, i + 1): 1 for i in range(33202)})
    assert round(component_stats(giant2).giant_fraction, 3) == 0.814


def test_exports(tmp_path):
    net = Network(["a", "b", "c"], {("a", "b"): 2, ("b", "c"): 1}, node_attrs={"a": {"geo": "Europe"}},
                  edge_attrs={("a", "b"): {"records": ("r1", "r2")}})
    write_graphml(net, tmp_path / "g.graphml")
    g = nx.read_graphml(tmp_path / "g.graphml")
    assert g["a"]["b"]["weight"] == 2.0 and g["a"]["b"]["records"] == "r1;r2"
    assert g.nodes["a"]["geo"] == "Europe"
    dot = write_dot(net, tmp_path / "g.dot")
    assert dot.startswith("graph G {") and dot.rstrip().endswith("}")
    assert len(re.findall(r'^\s+"\w+" -- "\w+" \[weight="[\d.]+".*\];$', dot, re.M)) == 2
    csv_text = write_edgelist_csv(net)
    assert csv_text.splitlines() == ["u,v,weight", "a,b,2", "b,c,1"]
    d = Network("ab", {("a", "b"): 1}, directed=True)
    assert "digraph" in write_dot(d) and '"a" -> "b"' in write_dot(d)
