"""Connected graphs with at most 8 nodes for the exhaustive-optimality check."""
from __future__ import annotations

import random

import networkx as nx

from pubcomm.graph import Network


def small_graphs() -> dict[str, nx.Graph]:
    gs: dict[str, nx.Graph] = {}
    gs["two_triangles_bridge"] = nx.Graph([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
    for n in (4, 5, 6):
        gs[f"K{n}"] = nx.complete_graph(n)
    for n in range(3, 9):
        gs[f"cycle{n}"] = nx.cycle_graph(n)
    for n in range(3, 8):
        gs[f"star{n + 1}"] = nx.star_graph(n)
    for n in (4, 6, 8):
        gs[f"path{n}"] = nx.path_graph(n)
    gs["barbell_4_4"] = nx.barbell_graph(4, 0)
    gs["barbell_3_3_bridge"] = nx.barbell_graph(3, 1)
    gs["K33"] = nx.complete_bipartite_graph(3, 3)
    gs["wheel7"] = nx.wheel_graph(7)
    gs["lollipop"] = nx.lollipop_graph(4, 3)
    gs["cube"] = nx.convert_node_labels_to_integers(nx.hypercube_graph(3))
    rng = random.Random(7)
    for i in range(6):
        while True:
            g = nx.gnp_random_graph(rng.randint(5, 8), 0.45, seed=rng.randint(0, 10**6))
            if nx.is_connected(g):
                break
        for u, v in g.edges:
            g[u][v]["weight"] = rng.randint(1, 4)
        gs[f"weighted_random{i}"] = g
    gs["directed_two_cycles"] = nx.DiGraph([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3), (5, 0)])
    gs["directed_cycle6"] = nx.cycle_graph(6, create_using=nx.DiGraph)
    gs["directed_mixed"] = nx.DiGraph([(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (4, 5), (5, 6), (6, 4), (3, 4), (6, 1)])
    return {k: nx.convert_node_labels_to_integers(g) for k, g in gs.items()}


def to_network(g: nx.Graph) -> Network:
    return Network(g.nodes, {(u, v): d.get("weight", 1) for u, v, d in g.edges(data=True)},
                   directed=g.is_directed())
