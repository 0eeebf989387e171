"""Greedy map-equation minimization, aggregation and double clustering."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..graph import Network, components, node_key
from . import _backend
from .flow import CodelengthReport, FlowGraph, flow_graph, module_codelength
from .partition import Partition

log = logging.getLogger(__name__)

__all__ = ["detect_communities", "aggregate", "double_cluster", "DoubleClustering", "OptimizerTrace"]

DEFAULT_TRIALS = 20
MAX_SWEEPS = 200
MAX_ROUNDS = 25


@dataclass
class OptimizerTrace:
    """Codelength after every optimizer pass of the winning trial."""

    codelengths: list[float] = field(default_factory=list)


def _csr(n: int, keys: np.ndarray, other: np.ndarray, flow: np.ndarray):
    order = np.lexsort((other, keys))
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=n), out=ptr[1:])
    return ptr, np.ascontiguousarray(other[order], dtype=np.int64), np.ascontiguousarray(flow[order])


class _Level:
    """Flow network over the current super-nodes, internal flow dropped."""

    def __init__(self, node_flow, src, dst, flow):
        self.n = len(node_flow)
        self.node_flow = np.ascontiguousarray(node_flow, dtype=float)
        keep = src != dst
        src = src[keep].astype(np.int64)
        dst = dst[keep].astype(np.int64)
        flow = flow[keep].astype(float)
        self.src, self.dst, self.flow = src, dst, flow
        self.out = _csr(self.n, src, dst, flow)
        self.inn = _csr(self.n, dst, src, flow)

    @classmethod
    def collapse(cls, fg: FlowGraph, labels: np.ndarray, k: int) -> "_Level":
        node_flow = np.bincount(labels, weights=fg.node_flow, minlength=k)
        s, d = labels[fg.src], labels[fg.dst]
        cross = s != d
        if not cross.any():
            return cls(node_flow, s[:0], d[:0], fg.flow[:0])
        pair = s[cross] * k + d[cross]
        uniq, inv = np.unique(pair, return_inverse=True)
        flow = np.bincount(inv, weights=fg.flow[cross])
        return cls(node_flow, uniq // k, uniq % k, flow)

    def state(self, labels: np.ndarray):
        n = self.n
        labels = np.ascontiguousarray(labels, dtype=np.int64)
        mod_flow = np.bincount(labels, weights=self.node_flow, minlength=n).astype(float)
        ls, ld = labels[self.src], labels[self.dst]
        cross = ls != ld
        mod_exit = np.bincount(ls[cross], weights=self.flow[cross], minlength=n).astype(float)
        mod_enter = np.bincount(ld[cross], weights=self.flow[cross], minlength=n).astype(float)
        mod_size = np.bincount(labels, minlength=n).astype(np.int64)
        return labels.copy(), mod_flow, mod_exit, mod_enter, mod_size

    def local_moves(self, labels: np.ndarray, rng: np.random.Generator, sweep) -> tuple[np.ndarray, int]:
        module, mod_flow, mod_exit, mod_enter, mod_size = self.state(labels)
        total = 0
        for _ in range(MAX_SWEEPS):
            order = rng.permutation(self.n).astype(np.int64)
            moved = sweep(order, self.node_flow, *self.out, *self.inn,
                          module, mod_flow, mod_exit, mod_enter, mod_size)
            total += moved
            if moved == 0:
                break
        return module, total


def _relabel(labels: np.ndarray) -> tuple[np.ndarray, int]:
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first, kind="stable")
    remap = np.empty(labels.max() + 1, dtype=np.int64)
    remap[np.unique(labels)[order]] = np.arange(len(order))
    return remap[labels], len(order)


def _optimize(fg: FlowGraph, rng: np.random.Generator, sweep) -> tuple[np.ndarray, list[float]]:
    n = len(fg.node_flow)
    leaf = _Level(fg.node_flow, fg.src, fg.dst, fg.flow)
    labels = np.arange(n, dtype=np.int64)
    history = [module_codelength(fg, labels).codelength_bits]
    for _ in range(MAX_ROUNDS):
        # coarse: repeatedly merge current modules as super-nodes
        k = int(labels.max()) + 1
        while True:
            level = _Level.collapse(fg, labels, k)
            upper, moved = level.local_moves(np.arange(k, dtype=np.int64), rng, sweep)
            if moved == 0:
                break
            labels, k = _relabel(upper[labels])
            history.append(module_codelength(fg, labels).codelength_bits)
            if k == 1:
                break
        # fine-tune: leaf nodes may leave their module again
        tuned, moved = leaf.local_moves(labels, rng, sweep)
        if moved == 0:
            break
        labels, _ = _relabel(tuned)
        history.append(module_codelength(fg, labels).codelength_bits)
    return labels, history


def _run_trial(args):
    fg, seed_seq, backend = args
    sweep = _backend.get_sweep(backend)
    labels, history = _optimize(fg, np.random.default_rng(seed_seq), sweep)
    return labels, history


def detect_communities(
    net: Network,
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
    *,
    teleport: float = 0.15,
    workers: int | None = None,
    backend: str | None = None,
    trace: OptimizerTrace | None = None,
) -> tuple[Partition, CodelengthReport]:
    """Minimize the two-level map equation over ``trials`` seeded restarts.

    The best partition is the one with the lowest codelength, ties broken by
    the smallest canonical encoding, so serial and parallel runs agree.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not net.nodes:
        raise ValueError("cannot cluster an empty graph")
    fg = flow_graph(net, teleport)
    seqs = np.random.SeedSequence(seed).spawn(trials)
    jobs = [(fg, s, backend) for s in seqs]
    if workers and workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_trial, jobs))
    else:
        results = [_run_trial(j) for j in jobs]

    best_key, best = None, None
    for labels, history in results:
        enc = tuple(_relabel(labels)[0].tolist())
        rep = module_codelength(fg, labels)
        key = (round(rep.codelength_bits, 10), enc)
        if best_key is None or key < best_key:
            best_key, best = key, (enc, rep, history)
    enc, rep, history = best
    if trace is not None:
        trace.codelengths[:] = history
    part = Partition(dict(zip(fg.nodes, enc)), canonical=True)
    return part, rep


def aggregate(net: Network, part: Partition) -> Network:
    """Cluster-level network; intra-cluster weight is kept as a node attribute."""
    if set(part.assignment) != set(net.nodes):
        raise ValueError("partition does not cover exactly the network's nodes")
    weights: dict[tuple, float] = {}
    internal: dict = {c: 0 for c in part.assignment.values()}
    for (u, v), w in net.edges.items():
        cu, cv = part[u], part[v]
        if cu == cv:
            internal[cu] += w
        else:
            weights[(cu, cv)] = weights.get((cu, cv), 0) + w
    sizes = part.sizes()
    return Network(
        internal.keys(), weights, net.directed,
        node_attrs={c: {"size": sizes[c], "internal_weight": internal[c]} for c in internal},
    )


@dataclass(frozen=True)
class DoubleClustering:
    level1: Partition
    level2: Partition
    docmap: dict
    level1_report: CodelengthReport


def double_cluster(net: Network, seed: int = 0, trials: int = DEFAULT_TRIALS, **kw) -> DoubleClustering:
    """Cluster documents, then cluster the cluster-level network again.

    The second pass runs per weakly connected component of the aggregate, so
    no level-2 cluster spans clusters without citation flow between them.
    """
    level1, rep = detect_communities(net, seed, trials, **kw)
    agg = aggregate(net, level1)
    assign: dict = {}
    next_id = 0
    seqs = np.random.SeedSequence(seed).spawn(len(agg.nodes) + 1)
    for ci, comp in enumerate(components(agg)):
        if len(comp) == 1:
            assign[comp[0]] = next_id
            next_id += 1
            continue
        sub = agg.subgraph(comp)
        sub_seed = int(seqs[ci + 1].generate_state(1)[0])
        p2, _ = detect_communities(sub, sub_seed, trials, **kw)
        for c in comp:
            assign[c] = next_id + p2[c]
        next_id += p2.num_clusters
    level2 = Partition(assign).canonical()
    docmap = {d: level2[c] for d, c in level1.assignment.items()}
    return DoubleClustering(level1, level2, docmap, rep)
