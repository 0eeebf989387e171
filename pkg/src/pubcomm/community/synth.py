"""Planted-partition benchmark graphs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph import Network
from .partition import Partition

__all__ = ["PlantedGraph", "planted_partition"]


@dataclass(frozen=True)
class PlantedGraph:
    network: Network
    truth: Partition
    params: tuple


def planted_partition(n: int, k: int, p_in: float, p_out: float, seed: int = 0) -> PlantedGraph:
    """``k`` equal blocks over nodes ``0..n-1``; pairs link with ``p_in`` inside
    a block and ``p_out`` across blocks."""
    if not (0 <= p_out < p_in <= 1):
        raise ValueError("need 0 <= p_out < p_in <= 1")
    if k < 1 or n < k or n % k:
        raise ValueError("k must be >= 1 and divide n")
    rng = np.random.default_rng(seed)
    block = np.arange(n) // (n // k)
    iu, ju = np.triu_indices(n, 1)
    prob = np.where(block[iu] == block[ju], p_in, p_out)
    hit = rng.random(len(iu)) < prob
    edges = {(int(i), int(j)): 1 for i, j in zip(iu[hit], ju[hit])}
    truth = Partition({i: int(block[i]) for i in range(n)}, canonical=True)
    return PlantedGraph(Network(range(n), edges), truth, (n, k, p_in, p_out, seed))
