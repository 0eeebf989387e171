"""Map-equation community detection."""
from ._backend import BACKEND
from .flow import CodelengthReport, flow_graph, map_equation, visit_rates
from .optimize import DoubleClustering, OptimizerTrace, aggregate, detect_communities, double_cluster
from .partition import Partition, nmi
from .synth import PlantedGraph, planted_partition

__all__ = [
    "BACKEND",
    "CodelengthReport",
    "DoubleClustering",
    "OptimizerTrace",
    "Partition",
    "PlantedGraph",
    "aggregate",
    "detect_communities",
    "double_cluster",
    "flow_graph",
    "map_equation",
    "nmi",
    "planted_partition",
    "visit_rates",
]
