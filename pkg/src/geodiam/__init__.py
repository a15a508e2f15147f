"""Exact diameters of geometric graphs.

The main entry points are :func:`compute_diameter` (separator-hierarchy
algorithm), :func:`ifub` and :func:`naive_diameter`; :func:`sample_rgg`
generates random geometric graphs on the square or the torus.
"""

from .diameter import compute_diameter, decide, upper_bound
from .geometry import GroundSpace, SpaceKind
from .graphcore import UNREACHABLE, Disconnected, GeometricGraph, naive_diameter
from .graphgen import RggParams, read_graph, sample_rgg, write_graph
from .ifub import Fixed, TwoSweep, ifub
from .oracle import build_oracle, query_distance, query_distance_exact
from .partition import induce_partition

__all__ = [
    "UNREACHABLE", "Disconnected", "Fixed", "GeometricGraph", "GroundSpace", "RggParams",
    "SpaceKind", "TwoSweep", "build_oracle", "compute_diameter", "decide", "ifub",
    "induce_partition", "naive_diameter", "query_distance", "query_distance_exact",
    "read_graph", "sample_rgg", "upper_bound", "write_graph",
]
__version__ = "0.1.0"
