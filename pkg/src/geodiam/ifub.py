"""iFUB: exact diameter by eccentricities of the far fringe of a center."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .graphcore import UNREACHABLE, Disconnected, GeometricGraph, bfs, two_sweep


@dataclass(frozen=True)
class TwoSweep:
    start: int = 0


@dataclass(frozen=True)
class Fixed:
    vertex: int


@dataclass
class IfubTrace:
    """Everything needed to replay a run.

    ``steps`` holds ``(vertex, ecc, L)`` for each fringe BFS, ``L`` being the
    lower bound after that BFS.  ``explored`` counts fringe BFS runs only;
    ``total_bfs`` adds the ordering BFS and, for 2-sweep, the two sweeps.
    """

    center: int
    order: np.ndarray
    dist: np.ndarray
    steps: list = field(default_factory=list)
    explored: int = 0
    total_bfs: int = 0
    arcs: int = 0

    @property
    def explored_vertices(self) -> np.ndarray:
        return self.order[: self.explored]


def fringe_order(dist: np.ndarray) -> np.ndarray:
    """Vertices by descending distance, ties broken by lowest id."""
    ids = np.arange(len(dist))
    return np.lexsort((ids, -dist.astype(np.int64)))


def _fringe_loop(order, dist, lower, ecc_of):
    steps = []
    for v in order:
        v = int(v)
        if 2 * int(dist[v]) <= lower:
            break
        e = ecc_of(v)
        lower = max(lower, e)
        steps.append((v, e, lower))
    return lower, steps


def ifub(g: GeometricGraph, center_strategy=None) -> tuple[int, IfubTrace]:
    """Exact diameter of a connected graph.

    Vertices are visited by descending distance from the center; the run
    stops at the first vertex v with 2 d(c, v) <= L, where L is the largest
    eccentricity seen so far (starting from ecc(c)).
    """
    if center_strategy is None:
        center_strategy = TwoSweep(0)
    extra = 0
    if isinstance(center_strategy, TwoSweep):
        sw = two_sweep(g, center_strategy.start)
        c = sw.center
        extra = 2
    elif isinstance(center_strategy, Fixed):
        c = int(center_strategy.vertex)
    else:
        raise TypeError(f"unknown center strategy {center_strategy!r}")
    dist = bfs(g, c)
    if (dist >= UNREACHABLE).any():
        raise Disconnected((c, int(np.flatnonzero(dist >= UNREACHABLE)[0])))
    order = fringe_order(dist)
    trace = IfubTrace(c, order, dist)

    scratch = np.empty(g.n, dtype=np.int32)
    queue = np.empty(g.n, dtype=np.int32)
    arcs = [0]

    def ecc_of(v):
        scratch.fill(UNREACHABLE)
        arcs[0] += _kernels.bfs(g.indptr, g.indices, v, scratch, queue)
        return int(scratch.max())

    lower, steps = _fringe_loop(order, dist, int(dist.max()), ecc_of)
    trace.steps = steps
    trace.explored = len(steps)
    trace.total_bfs = len(steps) + 1 + extra
    # every full BFS on a connected graph scans all 2m arcs
    trace.arcs = arcs[0] + (1 + extra) * 2 * g.m
    return lower, trace


def ifub_from_table(dist: np.ndarray, ecc: np.ndarray, center: int) -> tuple[int, IfubTrace]:
    """Replay a run from a precomputed eccentricity table (no BFS performed).

    ``dist`` are distances from ``center``.  Useful when many centers are
    tried on one graph.
    """
    order = fringe_order(dist)
    trace = IfubTrace(int(center), order, dist)
    lower, steps = _fringe_loop(order, dist, int(dist.max()), lambda v: int(ecc[v]))
    trace.steps = steps
    trace.explored = len(steps)
    trace.total_bfs = len(steps) + 1
    return lower, trace


@dataclass(frozen=True)
class ExploredReport:
    diameter: int
    threshold: int
    must_explore: int
    may_explore: int
    explored: int
    missing: tuple
    too_close: tuple

    @property
    def ok(self) -> bool:
        return not self.missing and not self.too_close


def explored_bounds_check(trace: IfubTrace, diam: int) -> ExploredReport:
    """Check the explored-set sandwich.

    Every vertex at distance >= ceil(D/2)+1 from the center is explored and
    every explored vertex has distance >= ceil(D/2).
    """
    h = -(-diam // 2)
    explored = np.zeros(len(trace.dist), dtype=bool)
    explored[trace.explored_vertices] = True
    must = trace.dist >= h + 1
    may = trace.dist >= h
    missing = tuple(int(v) for v in np.flatnonzero(must & ~explored))
    too_close = tuple(int(v) for v in np.flatnonzero(explored & ~may))
    return ExploredReport(diam, h, int(must.sum()), int(may.sum()), int(explored.sum()),
                          missing, too_close)
