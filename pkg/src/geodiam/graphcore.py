"""Immutable CSR graphs, BFS machinery, and brute-force distance oracles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .geometry import GroundSpace, SpaceKind

UNREACHABLE = _kernels.UNREACHABLE


class Disconnected(ValueError):
    """Raised when an operation needs a connected graph.

    ``representatives`` holds the lowest vertex id of two different components.
    """

    def __init__(self, representatives: tuple[int, int]):
        self.representatives = representatives
        super().__init__(
            f"graph is disconnected: vertices {representatives[0]} and "
            f"{representatives[1]} lie in different components"
        )


@dataclass(frozen=True, eq=False)
class GeometricGraph:
    """Undirected simple graph in CSR form with vertex coordinates.

    Both directions of each edge are stored; neighbour lists are sorted.
    """

    indptr: np.ndarray
    indices: np.ndarray
    coords: np.ndarray
    space: GroundSpace
    radius: float | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges, coords=None, space: GroundSpace | None = None,
                   radius: float | None = None) -> "GeometricGraph":
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(edges) and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise ValueError("self-loops are not allowed")
        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        if len(src) > 1:
            dup = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
            if dup.any():
                keep = np.concatenate([[True], ~dup])
                src, dst = src[keep], dst[keep]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        if coords is None:
            coords = np.zeros((n, 2))
        if space is None:
            space = GroundSpace(SpaceKind.SQUARE, max(1.0, float(np.max(coords, initial=0.0)) + 1.0))
        return cls(indptr, dst.astype(np.int32), np.asarray(coords, dtype=float).reshape(n, 2),
                   space, radius)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edge_array(self) -> np.ndarray:
        """Edges as an ``(m, 2)`` array with ``u < v``, lexicographically sorted."""
        src = np.repeat(np.arange(self.n), self.degrees())
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]]).astype(np.int64)

    def induced(self, vertices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """CSR arrays of ``G[vertices]`` in the local numbering of ``vertices``."""
        vertices = np.asarray(vertices, dtype=np.int64)
        local = np.full(self.n, -1, dtype=np.int64)
        local[vertices] = np.arange(len(vertices))
        starts = self.indptr[vertices]
        counts = self.indptr[vertices + 1] - starts
        pos = np.repeat(starts - np.cumsum(counts) + counts, counts) + np.arange(counts.sum())
        nbr = local[self.indices[pos]]
        rows = np.repeat(np.arange(len(vertices)), counts)
        keep = nbr >= 0
        sub_indptr = np.zeros(len(vertices) + 1, dtype=np.int64)
        np.add.at(sub_indptr, rows[keep] + 1, 1)
        np.cumsum(sub_indptr, out=sub_indptr)
        return sub_indptr, nbr[keep].astype(np.int32)

    def __eq__(self, other):
        if not isinstance(other, GeometricGraph):
            return NotImplemented
        return (self.space == other.space
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.coords, other.coords))

    __hash__ = None


def bfs(g: GeometricGraph, source: int, restriction: Iterable[int] | None = None) -> np.ndarray:
    """Hop distances from ``source``; UNREACHABLE outside the (restricted) component."""
    if not 0 <= source < g.n:
        raise IndexError(f"source {source} out of range for n={g.n}")
    dist = np.full(g.n, UNREACHABLE, dtype=np.int32)
    queue = np.empty(g.n, dtype=np.int32)
    if restriction is None:
        _kernels.bfs(g.indptr, g.indices, source, dist, queue)
        return dist
    allowed = np.zeros(g.n, dtype=np.bool_)
    allowed[np.fromiter(restriction, dtype=np.int64)] = True
    if not allowed[source]:
        raise ValueError("source must lie inside the restriction")
    _kernels.bfs_masked(g.indptr, g.indices, source, allowed, dist, queue)
    return dist


def eccentricity(g: GeometricGraph, v: int, restriction=None) -> int:
    d = bfs(g, v, restriction)
    return int(d[d < UNREACHABLE].max())


def components(g: GeometricGraph) -> np.ndarray:
    """Component label of every vertex (label = lowest vertex id in the component)."""
    label = np.full(g.n, -1, dtype=np.int64)
    dist = np.full(g.n, UNREACHABLE, dtype=np.int32)
    queue = np.empty(g.n, dtype=np.int32)
    for v in range(g.n):
        if label[v] < 0:
            _kernels.bfs(g.indptr, g.indices, v, dist, queue)
            hit = (dist < UNREACHABLE) & (label < 0)
            label[hit] = v
    return label


def is_connected(g: GeometricGraph) -> bool:
    if g.n <= 1:
        return True
    return bool((bfs(g, 0) < UNREACHABLE).all())


def require_connected(g: GeometricGraph) -> None:
    if g.n <= 1:
        return
    d = bfs(g, 0)
    if (d >= UNREACHABLE).any():
        other = int(np.flatnonzero(d >= UNREACHABLE)[0])
        raise Disconnected((0, other))


def max_degree(g: GeometricGraph) -> int:
    return int(g.degrees().max(initial=0))


def all_eccentricities(g: GeometricGraph, sources: Sequence[int] | None = None) -> tuple[np.ndarray, int]:
    """Eccentricities of ``sources`` (default all vertices) and arcs scanned."""
    src = np.arange(g.n, dtype=np.int64) if sources is None else np.asarray(sources, dtype=np.int64)
    ecc, reached, arcs = _kernels.eccentricities(g.indptr, g.indices, src)
    if len(src) and (reached < g.n).any():
        ecc = ecc.copy()
        ecc[reached < g.n] = UNREACHABLE
    return ecc, int(arcs)


def naive_diameter(g: GeometricGraph) -> int:
    """Diameter by a BFS from every vertex, O(nm)."""
    require_connected(g)
    if g.n <= 1:
        return 0
    ecc, _ = all_eccentricities(g)
    return int(ecc.max())


def distance_matrix(g: GeometricGraph, sources: Sequence[int] | None = None) -> np.ndarray:
    src = np.arange(g.n, dtype=np.int64) if sources is None else np.asarray(sources, dtype=np.int64)
    out = np.empty((len(src), g.n), dtype=np.int32)
    _kernels.bfs_rows(g.indptr, g.indices, src, out)
    return out


@dataclass(frozen=True)
class SweepResult:
    w: int
    w_prime: int
    center: int
    length: int


def two_sweep(g: GeometricGraph, start: int) -> SweepResult:
    """Double BFS; the center sits floor(len/2) steps from ``w`` on the
    shortest ``w -> w'`` path that always steps to the lowest-id parent."""
    d0 = bfs(g, start)
    if (d0 >= UNREACHABLE).any():
        raise Disconnected((start, int(np.flatnonzero(d0 >= UNREACHABLE)[0])))
    w = int(np.argmax(d0))
    dw = bfs(g, w)
    w2 = int(np.argmax(dw))
    length = int(dw[w2])
    # walk back from w' to w choosing lowest-id predecessors
    path = [w2]
    v = w2
    while v != w:
        nb = g.neighbors(v)
        v = int(nb[dw[nb] == dw[v] - 1].min())
        path.append(v)
    path.reverse()
    return SweepResult(w, w2, path[length // 2], length)


def maxdist_bruteforce(g: GeometricGraph, A, B) -> int:
    """max_{a in A, b in B} d_G(a, b) via one BFS per a."""
    A = np.asarray(list(A) if not isinstance(A, np.ndarray) else A, dtype=np.int64)
    B = np.asarray(list(B) if not isinstance(B, np.ndarray) else B, dtype=np.int64)
    if len(A) == 0 or len(B) == 0:
        raise ValueError("vertex sets must be nonempty")
    rows = distance_matrix(g, A)
    return int(rows[:, B].max())
