"""Random geometric graph sampling and the ``geograph v1`` text format."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .geometry import GroundSpace, SpaceKind
from .graphcore import GeometricGraph


class RadiusTooLarge(ValueError):
    """Torus radius at or above half the side length."""


@dataclass(frozen=True)
class RggParams:
    n: int
    rho: float | None = 0.3
    kind: SpaceKind = SpaceKind.SQUARE
    seed: int = 0
    r: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SpaceKind(self.kind))
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.r is None:
            if self.rho is None or not 0 < self.rho < 0.5:
                raise ValueError(f"rho must lie in (0, 1/2), got {self.rho!r}")
        elif not self.r > 0:
            raise ValueError("r must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def radius(self) -> float:
        return float(self.r) if self.r is not None else float(self.n) ** self.rho

    @property
    def side(self) -> float:
        return math.sqrt(self.n)


def sample_points(n: int, side: float, seed: int) -> np.ndarray:
    """Uniform points in ``[0, side)^2``.

    Philox is counter based: point ``i`` consumes draws ``2i`` and ``2i+1`` of
    the stream keyed by ``seed``, so it depends only on ``(seed, i)``.
    """
    gen = np.random.Generator(np.random.Philox(key=seed))
    pts = gen.random((n, 2)) * side
    # guard the half-open upper border against rounding
    np.minimum(pts, np.nextafter(side, 0.0), out=pts)
    return pts


def grid_edges(coords: np.ndarray, space: GroundSpace, r: float) -> np.ndarray:
    """All pairs at distance <= r, found via buckets of side >= r.

    Only the 3x3 bucket neighbourhood of every bucket is inspected (wrapping on
    the torus).  Returns an ``(m, 2)`` array with ``u < v``, sorted.
    """
    n = len(coords)
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)
    side = space.side
    nb = max(1, int(side // r))
    cell = side / nb
    bx = np.minimum((coords[:, 0] // cell).astype(np.int64), nb - 1)
    by = np.minimum((coords[:, 1] // cell).astype(np.int64), nb - 1)
    bucket = bx * nb + by
    order = np.argsort(bucket, kind="stable")
    sorted_bucket = bucket[order]
    starts = np.searchsorted(sorted_bucket, np.arange(nb * nb), side="left")
    ends = np.searchsorted(sorted_bucket, np.arange(nb * nb), side="right")

    if space.is_torus:
        offs = sorted({(d % nb) for d in (-1, 0, 1)})
    else:
        offs = [-1, 0, 1]
    chunks = []
    for ox in offs:
        for oy in offs:
            if space.is_torus:
                qx = (bx + ox) % nb
                qy = (by + oy) % nb
                ok = np.ones(n, dtype=bool)
            else:
                qx = bx + ox
                qy = by + oy
                ok = (qx >= 0) & (qx < nb) & (qy >= 0) & (qy < nb)
            src = np.flatnonzero(ok)
            q = qx[src] * nb + qy[src]
            s = starts[q]
            c = ends[q] - s
            total = int(c.sum())
            if total == 0:
                continue
            u = np.repeat(src, c)
            pos = np.repeat(s - (np.cumsum(c) - c), c) + np.arange(total)
            v = order[pos]
            keep = u < v
            u, v = u[keep], v[keep]
            d = np.abs(coords[u] - coords[v])
            if space.is_torus:
                d = np.minimum(d, side - d)
            close = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] <= r * r
            chunks.append(np.column_stack([u[close], v[close]]))
    if not chunks:
        return np.empty((0, 2), dtype=np.int64)
    edges = np.concatenate(chunks).astype(np.int64)
    # sort and dedupe through a scalar key, much faster than unique(axis=0)
    key = np.unique(edges[:, 0] * n + edges[:, 1])
    return np.column_stack([key // n, key % n])


def brute_force_edges(coords: np.ndarray, space: GroundSpace, r: float) -> np.ndarray:
    """O(n^2) reference for :func:`grid_edges`."""
    n = len(coords)
    iu, iv = np.triu_indices(n, k=1)
    d = np.abs(coords[iu] - coords[iv])
    if space.is_torus:
        d = np.minimum(d, space.side - d)
    close = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] <= r * r
    return np.column_stack([iu[close], iv[close]]).astype(np.int64)


def graph_from_points(coords, space: GroundSpace, r: float) -> GeometricGraph:
    """Build the geometric graph of explicit points (bypasses sampling)."""
    coords = np.asarray(coords, dtype=float).reshape(-1, 2)
    if len(coords) and ((coords < 0).any() or (coords >= space.side).any()):
        raise ValueError("points must lie in [0, side)^2")
    if space.is_torus and r >= space.side / 2:
        raise RadiusTooLarge(f"torus radius {r} must be below side/2 = {space.side / 2}")
    edges = grid_edges(coords, space, r)
    return GeometricGraph.from_edges(len(coords), edges, coords, space, radius=float(r))


def sample_rgg(params: RggParams) -> GeometricGraph:
    space = GroundSpace(params.kind, params.side)
    r = params.radius
    if space.is_torus and r >= space.side / 2:
        raise RadiusTooLarge(f"torus radius {r:.6g} must be below side/2 = {space.side / 2:.6g}")
    pts = sample_points(params.n, params.side, params.seed)
    return graph_from_points(pts, space, r)


# ---------------------------------------------------------------------------
# file format


class GraphFormatError(ValueError):
    def __init__(self, message: str, lineno: int):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class MalformedHeader(GraphFormatError):
    pass


class MalformedLine(GraphFormatError):
    pass


class CoordinateOutOfRange(GraphFormatError):
    pass


class DuplicateEdge(GraphFormatError):
    pass


class DanglingEndpoint(GraphFormatError):
    pass


def format_graph(g: GeometricGraph) -> str:
    edges = g.edge_array()
    radius = "" if g.radius is None else f" {g.radius:.17g}"
    lines = [f"geograph v1 {g.space.kind.value} {g.space.side:.17g} {g.n} {len(edges)}{radius}"]
    lines.extend(f"{i} {x:.17g} {y:.17g}" for i, (x, y) in enumerate(g.coords.tolist()))
    lines.extend(f"{u} {v}" for u, v in edges.tolist())
    return "\n".join(lines) + "\n"


def write_graph(g: GeometricGraph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_graph(g))


def parse_graph(text: str) -> GeometricGraph:
    lines = text.splitlines()
    if not lines:
        raise MalformedHeader("empty file", 1)
    head = lines[0].split()
    if len(head) not in (6, 7) or head[0] != "geograph" or head[1] != "v1":
        raise MalformedHeader("expected 'geograph v1 <kind> <side> <n> <m> [r]'", 1)
    try:
        kind = SpaceKind(head[2])
        side = float(head[3])
        n = int(head[4])
        m = int(head[5])
        radius = float(head[6]) if len(head) == 7 else None
        space = GroundSpace(kind, side)
    except ValueError as exc:
        raise MalformedHeader(str(exc), 1) from None
    if n < 0 or m < 0:
        raise MalformedHeader("negative counts", 1)
    if len(lines) < 1 + n + m:
        raise MalformedLine(f"expected {n} vertex and {m} edge lines", len(lines) + 1)

    coords = np.empty((n, 2))
    for i in range(n):
        lineno = i + 2
        parts = lines[1 + i].split()
        try:
            vid, x, y = int(parts[0]), float(parts[1]), float(parts[2])
        except (ValueError, IndexError):
            raise MalformedLine("expected 'id x y'", lineno) from None
        if len(parts) != 3 or vid != i:
            raise MalformedLine(f"expected vertex line for id {i}", lineno)
        if not (0 <= x < side and 0 <= y < side):
            raise CoordinateOutOfRange(f"({x}, {y}) outside [0, {side})^2", lineno)
        coords[i] = (x, y)

    edges = np.empty((m, 2), dtype=np.int64)
    seen = set()
    for j in range(m):
        lineno = n + j + 2
        parts = lines[1 + n + j].split()
        try:
            u, v = int(parts[0]), int(parts[1])
        except (ValueError, IndexError):
            raise MalformedLine("expected 'u v'", lineno) from None
        if len(parts) != 2 or u == v:
            raise MalformedLine("expected two distinct endpoints", lineno)
        for x in (u, v):
            if not 0 <= x < n:
                raise DanglingEndpoint(f"endpoint {x} not in [0, {n})", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {key} listed twice", lineno)
        seen.add(key)
        edges[j] = key
    for k, extra in enumerate(lines[1 + n + m:]):
        if extra.strip():
            raise MalformedLine("trailing content", 2 + n + m + k)
    return GeometricGraph.from_edges(n, edges, coords, space, radius)


def read_graph(path: str | os.PathLike) -> GeometricGraph:
    with open(path, encoding="ascii") as fh:
        return parse_graph(fh.read())
