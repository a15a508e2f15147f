"""Exact distance oracle from BFS runs out of every separator vertex."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graphcore import UNREACHABLE, GeometricGraph
from .lca import EulerLCA
from .partition import RecursivePartition


class OracleTooLarge(MemoryError):
    pass


@dataclass(frozen=True)
class SameLeafInterior:
    """Both vertices are interior to one leaf block.

    ``bound`` is the best separator detour, an upper bound on the distance.
    """

    bound: int


class DistanceOracle:
    """Per-block distance tables ``D[B, s]`` plus eccentricity representatives.

    ``work`` is the number of arcs scanned by the construction BFS runs;
    ``entries_touched`` accumulates separator entries read by queries.
    """

    def __init__(self, g: GeometricGraph, P: RecursivePartition, max_entries: int = 300_000_000):
        self.g = g
        self.P = P
        nodes = P.nodes
        nn = len(nodes)
        self.depth = np.array([u.depth for u in nodes], dtype=np.int64)
        self.block_size = np.array([u.size for u in nodes], dtype=np.int64)
        self.sep_count = np.array([len(u.separator) for u in nodes], dtype=np.int64)
        total = int((self.block_size * self.sep_count).sum())
        if total > max_entries:
            raise OracleTooLarge(f"oracle needs {total} entries, cap is {max_entries}")
        self.n_entries = total
        self.table_off = np.zeros(nn, dtype=np.int64)
        self.table_off[1:] = np.cumsum(self.block_size * self.sep_count)[:-1]
        self.table = np.empty(total, dtype=np.int32)

        # local[v, d]: position of v inside its depth-d ancestor block
        height = int(self.depth.max())
        self.local = np.full((g.n, height + 1), -1, dtype=np.int64)
        for u in nodes:
            self.local[u.block, u.depth] = np.arange(u.size)

        self.leaf_of = P.leaf_of
        self.is_leaf_boundary = np.zeros(g.n, dtype=bool)
        for u in nodes:
            if u.is_leaf:
                self.is_leaf_boundary[u.boundary] = True

        self.rep = np.empty(nn, dtype=np.int64)
        self.rep_ecc = np.empty(nn, dtype=np.int64)
        self.work = 0
        for u in nodes:
            self._build_block(u)

        self.lca = EulerLCA([-1 if u.parent is None else u.parent for u in nodes])
        self.chains = [np.asarray(P.ancestors(u.id), dtype=np.int64) for u in nodes]
        self.chain_sep = np.array([int(self.sep_count[c].sum()) for c in self.chains], dtype=np.int64)
        self.chain_ptr = np.zeros(nn + 1, dtype=np.int64)
        self.chain_ptr[1:] = np.cumsum([len(c) for c in self.chains])
        self.chain_flat = np.concatenate(self.chains)
        m = len(self.lca.euler)
        self._lg = np.zeros(m + 2, dtype=np.int64)
        for i in range(2, m + 2):
            self._lg[i] = self._lg[i // 2] + 1
        self.entries_touched = 0

    def _build_block(self, u) -> None:
        indptr, indices = self.g.induced(u.block)
        if u.parent is None:
            rep = int(u.block[0])
        else:
            bd = u.boundary
            rep = int(bd[0]) if len(bd) else int(u.block[0])
        rep_local = int(np.searchsorted(u.block, rep))
        self.rep[u.id] = rep
        ns = len(u.separator)
        rows = self.table[self.table_off[u.id]:self.table_off[u.id] + ns * u.size].reshape(ns, u.size)
        if ns:
            src = np.searchsorted(u.block, u.separator)
            self.work += int(_kernels.bfs_rows(indptr, indices, src, rows))
            hit = np.flatnonzero(src == rep_local)
        else:
            hit = ()
        if len(hit):
            row = rows[hit[0]]
        else:
            row = np.empty((1, u.size), dtype=np.int32)
            self.work += int(_kernels.bfs_rows(indptr, indices, np.array([rep_local]), row))
            row = row[0]
        self.rep_ecc[u.id] = UNREACHABLE if (row >= UNREACHABLE).any() else int(row.max())

    # ------------------------------------------------------------------

    def distance_table(self, block: int) -> np.ndarray:
        """``D[block]`` as a (separator, block-local vertex) array."""
        ns, k = self.sep_count[block], self.block_size[block]
        off = self.table_off[block]
        return self.table[off:off + ns * k].reshape(ns, k)

    def lca_node(self, u: int, v: int) -> int:
        return self.lca(int(self.leaf_of[u]), int(self.leaf_of[v]))

    def pairwise(self, verts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Oracle distances among ``verts`` and the mask of upper-bound-only pairs."""
        lca = self.lca
        dist, interior, touched = _kernels.pairwise_chain(
            np.asarray(verts, dtype=np.int64), self.leaf_of, self.is_leaf_boundary,
            lca.first, lca._table, lca._tour_depth, lca.euler, self._lg,
            self.chain_flat, self.chain_ptr, self.table_off, self.block_size, self.sep_count,
            self.local, self.depth, self.table)
        self.entries_touched += int(touched)
        return dist, interior

    def chain_query(self, u: int, v: int, top: int) -> int:
        val, touched = _kernels.chain_query(u, v, self.chains[top], self.table_off, self.block_size,
                                            self.sep_count, self.local, self.depth, self.table)
        self.entries_touched += int(touched)
        return int(val)


def build_oracle(g: GeometricGraph, P: RecursivePartition, max_entries: int = 300_000_000) -> DistanceOracle:
    return DistanceOracle(g, P, max_entries)


def query_distance(O: DistanceOracle, u: int, v: int) -> int | SameLeafInterior:
    """Separator-based distance; exact unless both ends are leaf-interior in one leaf."""
    if u == v:
        return 0
    top = O.lca_node(u, v)
    val = O.chain_query(u, v, top)
    if O.leaf_of[u] == O.leaf_of[v] and not (O.is_leaf_boundary[u] or O.is_leaf_boundary[v]):
        return SameLeafInterior(val)
    return val


def query_distance_exact(O: DistanceOracle, g: GeometricGraph, u: int, v: int) -> int:
    """Exact d_G(u, v): falls back to a BFS inside the shared leaf when needed."""
    res = query_distance(O, u, v)
    if not isinstance(res, SameLeafInterior):
        return res
    leaf = O.P.nodes[int(O.leaf_of[u])]
    indptr, indices = g.induced(leaf.block)
    dist = np.full(leaf.size, UNREACHABLE, dtype=np.int32)
    queue = np.empty(leaf.size, dtype=np.int32)
    lu = int(np.searchsorted(leaf.block, u))
    lv = int(np.searchsorted(leaf.block, v))
    O.work += int(_kernels.bfs(indptr, indices, lu, dist, queue))
    return int(min(res.bound, dist[lv]))


def ecc_rep(O: DistanceOracle, block: int) -> tuple[int, int]:
    """Stored ``(vertex b, ecc_{G[B]}(b))`` of a block; ecc is UNREACHABLE if G[B] is disconnected."""
    return int(O.rep[block]), int(O.rep_ecc[block])
