"""Quadtree-induced recursive partitions, flat partitions, and structural checks."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .geometry import Cell, cell_from_indices, cell_indices
from .graphcore import GeometricGraph


@dataclass(eq=False)
class PartitionNode:
    id: int
    block: np.ndarray
    boundary: np.ndarray
    separator: np.ndarray
    cell: Cell | None
    level: int
    depth: int
    parent: int | None
    children: list[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.block)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(eq=False)
class RecursivePartition:
    """Rooted tree of vertex blocks; node ids are assigned in BFS order (root = 0)."""

    nodes: list[PartitionNode]
    leaf_of: np.ndarray
    n: int
    trivial: bool = False

    root = 0

    @property
    def leaves(self) -> list[int]:
        return [u.id for u in self.nodes if u.is_leaf]

    @property
    def max_leaf_size(self) -> int:
        return max(u.size for u in self.nodes if u.is_leaf)

    @property
    def height(self) -> int:
        return max(u.depth for u in self.nodes)

    def ancestors(self, node: int) -> list[int]:
        """``node`` followed by its ancestors up to the root."""
        chain = [node]
        while self.nodes[chain[-1]].parent is not None:
            chain.append(self.nodes[chain[-1]].parent)
        return chain

    def to_json(self) -> str:
        return json.dumps([
            {
                "id": u.id,
                "level": u.level,
                "depth": u.depth,
                "cell": None if u.cell is None else u.cell.word,
                "parent": u.parent,
                "children": u.children,
                "block_size": u.size,
                "boundary_size": len(u.boundary),
                "separator_size": len(u.separator),
            }
            for u in self.nodes
        ])


def default_leaf_level(n: int, r: float, c_leaf: float = 8.0) -> int:
    """Largest level whose cells (side sqrt(n) / 2^level) are at least c_leaf * r wide."""
    side = math.sqrt(n)
    if side < c_leaf * r:
        return 0
    return int(math.floor(math.log2(side / (c_leaf * r)) + 1e-12))


def _boundary_mask(g: GeometricGraph, label: np.ndarray) -> np.ndarray:
    """Vertices with at least one neighbour carrying a different label."""
    src = np.repeat(np.arange(g.n), g.degrees())
    cross = label[src] != label[g.indices]
    out = np.zeros(g.n, dtype=bool)
    out[src[cross]] = True
    return out


def partition_from_labels(g: GeometricGraph, labels: list[np.ndarray],
                          cells: list[dict] | None = None) -> RecursivePartition:
    """Build a recursive partition from nested per-level labels.

    ``labels[j][v]`` identifies the level-``j`` group of vertex ``v``; groups at
    level ``j+1`` must refine those at level ``j`` and ``labels[0]`` must be
    constant.  Single-child chains are contracted, keeping the deepest group.
    """
    n = g.n
    depth_levels = len(labels)
    # (level, label) -> vertices, restricted to nonempty groups
    nodes: list[PartitionNode] = []
    leaf_of = np.zeros(n, dtype=np.int64)

    def build(level: int, members: np.ndarray, parent: int | None, depth: int) -> int:
        # descend while the group has a single nonempty child
        while level + 1 < depth_levels:
            sub = labels[level + 1][members]
            if np.all(sub == sub[0]):
                level += 1
            else:
                break
        lab = int(labels[level][members[0]])
        cell = cells[level].get(lab) if cells is not None else None
        nid = len(nodes)
        node = PartitionNode(nid, members, np.empty(0, np.int64), np.empty(0, np.int64),
                             cell, level, depth, parent)
        nodes.append(node)
        if level + 1 < depth_levels:
            sub = labels[level + 1][members]
            order = np.argsort(sub, kind="stable")
            keys, starts = np.unique(sub[order], return_index=True)
            groups = np.split(members[order], starts[1:])
            node.children = [-1] * len(groups)
            pending.append((nid, level + 1, groups, depth + 1))
        else:
            leaf_of[members] = nid
        return nid

    # breadth-first construction so ids follow (depth, label) order
    pending: list = []
    build(0, np.arange(n, dtype=np.int64), None, 0)
    while pending:
        batch, pending = pending, []
        for nid, level, groups, depth in batch:
            for i, grp in enumerate(groups):
                nodes[nid].children[i] = build(level, np.sort(grp), nid, depth)

    # boundaries by one label scan per level
    masks = {}
    for u in nodes:
        if u.parent is None:
            continue
        if u.level not in masks:
            masks[u.level] = _boundary_mask(g, labels[u.level])
        u.boundary = u.block[masks[u.level][u.block]]
    for u in nodes:
        if u.children:
            u.separator = np.sort(np.concatenate([nodes[c].boundary for c in u.children]))
    return RecursivePartition(nodes, leaf_of, n, trivial=len(nodes) == 1)


def induce_partition(g: GeometricGraph, leaf_level: int) -> RecursivePartition:
    """Recursive partition induced by the level-``leaf_level`` quadtree."""
    if leaf_level < 0:
        raise ValueError("leaf_level must be non-negative")
    side = g.space.side
    if g.space.is_torus and g.radius is not None and side / 2**leaf_level <= 2 * g.radius:
        warnings.warn(
            f"leaf cell side {side / 2**leaf_level:.3g} is not above 2r = {2 * g.radius:.3g}",
            stacklevel=2,
        )
    ix, iy = cell_indices(g.coords, leaf_level, side)
    labels = []
    cells = []
    for j in range(leaf_level + 1):
        sh = leaf_level - j
        cx, cy = ix >> sh, iy >> sh
        lab = cx * (1 << j) + cy
        labels.append(lab)
        uniq = np.unique(lab)
        cells.append({int(l): cell_from_indices(int(l) // (1 << j), int(l) % (1 << j), j, g.space)
                      for l in uniq})
    P = partition_from_labels(g, labels, cells)
    return P


def partition_from_blocks(g: GeometricGraph, tree) -> RecursivePartition:
    """Partition from a nested list of vertex ids, e.g. ``[[0, 1, 2], [3, 4]]``.

    Leaves are plain lists of ints; internal nodes are lists of subtrees.
    """
    depth = _nest_depth(tree)
    labels = [np.zeros(g.n, dtype=np.int64) for _ in range(depth + 1)]
    counter = [0]

    def assign(sub, level, inherited):
        if level > depth:
            return
        if _is_leaf(sub):
            # propagate the leaf down to every deeper level
            for j in range(level, depth + 1):
                counter[0] += 1
                labels[j][list(sub)] = counter[0]
            return
        for child in sub:
            counter[0] += 1
            members = _flatten(child)
            labels[level][members] = counter[0]
            assign(child, level + 1, counter[0])

    labels_root = _flatten(tree)
    if sorted(labels_root) != list(range(g.n)):
        raise ValueError("leaf blocks must partition the vertex set")
    if _is_leaf(tree):
        return partition_from_labels(g, labels[:1])
    assign(tree, 1, 0)
    return partition_from_labels(g, labels)


def _is_leaf(sub) -> bool:
    return all(isinstance(x, (int, np.integer)) for x in sub)


def _flatten(sub) -> list[int]:
    if _is_leaf(sub):
        return list(sub)
    return [v for child in sub for v in _flatten(child)]


def _nest_depth(sub) -> int:
    if _is_leaf(sub):
        return 0
    return 1 + max(_nest_depth(c) for c in sub)


class NeedSmallerLeaves(ValueError):
    def __init__(self, k: int, max_leaf: int):
        self.max_leaf_size = max_leaf
        super().__init__(f"k={k} is below the largest leaf block ({max_leaf} vertices)")


@dataclass
class FlatPartition:
    """Antichain of partition nodes whose blocks partition V."""

    nodes: list[int]
    candidates: set[tuple[int, int]] = field(default_factory=set)


def flat_partition_by_size(P: RecursivePartition, k: int) -> FlatPartition:
    """Blocks of size <= k whose parent is larger than k."""
    if k < P.max_leaf_size:
        raise NeedSmallerLeaves(k, P.max_leaf_size)
    out = []
    stack = [P.root]
    while stack:
        u = P.nodes[stack.pop()]
        if u.size <= k:
            out.append(u.id)
        else:
            stack.extend(u.children)
    return FlatPartition(sorted(out))


@dataclass
class BalanceReport:
    max_excess: float
    worst_node: int | None


def check_balance(P: RecursivePartition, eps: float | None = None) -> BalanceReport:
    """max over internal nodes of (largest child / smallest child) - 1."""
    worst, node = 0.0, None
    for u in P.nodes:
        if len(u.children) >= 2:
            sizes = [P.nodes[c].size for c in u.children]
            ex = max(sizes) / min(sizes) - 1
            if ex > worst:
                worst, node = ex, u.id
    return BalanceReport(worst, node)


@dataclass
class SeparatorReport:
    alpha: float
    beta: float
    max_ratio: float
    worst_node: int | None
    ratios: dict[int, float]


def check_separators(P: RecursivePartition, alpha: float = 0.5, beta: float = 0.3) -> SeparatorReport:
    """max over internal blocks of |sep(B)| / (|B|^alpha * n^beta)."""
    ratios = {}
    for u in P.nodes:
        if u.children:
            ratios[u.id] = len(u.separator) / (u.size ** alpha * P.n ** beta)
    if not ratios:
        return SeparatorReport(alpha, beta, 0.0, None, ratios)
    worst = max(ratios, key=ratios.get)
    return SeparatorReport(alpha, beta, ratios[worst], worst, ratios)
