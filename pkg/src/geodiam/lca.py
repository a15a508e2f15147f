"""Constant-time lowest common ancestor via Euler tour + sparse table."""

from __future__ import annotations

import numpy as np


class EulerLCA:
    """LCA over a rooted tree given as a parent array (root has parent -1)."""

    def __init__(self, parent):
        parent = np.asarray(parent, dtype=np.int64)
        n = len(parent)
        children = [[] for _ in range(n)]
        root = -1
        for v, p in enumerate(parent.tolist()):
            if p < 0:
                root = v
            else:
                children[p].append(v)
        if root < 0:
            raise ValueError("tree has no root")
        depth = np.zeros(n, dtype=np.int64)
        euler, first = [], np.full(n, -1, dtype=np.int64)
        # iterative DFS; re-emit the parent after each child subtree
        stack = [(root, 0)]
        while stack:
            v, i = stack.pop()
            if i == 0:
                first[v] = len(euler)
            euler.append(v)
            if i < len(children[v]):
                stack.append((v, i + 1))
                c = children[v][i]
                depth[c] = depth[v] + 1
                stack.append((c, 0))
        self.euler = np.asarray(euler, dtype=np.int64)
        self.first = first
        self.depth = depth
        tour_depth = depth[self.euler]
        m = len(self.euler)
        levels = max(1, int(m).bit_length())
        table = np.empty((levels, m), dtype=np.int64)
        table[0] = np.arange(m)
        for k in range(1, levels):
            half = 1 << (k - 1)
            prev = table[k - 1]
            span = m - (1 << k) + 1
            if span <= 0:
                table[k] = prev
                continue
            left, right = prev[:span], prev[half:half + span]
            table[k, :span] = np.where(tour_depth[left] <= tour_depth[right], left, right)
            table[k, span:] = prev[span:]
        self._table = table
        self._tour_depth = tour_depth

    def __call__(self, u: int, v: int) -> int:
        lo, hi = self.first[u], self.first[v]
        if lo > hi:
            lo, hi = hi, lo
        k = int(hi - lo + 1).bit_length() - 1
        a = self._table[k, lo]
        b = self._table[k, hi - (1 << k) + 1]
        return int(self.euler[a] if self._tour_depth[a] <= self._tour_depth[b] else self.euler[b])
