"""Compiled inner loops: BFS, Dijkstra, and separator-oracle queries.

Every kernel reports the elementary work it performed (arcs scanned, heap
operations, oracle entries touched) so callers can keep deterministic
operation counts.
"""

import numpy as np
from numba import njit

UNREACHABLE = 1 << 30


@njit(cache=True)
def bfs(indptr, indices, src, dist, queue):
    """Single-source BFS; ``dist`` must be pre-filled with UNREACHABLE."""
    dist[src] = 0
    queue[0] = src
    head = 0
    tail = 1
    arcs = 0
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for e in range(indptr[u], indptr[u + 1]):
            w = indices[e]
            arcs += 1
            if dist[w] == UNREACHABLE:
                dist[w] = du
                queue[tail] = w
                tail += 1
    return arcs


@njit(cache=True)
def bfs_masked(indptr, indices, src, allowed, dist, queue):
    """BFS in the subgraph induced by ``allowed``."""
    dist[src] = 0
    queue[0] = src
    head = 0
    tail = 1
    arcs = 0
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for e in range(indptr[u], indptr[u + 1]):
            w = indices[e]
            arcs += 1
            if allowed[w] and dist[w] == UNREACHABLE:
                dist[w] = du
                queue[tail] = w
                tail += 1
    return arcs


@njit(cache=True)
def bfs_rows(indptr, indices, sources, out):
    """BFS from each source into ``out[i]``; returns total arcs scanned."""
    n = indptr.shape[0] - 1
    queue = np.empty(n, dtype=np.int32)
    arcs = 0
    for i in range(sources.shape[0]):
        row = out[i]
        for v in range(n):
            row[v] = UNREACHABLE
        arcs += bfs(indptr, indices, sources[i], row, queue)
    return arcs


@njit(cache=True)
def eccentricities(indptr, indices, sources):
    """Eccentricity (max finite distance) and reach count of each source."""
    n = indptr.shape[0] - 1
    dist = np.empty(n, dtype=np.int32)
    queue = np.empty(n, dtype=np.int32)
    ecc = np.empty(sources.shape[0], dtype=np.int64)
    reached = np.empty(sources.shape[0], dtype=np.int64)
    arcs = 0
    for i in range(sources.shape[0]):
        for v in range(n):
            dist[v] = UNREACHABLE
        arcs += bfs(indptr, indices, sources[i], dist, queue)
        # the last vertex dequeued sits in the deepest layer
        cnt = 0
        for v in range(n):
            if dist[v] != UNREACHABLE:
                cnt += 1
        ecc[i] = dist[queue[cnt - 1]]
        reached[i] = cnt
    return ecc, reached, arcs


# ---------------------------------------------------------------------------
# weighted shortest paths on overlay graphs


@njit(cache=True)
def _heap_push(heap, size, item):
    i = size
    heap[i] = item
    while i > 0:
        p = (i - 1) >> 1
        if heap[p] <= heap[i]:
            break
        t = heap[p]
        heap[p] = heap[i]
        heap[i] = t
        i = p
    return size + 1


@njit(cache=True)
def _heap_pop(heap, size):
    top = heap[0]
    size -= 1
    heap[0] = heap[size]
    i = 0
    while True:
        lft = 2 * i + 1
        if lft >= size:
            break
        c = lft
        if lft + 1 < size and heap[lft + 1] < heap[lft]:
            c = lft + 1
        if heap[i] <= heap[c]:
            break
        t = heap[c]
        heap[c] = heap[i]
        heap[i] = t
        i = c
    return top, size


@njit(cache=True)
def overlay_maxdist(indptr, indices, weights, sources, is_target, n_targets, budget):
    """Max over targets of Dijkstra distances from each source.

    Returns ``(maxdist, work, completed)``; work counts arc relaxations plus
    heap operations.  Stops early (``completed=False``) once ``work`` exceeds
    ``budget`` (a negative budget means unlimited).
    """
    n = indptr.shape[0] - 1
    dist = np.empty(n, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    heap = np.empty(indices.shape[0] + n + 1, dtype=np.int64)
    best = 0
    work = 0
    shift = np.int64(n + 1)
    for si in range(sources.shape[0]):
        for v in range(n):
            dist[v] = UNREACHABLE
            done[v] = False
        s = sources[si]
        dist[s] = 0
        size = _heap_push(heap, 0, np.int64(s))
        work += 1
        left = n_targets
        while size > 0 and left > 0:
            item, size = _heap_pop(heap, size)
            work += 1
            u = item % shift
            if done[u]:
                continue
            done[u] = True
            if is_target[u]:
                left -= 1
                if dist[u] > best:
                    best = dist[u]
            du = dist[u]
            for e in range(indptr[u], indptr[u + 1]):
                w = indices[e]
                work += 1
                nd = du + weights[e]
                if nd < dist[w]:
                    dist[w] = nd
                    size = _heap_push(heap, size, nd * shift + w)
                    work += 1
        if left > 0:
            best = UNREACHABLE
        if budget >= 0 and work > budget:
            return best, work, False
    return best, work, True


@njit(cache=True)
def overlay_maxdist_unit(indptr, indices, sources, is_target, n_targets, budget):
    """BFS specialisation of :func:`overlay_maxdist` for all-unit weights."""
    n = indptr.shape[0] - 1
    dist = np.empty(n, dtype=np.int32)
    queue = np.empty(n, dtype=np.int32)
    best = 0
    work = 0
    for si in range(sources.shape[0]):
        for v in range(n):
            dist[v] = UNREACHABLE
        work += bfs(indptr, indices, sources[si], dist, queue)
        for v in range(n):
            if is_target[v]:
                if dist[v] > best:
                    best = dist[v]
        if budget >= 0 and work > budget:
            return best, work, False
    return best, work, True


# ---------------------------------------------------------------------------
# separator oracle


@njit(cache=True)
def chain_query(u, v, chain, table_off, block_size, sep_count, local, depth, table):
    """min over chain blocks and separator vertices of D[s][u] + D[s][v].

    ``chain`` lists node ids from the LCA block up to the root.  Returns
    ``(value, entries_touched)``.
    """
    best = np.int64(UNREACHABLE)
    touched = 0
    for i in range(chain.shape[0]):
        b = chain[i]
        ns = sep_count[b]
        if ns == 0:
            continue
        d = depth[b]
        lu = local[u, d]
        lv = local[v, d]
        width = block_size[b]
        base = table_off[b]
        for j in range(ns):
            row = base + j * width
            x = np.int64(table[row + lu]) + np.int64(table[row + lv])
            if x < best:
                best = x
        touched += ns
    if best >= UNREACHABLE:
        best = UNREACHABLE
    return best, touched


@njit(cache=True)
def block_pair_maxdist(avs, bvs, chain, table_off, block_size, sep_count, local, depth, table):
    """Max over a in A, b in B of the chain query (same chain for all pairs)."""
    na = avs.shape[0]
    nb = bvs.shape[0]
    cur = np.full((na, nb), np.int64(UNREACHABLE))
    for i in range(chain.shape[0]):
        blk = chain[i]
        ns = sep_count[blk]
        if ns == 0:
            continue
        d = depth[blk]
        width = block_size[blk]
        base = table_off[blk]
        la = np.empty(na, dtype=np.int64)
        lb = np.empty(nb, dtype=np.int64)
        for x in range(na):
            la[x] = local[avs[x], d]
        for y in range(nb):
            lb[y] = local[bvs[y], d]
        for j in range(ns):
            row = base + j * width
            for x in range(na):
                da = np.int64(table[row + la[x]])
                if da >= UNREACHABLE:
                    continue
                for y in range(nb):
                    t = da + table[row + lb[y]]
                    if t < cur[x, y]:
                        cur[x, y] = t
    best = np.int64(0)
    for x in range(na):
        for y in range(nb):
            c = cur[x, y]
            if c >= UNREACHABLE:
                return np.int64(UNREACHABLE)
            if c > best:
                best = c
    return best


@njit(cache=True)
def _lca(a, b, first, sparse, tour_depth, euler, lg):
    lo = first[a]
    hi = first[b]
    if lo > hi:
        t = lo
        lo = hi
        hi = t
    k = lg[hi - lo + 1]
    x = sparse[k, lo]
    y = sparse[k, hi - (1 << k) + 1]
    if tour_depth[x] <= tour_depth[y]:
        return euler[x]
    return euler[y]


@njit(cache=True)
def pairwise_chain(verts, leaf_of, leaf_boundary, first, sparse, tour_depth, euler, lg,
                   chain_flat, chain_ptr, table_off, block_size, sep_count, local, depth, table):
    """Oracle distances between all pairs of ``verts``.

    Returns ``(dist, interior, touched)`` where ``interior[i, j]`` marks pairs
    whose value is only an upper bound (both leaf-interior in one leaf).
    """
    k = verts.shape[0]
    dist = np.zeros((k, k), dtype=np.int64)
    interior = np.zeros((k, k), dtype=np.bool_)
    touched = 0
    for i in range(k):
        u = verts[i]
        for j in range(i + 1, k):
            v = verts[j]
            top = _lca(leaf_of[u], leaf_of[v], first, sparse, tour_depth, euler, lg)
            chain = chain_flat[chain_ptr[top]:chain_ptr[top + 1]]
            val, t = chain_query(u, v, chain, table_off, block_size, sep_count, local, depth, table)
            touched += t
            dist[i, j] = val
            dist[j, i] = val
            if leaf_of[u] == leaf_of[v] and not (leaf_boundary[u] or leaf_boundary[v]):
                interior[i, j] = True
                interior[j, i] = True
    return dist, interior, touched
