"""Exact diameter via upper-bound pruning over a separator hierarchy.

The pipeline: a distance oracle over a recursive partition, top-down
enumeration of candidate block pairs whose upper bound reaches a guess
``ell``, exact maxdist for the surviving pairs (oracle queries or overlay
graphs), and a budgeted search over ``ell``.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .graphcore import UNREACHABLE, GeometricGraph, require_connected
from .oracle import DistanceOracle, SameLeafInterior, build_oracle, query_distance, query_distance_exact
from .partition import RecursivePartition, default_leaf_level, induce_partition


class BudgetExceeded(Exception):
    pass


class WorkCounter:
    """Elementary-operation counter with an optional hard budget.

    Units: oracle entries touched, BFS arcs scanned, heap operations.
    """

    def __init__(self, budget: int | None = None):
        self.total = 0
        self.budget = budget

    def remaining(self) -> int:
        return -1 if self.budget is None else max(0, self.budget - self.total)

    def charge(self, amount: int) -> None:
        self.total += int(amount)
        if self.budget is not None and self.total > self.budget:
            raise BudgetExceeded

    def fits(self, amount: float) -> bool:
        return self.budget is None or self.total + amount <= self.budget


class Outcome(enum.Enum):
    LESS = "less"
    EQUAL_OR_GREATER = "equal_or_greater"
    TIMEOUT = "timeout"


@dataclass
class DiameterVerdict:
    outcome: Outcome
    value: int | None
    work: int
    ell: int
    stats: dict = field(default_factory=dict)
    lower_bound: int | None = None
    exhaustive: bool = False


def _oracle_value(O: DistanceOracle, u: int, v: int) -> tuple[int, int]:
    before = O.entries_touched
    d = query_distance(O, u, v)
    if isinstance(d, SameLeafInterior):
        w0 = O.work
        d = query_distance_exact(O, O.g, u, v)
        return d, O.entries_touched - before + O.work - w0
    return d, O.entries_touched - before


def upper_bound(O: DistanceOracle, A: int, B: int, counter: WorkCounter | None = None) -> int:
    """u(A, B) from the stored eccentricity representatives of both blocks."""
    a, ea = int(O.rep[A]), int(O.rep_ecc[A])
    if A == B:
        return UNREACHABLE if ea >= UNREACHABLE else 2 * ea
    b, eb = int(O.rep[B]), int(O.rep_ecc[B])
    if ea >= UNREACHABLE or eb >= UNREACHABLE:
        return UNREACHABLE
    d, cost = _oracle_value(O, a, b)
    if counter is not None:
        counter.charge(cost)
    if d >= UNREACHABLE:
        return UNREACHABLE
    return 2 * ea + 2 * eb + d


def _disjoint_lca(O: DistanceOracle, A: int, B: int) -> int:
    top = O.lca(A, B)
    if top == A or top == B:
        raise AssertionError(f"blocks {A} and {B} are nested, not disjoint")
    return top


def direct_cost(O: DistanceOracle, A: int, B: int) -> int:
    top = O.lca(A, B)
    return int(O.block_size[A] * O.block_size[B] * O.chain_sep[top])


def maxdist_direct(O: DistanceOracle, A: int, B: int, counter: WorkCounter | None = None) -> int:
    """max over A x B of oracle distances; A and B must be distinct, disjoint blocks."""
    if A == B:
        raise ValueError("the direct engine handles distinct blocks only")
    top = _disjoint_lca(O, A, B)
    if counter is not None:
        counter.charge(direct_cost(O, A, B))
    nodes = O.P.nodes
    val = _kernels.block_pair_maxdist(nodes[A].block, nodes[B].block, O.chains[top], O.table_off,
                                      O.block_size, O.sep_count, O.local, O.depth, O.table)
    O.entries_touched += direct_cost(O, A, B)
    return int(val)


@dataclass(eq=False)
class OverlayGraph:
    """G[A u B] plus weighted edges among the boundary vertices of A and B.

    ``vertices`` maps local ids to global ids; ``weights`` are exact
    G-distances (1 on the unit edges).
    """

    vertices: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    boundary: np.ndarray
    unit: bool
    build_work: int

    @property
    def n(self) -> int:
        return len(self.vertices)

    def local(self, global_ids) -> np.ndarray:
        return np.searchsorted(self.vertices, np.asarray(global_ids))

    def distances_from(self, v: int) -> np.ndarray:
        """Dijkstra distances from global vertex ``v`` to every overlay vertex."""
        src = int(self.local([v])[0])
        dist = np.full(self.n, UNREACHABLE, dtype=np.int64)
        dist[src] = 0
        heap = [(0, src)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for e in range(self.indptr[u], self.indptr[u + 1]):
                w = self.indices[e]
                nd = d + int(self.weights[e])
                if nd < dist[w]:
                    dist[w] = nd
                    heapq.heappush(heap, (nd, w))
        return dist


def build_overlay(O: DistanceOracle, g: GeometricGraph, A: int, B: int) -> OverlayGraph:
    nodes = O.P.nodes
    if A == B:
        verts = nodes[A].block
        bnd = nodes[A].boundary
    else:
        verts = np.union1d(nodes[A].block, nodes[B].block)
        bnd = np.union1d(nodes[A].boundary, nodes[B].boundary)
    indptr, indices = g.induced(verts)
    work = int(g.degrees()[verts].sum())
    k = len(bnd)
    touched0, oracle_work0 = O.entries_touched, O.work
    if k >= 2:
        dist, interior = O.pairwise(bnd)
        for i, j in zip(*np.nonzero(np.triu(interior))):
            exact = query_distance_exact(O, g, int(bnd[i]), int(bnd[j]))
            dist[i, j] = dist[j, i] = exact
        iu, ju = np.triu_indices(k, 1)
        w = dist[iu, ju]
        ok = w < UNREACHABLE
        lb = np.searchsorted(verts, bnd)
        cu, cv, cw = lb[iu[ok]], lb[ju[ok]], w[ok]
    else:
        cu = cv = cw = np.empty(0, dtype=np.int64)
    work += O.entries_touched - touched0 + O.work - oracle_work0
    unit = not (cw > 1).any()

    src = np.concatenate([np.repeat(np.arange(len(verts)), np.diff(indptr)), cu, cv])
    dst = np.concatenate([indices.astype(np.int64), cv, cu])
    wt = np.concatenate([np.ones(len(indices), dtype=np.int64), cw, cw])
    order = np.lexsort((dst, src))
    src, dst, wt = src[order], dst[order], wt[order]
    h_indptr = np.zeros(len(verts) + 1, dtype=np.int64)
    np.add.at(h_indptr, src + 1, 1)
    np.cumsum(h_indptr, out=h_indptr)
    return OverlayGraph(np.asarray(verts, dtype=np.int64), h_indptr, dst.astype(np.int32), wt,
                        np.asarray(bnd, dtype=np.int64), bool(unit), int(work))


def maxdist_overlay(H: OverlayGraph, A_vertices, B_vertices, counter: WorkCounter | None = None) -> int:
    """max over a in A, b in B of d_H(a, b), one shortest-path run per a."""
    sources = H.local(A_vertices).astype(np.int64)
    targets = np.zeros(H.n, dtype=np.bool_)
    targets[H.local(B_vertices)] = True
    n_targets = int(targets.sum())
    budget = -1 if counter is None else counter.remaining()
    if H.unit:
        best, work, done = _kernels.overlay_maxdist_unit(H.indptr, H.indices, sources, targets,
                                                         n_targets, budget)
    else:
        best, work, done = _kernels.overlay_maxdist(H.indptr, H.indices, H.weights, sources, targets,
                                                    n_targets, budget)
    if counter is not None:
        counter.charge(work)
    return int(min(best, UNREACHABLE))


class Engine(enum.Enum):
    DIRECT = "direct"
    OVERLAY = "overlay"


@dataclass
class BlockStats:
    """Per-block quantities the cost model reads (cached once per oracle)."""

    size: np.ndarray
    boundary: np.ndarray
    degree_sum: np.ndarray
    max_degree: int

    @classmethod
    def of(cls, O: DistanceOracle) -> "BlockStats":
        cached = getattr(O, "_block_stats", None)
        if cached is None:
            deg = O.g.degrees()
            nodes = O.P.nodes
            cached = cls(
                np.array([u.size for u in nodes], dtype=np.int64),
                np.array([len(u.boundary) for u in nodes], dtype=np.int64),
                np.array([int(deg[u.block].sum()) for u in nodes], dtype=np.int64),
                int(deg.max(initial=0)),
            )
            O._block_stats = cached
        return cached


def overlay_cost(O: DistanceOracle, A: int, B: int) -> float:
    st = BlockStats.of(O)
    top = O.lca(A, B) if A != B else A
    if A == B:
        s, arcs = st.boundary[A], st.degree_sum[A]
    else:
        s = st.boundary[A] + st.boundary[B]
        arcs = st.degree_sum[A] + st.degree_sum[B]
    query = max(1, int(O.chain_sep[top]))
    build = arcs + s * (s - 1) / 2 * query
    clique = s * (s - 1)
    # unit weights: one BFS per source; otherwise relax + push + pop per arc
    per_source = arcs + clique if clique == 0 else 3 * (arcs + clique)
    return float(build + st.size[A] * per_source)


def cost_model(O: DistanceOracle, A: int, B: int) -> tuple[Engine, float]:
    """Cheaper maxdist engine for (A, B) and its estimated work."""
    ov = overlay_cost(O, A, B)
    if A == B:
        return Engine.OVERLAY, ov
    dc = float(direct_cost(O, A, B))
    if dc <= ov:
        return Engine.DIRECT, dc
    return Engine.OVERLAY, ov


def maxdist(O: DistanceOracle, A: int, B: int, counter: WorkCounter | None = None,
            engine: Engine | None = None) -> int:
    if engine is None:
        engine = cost_model(O, A, B)[0]
    if engine is Engine.DIRECT:
        return maxdist_direct(O, A, B, counter)
    H = build_overlay(O, O.g, A, B)
    if counter is not None:
        counter.charge(H.build_work)
    nodes = O.P.nodes
    return maxdist_overlay(H, nodes[A].block, nodes[B].block, counter)


# ---------------------------------------------------------------------------
# candidate enumeration


@dataclass
class SizeStop:
    """Stop once every block of the flat partition has at most ``k`` vertices."""

    k: int


@dataclass
class CostStop:
    """Stop at the first flat partition whose estimated maxdist bill fits the budget."""


@dataclass
class CandidateState:
    flat: set[int]
    partners: dict[int, set[int]]
    step: int = 0
    bill: float = 0.0

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return sorted({(min(a, b), max(a, b)) for a, ps in self.partners.items() for b in ps})

    def blocks_with_candidates(self) -> list[int]:
        return sorted(a for a, ps in self.partners.items() if ps)


class CandidateEnumerator:
    """Top-down refinement of the flat partition, tracking candidate pairs.

    ``on_prune(A, B, u)`` is called for every evaluated pair with ``u < ell``;
    ``on_eval(A, B, u)`` for every evaluated pair.
    """

    def __init__(self, O: DistanceOracle, ell: int, counter: WorkCounter,
                 on_prune: Callable | None = None, on_eval: Callable | None = None,
                 track_bill: bool = False):
        self.O = O
        self.P = O.P
        self.ell = ell
        self.counter = counter
        self.on_prune = on_prune
        self.on_eval = on_eval
        self.track_bill = track_bill
        self.costs: dict[tuple[int, int], float] = {}
        root = self.P.root
        self.state = CandidateState({root}, {root: set()})
        self._heap = []
        self._push(root)
        if self._evaluate(root, root):
            self._add(root, root)
        self.history = [self._snapshot()]

    def _push(self, b: int) -> None:
        node = self.P.nodes[b]
        if node.children:
            heapq.heappush(self._heap, (-node.size, b))

    def _evaluate(self, A: int, B: int) -> bool:
        u = upper_bound(self.O, A, B, self.counter)
        self.counter.charge(1)
        if self.on_eval is not None:
            self.on_eval(A, B, u)
        if u < self.ell:
            if self.on_prune is not None:
                self.on_prune(A, B, u)
            return False
        return True

    def _add(self, A: int, B: int) -> None:
        self.state.partners.setdefault(A, set()).add(B)
        self.state.partners.setdefault(B, set()).add(A)
        if self.track_bill:
            key = (min(A, B), max(A, B))
            c = cost_model(self.O, A, B)[1]
            self.costs[key] = c
            self.state.bill += c

    def _drop_block(self, B: int) -> set[int]:
        parts = self.state.partners.pop(B, set())
        for X in parts:
            if X != B:
                self.state.partners[X].discard(B)
            if self.track_bill:
                self.state.bill -= self.costs.pop((min(B, X), max(B, X)), 0.0)
        return parts

    @property
    def largest(self) -> int:
        return -self._heap[0][0] if self._heap else 0

    def can_split(self) -> bool:
        return bool(self._heap)

    def split(self) -> int:
        """Replace the largest splittable block (lowest id on ties) by its children."""
        _, B = heapq.heappop(self._heap)
        parts = self._drop_block(B)
        kids = self.P.nodes[B].children
        self.state.flat.discard(B)
        for c in kids:
            self.state.flat.add(c)
            self.state.partners[c] = set()
            self._push(c)
        for X in sorted(parts - {B}):
            for c in kids:
                if self._evaluate(c, X):
                    self._add(c, X)
        if B in parts:
            for i, ci in enumerate(kids):
                for cj in kids[i:]:
                    if self._evaluate(ci, cj):
                        self._add(ci, cj)
        self.state.step += 1
        self.history.append(self._snapshot())
        return B

    def _snapshot(self) -> dict:
        ps = self.state.partners
        n_pairs = sum(len(p) + (a in p) for a, p in ps.items()) // 2
        return {"step": self.state.step, "blocks": len(self.state.flat),
                "largest": self.largest_block_size(), "pairs": n_pairs}

    def largest_block_size(self) -> int:
        return max(self.P.nodes[b].size for b in self.state.flat)


def enumerate_candidates(O: DistanceOracle, ell: int, stop, counter: WorkCounter | None = None,
                         on_prune: Callable | None = None):
    """Yield the candidate state after each refinement step until ``stop`` fires.

    ``stop`` is a :class:`SizeStop` or :class:`CostStop`; with ``CostStop`` the
    counter's budget is the time limit.
    """
    if ell < 1:
        raise ValueError("ell must be at least 1")
    counter = counter or WorkCounter()
    en = CandidateEnumerator(O, ell, counter, on_prune=on_prune, track_bill=isinstance(stop, CostStop))
    yield en.state
    while en.can_split() and not _should_stop(en, stop, counter):
        en.split()
        yield en.state


def _should_stop(en: CandidateEnumerator, stop, counter: WorkCounter) -> bool:
    if not en.state.partners or not any(en.state.partners.values()):
        return True
    if isinstance(stop, SizeStop):
        return en.largest_block_size() <= stop.k
    return counter.fits(en.state.bill)


def decide(g: GeometricGraph, P: RecursivePartition, O: DistanceOracle, ell: int,
           k: int | None = None, budget: int | None = None, stop=None,
           on_prune: Callable | None = None) -> DiameterVerdict:
    """Compare diam(G) with ``ell``: LESS, EQUAL_OR_GREATER (exact value), or TIMEOUT.

    ``k`` selects the size-based stop rule; without it the cost-based rule is
    used (descend until the estimated maxdist bill fits the budget).
    """
    if stop is None:
        if k is not None:
            if k < P.max_leaf_size:
                raise ValueError(f"k={k} below the largest leaf size {P.max_leaf_size}")
            stop = SizeStop(k)
        else:
            stop = CostStop()
    counter = WorkCounter(budget)
    stats = {"engines": {"direct": 0, "overlay": 0}}
    pruned = [0]

    def prune_hook(A, B, u):
        pruned[0] += 1
        if on_prune is not None:
            on_prune(A, B, u)

    try:
        en = CandidateEnumerator(O, ell, counter, on_prune=prune_hook,
                                 track_bill=isinstance(stop, CostStop))
        while en.can_split() and not _should_stop(en, stop, counter):
            en.split()
        state = en.state
        pairs = state.pairs
        stats["levels"] = en.history
        stats["final_blocks"] = len(state.flat)
        stats["final_pairs"] = len(pairs)
        stats["final_largest"] = en.largest_block_size()
        stats["candidates_per_block"] = max((len(p) for p in state.partners.values()), default=0)
        stats["blocks_with_candidates"] = len(state.blocks_with_candidates())
        plan = []
        bill = 0.0
        for A, B in pairs:
            eng, cost = cost_model(O, A, B)
            plan.append((A, B, eng))
            bill += cost
        if isinstance(stop, CostStop) and not counter.fits(bill):
            # no flat partition fits the time limit
            return DiameterVerdict(Outcome.TIMEOUT, None, counter.total, ell, stats)
        best = -1
        for A, B, eng in plan:
            stats["engines"][eng.value] += 1
            best = max(best, maxdist(O, A, B, counter, eng))
    except BudgetExceeded:
        return DiameterVerdict(Outcome.TIMEOUT, None, counter.total, ell, stats)
    lower = best if best >= 0 else None
    if best < ell:
        # with nothing pruned the candidate pairs cover V x V, so best is diam
        return DiameterVerdict(Outcome.LESS, None, counter.total, ell, stats, lower,
                               exhaustive=pruned[0] == 0 and lower is not None)
    return DiameterVerdict(Outcome.EQUAL_OR_GREATER, best, counter.total, ell, stats, lower,
                           exhaustive=pruned[0] == 0)


@dataclass
class DiameterReport:
    diameter: int
    work: int
    oracle_work: int
    decide_calls: int
    leaf_level: int | None
    k: int | None
    budget: int | None
    final: dict


def compute_diameter(g: GeometricGraph, P: RecursivePartition | None = None,
                     O: DistanceOracle | None = None, leaf_level: int | None = None,
                     refined: bool = True, initial_budget: int | None = None,
                     budget_cap: int | None = None) -> DiameterReport:
    """Exact diameter by a doubling work budget and a binary search on ell.

    ``refined=True`` uses the cost-based stop rule (one search per budget);
    otherwise ``k`` is doubled from the largest leaf size inside each budget.
    With ``budget_cap`` set, BudgetExceeded is raised once the doubled budget
    would pass the cap.
    """
    require_connected(g)
    if g.n <= 1:
        return DiameterReport(0, 0, 0, 0, leaf_level, None, None, {})
    if P is None:
        if leaf_level is None:
            r = g.radius if g.radius is not None else 1.0
            leaf_level = default_leaf_level(g.n, r)
        P = induce_partition(g, leaf_level)
    if O is None:
        O = build_oracle(g, P)
    total = O.work
    calls = 0
    # diam lies between ecc(v) and 2 ecc(v) for the root representative v
    lo0 = max(1, int(O.rep_ecc[P.root]))
    hi0 = min(g.n - 1, 2 * lo0)
    T = initial_budget or max(16, 2 * g.m)

    if refined:
        ks = [None]
    else:
        ks = []
        k = P.max_leaf_size
        while True:
            ks.append(k)
            if k >= max(g.n // 2, P.max_leaf_size):
                break
            k = min(2 * k, max(g.n // 2, P.max_leaf_size))

    while True:
        for k in ks:
            lo, hi = lo0, hi0
            while lo <= hi:
                ell = (lo + hi) // 2
                v = decide(g, P, O, ell, k=k, budget=T)
                calls += 1
                total += v.work
                if v.outcome is Outcome.EQUAL_OR_GREATER:
                    return DiameterReport(v.value, total, O.work, calls, leaf_level, k, T, v.stats)
                if v.outcome is Outcome.LESS:
                    if v.exhaustive:
                        return DiameterReport(v.lower_bound, total, O.work, calls, leaf_level, k,
                                              T, v.stats)
                    hi = ell - 1
                    if v.lower_bound is not None and v.lower_bound > lo:
                        lo = v.lower_bound
                else:
                    lo = ell + 1
        T *= 2
        if budget_cap is not None and T > budget_cap:
            raise BudgetExceeded(f"no answer within the work cap {budget_cap}")
