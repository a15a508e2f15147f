import itertools

import numpy as np
import pytest

from conftest import connected_rgg, grid_graph, random_partition
from geodiam.diameter import (BudgetExceeded, CandidateEnumerator, CostStop, Engine, Outcome, SizeStop,
                              WorkCounter, build_overlay, compute_diameter, cost_model, decide,
                              enumerate_candidates, maxdist, maxdist_direct, maxdist_overlay,
                              upper_bound)
from geodiam.graphcore import Disconnected, GeometricGraph, bfs, distance_matrix, naive_diameter
from geodiam.oracle import build_oracle
from geodiam.partition import induce_partition, partition_from_blocks


def child_with(P, block):
    return next(c for c in P.nodes[0].children if P.nodes[c].block.tolist() == block)


@pytest.fixture
def p5_oracle(p5, p5_split):
    return build_oracle(p5, p5_split)


def test_upper_bound_p5(p5_split, p5_oracle):
    A, B = child_with(p5_split, [0, 1, 2]), child_with(p5_split, [3, 4])
    assert upper_bound(p5_oracle, A, B) == 7
    assert upper_bound(p5_oracle, 0, 0) == 8


def test_upper_bound_singletons(p5):
    P = partition_from_blocks(p5, [[[0], [1, 2, 3]], [4]])
    O = build_oracle(p5, P)
    a, b = int(P.leaf_of[0]), int(P.leaf_of[4])
    assert upper_bound(O, a, b) == 4


def test_maxdist_direct_p5(p5_split, p5_oracle):
    A, B = child_with(p5_split, [0, 1, 2]), child_with(p5_split, [3, 4])
    assert maxdist_direct(p5_oracle, A, B) == 4
    with pytest.raises(ValueError):
        maxdist_direct(p5_oracle, A, A)


def test_overlay_p5(p5, p5_split, p5_oracle):
    A, B = child_with(p5_split, [0, 1, 2]), child_with(p5_split, [3, 4])
    H = build_overlay(p5_oracle, p5, A, B)
    assert H.vertices.tolist() == [0, 1, 2, 3, 4]
    assert H.boundary.tolist() == [2, 3]
    edges = {(int(H.vertices[u]), int(H.vertices[H.indices[e]]), int(H.weights[e]))
             for u in range(H.n) for e in range(H.indptr[u], H.indptr[u + 1])}
    assert {(u, v, w) for u, v, w in edges if u < v} == {(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)}
    assert H.distances_from(0)[H.local([4])[0]] == 4
    assert maxdist_overlay(H, [0, 1, 2], [3, 4]) == 4


def test_overlay_of_whole_graph_is_graph():
    g = connected_rgg(200, 0.3, seed=3)
    P = induce_partition(g, 0)
    O = build_oracle(g, P)
    H = build_overlay(O, g, 0, 0)
    assert H.n == g.n and len(H.boundary) == 0 and H.unit
    assert np.array_equal(H.indptr, g.indptr) and np.array_equal(H.indices, g.indices)
    assert maxdist_overlay(H, np.arange(g.n), np.arange(g.n)) == naive_diameter(g)


def block_pairs(P, rng, count):
    ids = [u.id for u in P.nodes]
    out = []
    while len(out) < count:
        a, b = (int(x) for x in rng.choice(ids, 2))
        A, B = P.nodes[a], P.nodes[b]
        if a != b and (set(A.block.tolist()) & set(B.block.tolist())):
            continue
        out.append((a, b))
    return out


@pytest.mark.parametrize("seed", range(4))
def test_maxdist_engines_match_brute_force(seed):
    g = connected_rgg(300, 0.25, "torus" if seed % 2 else "square", seed)
    P = induce_partition(g, 3) if seed < 2 else random_partition(g, seed)
    O = build_oracle(g, P)
    D = distance_matrix(g)
    rng = np.random.default_rng(seed)
    for A, B in block_pairs(P, rng, 50):
        want = int(D[np.ix_(P.nodes[A].block, P.nodes[B].block)].max())
        assert maxdist(O, A, B, engine=Engine.OVERLAY) == want
        if A != B:
            assert maxdist(O, A, B, engine=Engine.DIRECT) == want
        assert maxdist(O, A, B) == want


@pytest.mark.parametrize("seed", range(3))
def test_overlay_distances_equal_graph_distances(seed):
    g = connected_rgg(150, 0.3, "square", seed)
    P = random_partition(g, seed + 10)
    O = build_oracle(g, P)
    D = distance_matrix(g)
    rng = np.random.default_rng(seed)
    for A, B in block_pairs(P, rng, 10) + [(0, 0)]:
        H = build_overlay(O, g, A, B)
        for v in H.vertices:
            assert np.array_equal(H.distances_from(int(v)), D[v, H.vertices])


def test_cost_model_singletons_prefer_direct(p5):
    P = partition_from_blocks(p5, [[0], [1], [2], [3], [4]])
    O = build_oracle(p5, P)
    a, b = int(P.leaf_of[0]), int(P.leaf_of[4])
    assert cost_model(O, a, b)[0] is Engine.DIRECT
    assert cost_model(O, a, a)[0] is Engine.OVERLAY


def test_cost_model_choice_is_near_best():
    g = connected_rgg(800, 0.25, "square", 4)
    P = induce_partition(g, 3)
    O = build_oracle(g, P)
    rng = np.random.default_rng(0)
    worse = 0
    pairs = [(a, b) for a, b in block_pairs(P, rng, 100) if a != b]
    for A, B in pairs:
        work = {}
        for eng in Engine:
            c = WorkCounter()
            maxdist(O, A, B, c, eng)
            work[eng] = c.total
        chosen = cost_model(O, A, B)[0]
        other = Engine.DIRECT if chosen is Engine.OVERLAY else Engine.OVERLAY
        worse += work[chosen] > 2 * work[other]
    assert worse <= len(pairs) // 10


def test_root_pruned_when_ell_exceeds_twice_ecc(p5, p5_split, p5_oracle):
    st = next(enumerate_candidates(p5_oracle, 9, SizeStop(1)))
    assert st.pairs == []
    v = decide(p5, p5_split, p5_oracle, 9, k=3)
    assert v.outcome is Outcome.LESS and v.work <= 1


def test_p5_split_once_keeps_cross_pair(p5_split, p5_oracle):
    en = CandidateEnumerator(p5_oracle, 4, WorkCounter())
    assert en.state.pairs == [(0, 0)]
    en.split()
    A, B = child_with(p5_split, [0, 1, 2]), child_with(p5_split, [3, 4])
    assert (min(A, B), max(A, B)) in en.state.pairs
    assert en.largest_block_size() == 3


def test_enumeration_rejects_ell_zero(p5_oracle):
    with pytest.raises(ValueError):
        next(enumerate_candidates(p5_oracle, 0, SizeStop(1)))


@pytest.mark.parametrize("ell, outcome, value", [(1, Outcome.EQUAL_OR_GREATER, 4),
                                                 (3, Outcome.EQUAL_OR_GREATER, 4),
                                                 (4, Outcome.EQUAL_OR_GREATER, 4),
                                                 (5, Outcome.LESS, None)])
def test_decide_p5(p5, p5_split, p5_oracle, ell, outcome, value):
    for k in (3, 5):
        v = decide(p5, p5_split, p5_oracle, ell, k=k)
        assert v.outcome is outcome and v.value == value


def test_decide_rejects_small_k(p5, p5_split, p5_oracle):
    with pytest.raises(ValueError):
        decide(p5, p5_split, p5_oracle, 3, k=2)


def test_decide_timeout(p5, p5_split, p5_oracle):
    v = decide(p5, p5_split, p5_oracle, 4, k=3, budget=0)
    assert v.outcome is Outcome.TIMEOUT


def test_work_counter():
    c = WorkCounter(10)
    c.charge(7)
    assert c.remaining() == 3 and c.fits(3) and not c.fits(4)
    with pytest.raises(BudgetExceeded):
        c.charge(4)
    assert WorkCounter().remaining() == -1


@pytest.mark.parametrize("seed", range(12))
def test_decide_around_the_diameter(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(60, 400))
    g = connected_rgg(n, 0.3, "torus" if seed % 2 else "square", seed)
    D = naive_diameter(g)
    P = induce_partition(g, int(rng.integers(1, 4)))
    O = build_oracle(g, P)
    for k in (P.max_leaf_size, None):
        v = decide(g, P, O, 1, k=k)
        assert v.outcome is Outcome.EQUAL_OR_GREATER and v.value == D
        v = decide(g, P, O, D, k=k)
        assert v.outcome is Outcome.EQUAL_OR_GREATER and v.value == D
        assert decide(g, P, O, D + 1, k=k).outcome is Outcome.LESS


@pytest.mark.parametrize("seed", range(6))
def test_pruned_pairs_are_below_ell(seed):
    g = connected_rgg(200, 0.3, "square", seed)
    D = distance_matrix(g)
    diam = int(D.max())
    P = induce_partition(g, 3) if seed % 2 else random_partition(g, seed)
    O = build_oracle(g, P)
    for ell in (diam - 1, diam, diam + 1):
        pruned = []
        decide(g, P, O, max(ell, 1), k=P.max_leaf_size,
               on_prune=lambda A, B, u: pruned.append((A, B, u)))
        for A, B, u in pruned:
            md = int(D[np.ix_(P.nodes[A].block, P.nodes[B].block)].max())
            assert md <= u < ell


def test_compute_diameter_fixtures(p5, p5_split):
    assert compute_diameter(p5, p5_split).diameter == 4
    assert compute_diameter(grid_graph(3, "torus"), leaf_level=1).diameter == 2
    assert compute_diameter(grid_graph(3, "square"), leaf_level=1).diameter == 4
    assert compute_diameter(GeometricGraph.from_edges(1, [])).diameter == 0


def test_compute_diameter_disconnected():
    with pytest.raises(Disconnected):
        compute_diameter(GeometricGraph.from_edges(3, [(0, 1)]))


@pytest.mark.parametrize("refined", [True, False])
@pytest.mark.parametrize("seed", range(8))
def test_compute_diameter_matches_naive(seed, refined):
    rng = np.random.default_rng(seed)
    g = connected_rgg(int(rng.integers(100, 500)), float(rng.choice([0.2, 0.3])),
                      "torus" if seed % 2 else "square", seed)
    for lvl in (0, 2, 3):
        rep = compute_diameter(g, leaf_level=lvl, refined=refined)
        assert rep.diameter == naive_diameter(g)
        assert rep.work >= rep.oracle_work


def test_compute_diameter_on_random_partitions():
    for seed in range(6):
        g = connected_rgg(150, 0.3, "square", seed)
        P = random_partition(g, seed)
        assert compute_diameter(g, P).diameter == naive_diameter(g)


def test_budget_cap():
    g = connected_rgg(300, 0.3, seed=1)
    with pytest.raises(BudgetExceeded):
        compute_diameter(g, leaf_level=2, budget_cap=100)


def test_disconnected_blocks_stay_candidates():
    g = GeometricGraph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)])
    P = partition_from_blocks(g, [[0, 2, 4], [1, 3, 5]])
    O = build_oracle(g, P)
    for c in P.nodes[0].children:
        assert upper_bound(O, c, c) >= 10 ** 6
    assert compute_diameter(g, P).diameter == 5
    for ell in range(1, 7):
        v = decide(g, P, O, ell, k=3)
        assert (v.outcome is Outcome.LESS) == (ell > 5)


def test_u_sandwich_small():
    for seed in range(4):
        g = connected_rgg(120, 0.3, "torus" if seed % 2 else "square", seed)
        D = distance_matrix(g)
        P = induce_partition(g, 2)
        O = build_oracle(g, P)
        bdiam = {}
        for u in P.nodes:
            bdiam[u.id] = max(int(bfs(g, int(v), u.block)[u.block].max()) for v in u.block)
        for A, B in itertools.combinations_with_replacement(range(len(P.nodes)), 2):
            if A != B and set(P.nodes[A].block.tolist()) & set(P.nodes[B].block.tolist()):
                continue
            md = int(D[np.ix_(P.nodes[A].block, P.nodes[B].block)].max())
            u = upper_bound(O, A, B)
            assert md <= u <= md + 2 * bdiam[A] + 2 * bdiam[B]


def test_cost_stop_descends_only_when_needed():
    g = connected_rgg(400, 0.25, seed=2)
    P = induce_partition(g, 3)
    O = build_oracle(g, P)
    D = naive_diameter(g)
    states = list(enumerate_candidates(O, D, CostStop(), WorkCounter(None)))
    assert len(states) == 1
