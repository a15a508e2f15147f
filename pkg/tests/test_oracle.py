import itertools

import numpy as np
import pytest

from conftest import connected_rgg, random_partition
from geodiam.graphcore import UNREACHABLE, GeometricGraph, distance_matrix
from geodiam.graphgen import RggParams, sample_rgg
from geodiam.oracle import (OracleTooLarge, SameLeafInterior, build_oracle, ecc_rep, query_distance,
                            query_distance_exact)
from geodiam.partition import induce_partition, partition_from_blocks


def test_single_block_has_no_tables(p5):
    O = build_oracle(p5, partition_from_blocks(p5, [0, 1, 2, 3, 4]))
    assert O.n_entries == 0
    assert ecc_rep(O, 0) == (0, 4)


def test_p5_split_tables(p5, p5_split):
    O = build_oracle(p5, p5_split)
    assert p5_split.nodes[0].separator.tolist() == [2, 3]
    assert O.distance_table(0).tolist() == [[2, 1, 0, 1, 2], [3, 2, 1, 0, 1]]
    assert O.n_entries == sum(u.size * len(u.separator) for u in p5_split.nodes)


def test_p5_queries(p5, p5_split):
    O = build_oracle(p5, p5_split)
    assert query_distance(O, 0, 4) == 4
    assert query_distance(O, 3, 3) == 0
    # 0 and 1 are interior to leaf {0,1,2}: the detour via 2 gives 2+1
    assert query_distance(O, 0, 1) == SameLeafInterior(3)
    assert query_distance_exact(O, p5, 0, 1) == 1
    assert query_distance(O, 1, 2) == 1


def test_p5_ecc_reps(p5, p5_split):
    O = build_oracle(p5, p5_split)
    assert ecc_rep(O, 0) == (0, 4)
    B = [c for c in p5_split.nodes[0].children if p5_split.nodes[c].block.tolist() == [3, 4]][0]
    A = [c for c in p5_split.nodes[0].children if c != B][0]
    assert ecc_rep(O, B) == (3, 1)
    assert ecc_rep(O, A) == (2, 2)


def test_singleton_block_rep(p5):
    P = partition_from_blocks(p5, [[0, 1, 2, 3], [4]])
    O = build_oracle(p5, P)
    leaf4 = int(P.leaf_of[4])
    assert ecc_rep(O, leaf4) == (4, 0)


def test_disconnected_pair_is_unreachable():
    g = GeometricGraph.from_edges(4, [(0, 1), (2, 3)])
    P = partition_from_blocks(g, [[0, 1], [2, 3]])
    O = build_oracle(g, P)
    assert query_distance_exact(O, g, 0, 3) == UNREACHABLE
    assert query_distance_exact(O, g, 0, 1) == 1
    assert ecc_rep(O, 0)[1] == UNREACHABLE


def test_disconnected_block_gets_infinite_ecc():
    g = GeometricGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    P = partition_from_blocks(g, [[0, 2], [1, 3]])
    O = build_oracle(g, P)
    for c in P.nodes[0].children:
        assert ecc_rep(O, c)[1] == UNREACHABLE
    for u, v in itertools.combinations(range(4), 2):
        assert query_distance_exact(O, g, u, v) == abs(u - v)


def test_cap():
    g = connected_rgg(200, 0.3)
    P = induce_partition(g, 2)
    with pytest.raises(OracleTooLarge):
        build_oracle(g, P, max_entries=10)


def all_pairs_check(g, P):
    D = distance_matrix(g)
    O = build_oracle(g, P)
    interior_same_leaf = 0
    for u in range(g.n):
        for v in range(g.n):
            q = query_distance(O, u, v)
            if isinstance(q, SameLeafInterior):
                interior_same_leaf += 1
                assert O.leaf_of[u] == O.leaf_of[v]
                assert q.bound >= D[u, v]
            else:
                assert q == D[u, v], (u, v)
            assert query_distance_exact(O, g, u, v) == D[u, v]
    return interior_same_leaf


@pytest.mark.parametrize("seed", range(10))
def test_exact_on_random_partitions(seed):
    g = connected_rgg(int(np.random.default_rng(seed).integers(40, 120)), 0.3,
                      "torus" if seed % 2 else "square", seed)
    all_pairs_check(g, random_partition(g, seed, depth=int(seed % 3) + 1))


@pytest.mark.parametrize("level", [1, 2, 3])
def test_exact_on_geometric_partitions(level):
    g = connected_rgg(250, 0.3, "square", level)
    all_pairs_check(g, induce_partition(g, level))


def test_vectorised_pairwise_matches_scalar():
    g = connected_rgg(300, 0.25, seed=5)
    P = induce_partition(g, 3)
    O = build_oracle(g, P)
    verts = np.arange(0, g.n, 3)
    dist, interior = O.pairwise(verts)
    for i, u in enumerate(verts[:40]):
        for j, v in enumerate(verts):
            q = query_distance(O, int(u), int(v))
            if isinstance(q, SameLeafInterior):
                assert interior[i, j] and dist[i, j] == q.bound
            else:
                assert not interior[i, j] and dist[i, j] == q


def test_query_cost_is_chain_separator_sum():
    g = connected_rgg(2000, 0.2, seed=1)
    P = induce_partition(g, 3)
    O = build_oracle(g, P)
    rng = np.random.default_rng(0)
    costs = []
    for _ in range(200):
        u, v = (int(x) for x in rng.integers(0, g.n, 2))
        if u == v:
            continue
        before = O.entries_touched
        query_distance(O, u, v)
        top = O.lca_node(u, v)
        expected = sum(len(P.nodes[b].separator) for b in P.ancestors(top))
        assert O.entries_touched - before == expected
        costs.append(expected)
    # sublinear in n on this instance
    assert max(costs) < g.n


def test_sampled_pairs_large_instance():
    g = sample_rgg(RggParams(5000, 0.25, "square", 2))
    P = induce_partition(g, 3)
    O = build_oracle(g, P)
    rng = np.random.default_rng(1)
    src = rng.integers(0, g.n, 100)
    rows = distance_matrix(g, src)
    for i, u in enumerate(src):
        for v in rng.integers(0, g.n, 100):
            assert query_distance_exact(O, g, int(u), int(v)) == rows[i, v]
