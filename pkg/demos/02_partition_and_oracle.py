"""Quadtree partition of a graph and the exact distance oracle built on it.

Each block keeps BFS tables from its separator vertices; a query walks the
chain from the lowest common ancestor block to the root and takes a min.
"""
import numpy as np

from geodiam import RggParams, build_oracle, induce_partition, query_distance, sample_rgg
from geodiam.graphcore import bfs
from geodiam.oracle import SameLeafInterior, ecc_rep, query_distance_exact

g = sample_rgg(RggParams(1500, 0.3, "square", 3))
P = induce_partition(g, leaf_level=3)
print(f"{len(P.nodes)} blocks, height {P.height}, largest leaf {P.max_leaf_size}")
for lvl in range(4):
    seps = [len(u.separator) for u in P.nodes if u.level == lvl]
    if seps:
        print(f"  level {lvl}: {len(seps)} blocks, separator sizes {min(seps)}..{max(seps)}")

O = build_oracle(g, P)
print(f"oracle stores {O.n_entries} entries ({O.n_entries / g.n:.1f} per vertex)")

rng = np.random.default_rng(0)
for u, v in rng.integers(0, g.n, (5, 2)):
    q = query_distance(O, int(u), int(v))
    truth = int(bfs(g, int(u))[v])
    if isinstance(q, SameLeafInterior):
        print(f"  d({u},{v}): same leaf interior, detour {q.bound}, exact {query_distance_exact(O, g, int(u), int(v))}, bfs {truth}")
    else:
        print(f"  d({u},{v}) = {q}  (bfs {truth})")

rep, ecc = ecc_rep(O, P.root)
print(f"root representative {rep} has eccentricity {ecc}")
