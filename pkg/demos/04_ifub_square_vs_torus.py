"""Why iFUB is fast on the square and slow on the torus.

On the square a few corner vertices realise the diameter, so the fringe of
the 2-sweep center is tiny.  The torus has no corners: almost every vertex
has a diametric partner and iFUB has to BFS from a large part of the graph.
"""
import numpy as np

from geodiam import RggParams, sample_rgg
from geodiam.graphcore import all_eccentricities, bfs
from geodiam.ifub import explored_bounds_check, ifub, ifub_from_table

n = 2000
g = sample_rgg(RggParams(n, 0.3, "square", 0))
d, tr = ifub(g)
print(f"square: diam {d}, fringe BFS {tr.explored} of {n}, total BFS {tr.total_bfs}")
print("  explored set within bounds:", explored_bounds_check(tr, d).ok)

g = sample_rgg(RggParams(n, 0.3, "torus", 0))
ecc, _ = all_eccentricities(g)
counts = []
for c in np.random.default_rng(0).choice(n, 10, replace=False):
    _, tr = ifub_from_table(bfs(g, int(c)), ecc, int(c))
    counts.append(tr.explored)
print(f"torus: diam {ecc.max()}, fringe BFS over 10 centers {min(counts)}..{max(counts)} of {n}")
