"""Three exact diameter algorithms on the same graph, with their work counters.

Work is counted in arcs scanned, oracle entries read and heap operations, so
the numbers are comparable across machines.
"""
from geodiam import RggParams, TwoSweep, compute_diameter, ifub, naive_diameter, sample_rgg
from geodiam.graphcore import all_eccentricities

for kind in ("square", "torus"):
    g = sample_rgg(RggParams(1500, 0.25, kind, 1))
    ecc, naive_work = all_eccentricities(g)
    d_ifub, trace = ifub(g, TwoSweep(0))
    print(f"{kind}: n={g.n} m={g.m}")
    print(f"  naive    diam={int(ecc.max())} work={naive_work}")
    print(f"  iFUB     diam={d_ifub} work={trace.arcs} fringe BFS={trace.explored}")
    for level in (0, 2):
        rep = compute_diameter(g, leaf_level=level)
        print(f"  framework(leaf level {level}) diam={rep.diameter} work={rep.work} "
              f"decide calls={rep.decide_calls}")
    assert d_ifub == naive_diameter(g)
