"""Sample a random geometric graph and look at how hop distance tracks geometry.

n points land uniformly in a square of area n and two points are joined when
they sit within r = n^rho of each other.  Hop distance can never beat
ceil(d_X / r); the upper side is only statistical and shrinks with distance.
"""
from geodiam import RggParams, SpaceKind, sample_rgg
from geodiam.graphcore import is_connected
from geodiam.propcheck import check_lower_stretch, measure_upper_stretch

params = RggParams(n=2000, rho=0.25, kind=SpaceKind.SQUARE, seed=7)
g = sample_rgg(params)
print(f"n={g.n} m={g.m} r={g.radius:.2f} side={g.space.side:.1f} "
      f"avg degree={2 * g.m / g.n:.1f} connected={is_connected(g)}")

# same seed, same graph: the point stream is counter based
assert sample_rgg(params) == g

low = check_lower_stretch(g, samples=5000)
print("lower stretch:", "PASS" if low.passed else "FAIL", low.stats[""])

up = measure_upper_stretch(g, samples=5000)
for bucket, s in up.stats.items():
    if bucket != "all":
        print(f"  {bucket:>9}: {s['pairs']:5d} pairs, 95th percentile excess {s['p95_excess']:.3f}")
