"""Refining the flat partition and watching candidate pairs die off.

A pair of blocks stays a candidate while the cheap upper bound
2 ecc(a) + 2 ecc(b) + d(a, b) could still reach ell.
"""
from geodiam import RggParams, build_oracle, ifub, induce_partition, sample_rgg
from geodiam.diameter import CandidateEnumerator, Outcome, WorkCounter, decide

g = sample_rgg(RggParams(2000, 0.3, "square", 2))
diam, _ = ifub(g)
P = induce_partition(g, 3)
O = build_oracle(g, P)

en = CandidateEnumerator(O, diam, WorkCounter())
while en.can_split():
    en.split()
for h in en.history[:: max(1, len(en.history) // 8)]:
    print(f"step {h['step']:3d}: {h['blocks']:3d} blocks, largest {h['largest']:4d}, {h['pairs']:5d} candidate pairs")
print("blocks owning candidates:", len(en.state.blocks_with_candidates()))

for ell in (diam, diam + 1):
    v = decide(g, P, O, ell, k=P.max_leaf_size)
    tail = f" value {v.value}" if v.outcome is Outcome.EQUAL_OR_GREATER else ""
    print(f"decide(ell={ell}) -> {v.outcome.value}{tail}, work {v.work}")
