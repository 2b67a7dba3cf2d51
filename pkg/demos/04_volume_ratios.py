"""Estimate how much of the cube each set fills, and watch the estimate converge."""
# %%
import math

from bellpyramid import montecarlo as mc

for n in (10_000, 100_000, 1_000_000, 4_000_000):
    sl = mc.estimate_volume("SL", n, seed=1, workers=4)
    q = mc.estimate_volume("Q", n, seed=1, workers=4)
    print(f"n={n:>9,}  SL {sl.fraction:.5f} +- {sl.stderr:.5f}   Q {q.fraction:.5f} +- {q.stderr:.5f}")
print(f"exact         SL {1 / 3:.5f}              Q {math.pi**2 / 16:.5f}")

# %%
# One sample, three nested regions.
h = mc.hierarchy_breakdown(2_000_000, seed=3, workers=4)
print(f"\nSL {h.sl:.4f}   Q\\SL {h.q_minus_sl:.4f}   NS\\Q {h.ns_minus_q:.4f}")
print(f"absolute volumes: SL {8 * h.sl:.4f} (8/3), Q {8 * h.q:.4f} (pi^2/2 = {math.pi**2 / 2:.4f})")

# %%
# Same seed, same answer, regardless of thread count.
a = mc.estimate_volume("Q", 3_000_000, seed=11, workers=1)
b = mc.estimate_volume("Q", 3_000_000, seed=11, workers=4)
print(f"\nhits with 1 thread {a.hits}, with 4 threads {b.hits}")
