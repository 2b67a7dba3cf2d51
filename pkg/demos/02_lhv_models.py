"""Hidden-variable models: where they land and how to build one for a given point."""
# %%
import numpy as np

from bellpyramid import behavior as bh
from bellpyramid import geometry as g
from bellpyramid import models as md

rng = np.random.default_rng(7)

# Deterministic strategies sit on the vertices.
for v in range(1, 5):
    s = md.vertex_strategy(v)
    print(f"V{v}: responses {s.as_tuple()} -> moments {tuple(md.moments_of_strategy(s))}")

# %%
# Mixtures never leave the tetrahedron, however many hidden values are used.
worst = np.inf
for _ in range(2000):
    n = rng.integers(1, 9)
    m = md.LocalHiddenVariableModel(rng.dirichlet(np.ones(n)), rng.uniform(-1, 1, (n, 3)))
    worst = min(worst, min(g.tetrahedron_facet_margins(md.moments_of_lhv(m))))
print(f"\nsmallest facet weight over 2000 random models: {worst:.4f} (never negative)")

# %%
# Single hidden values trace a curved body: xyz is always a perfect square.
a, b, c = 0.6, -0.3, 0.9
x, y, z = md.moments_of_strategy((a, b, c))
print(f"\nsingle lambda ({a}, {b}, {c}): xyz = {x * y * z:.6f}, (abc)^2 = {(a * b * c) ** 2:.6f}")
print("on the curved surface?", md.is_on_curved_n1_surface((x, y, z)))
print("and with one response pinned to 1?", md.is_on_curved_n1_surface(md.moments_of_strategy((1, b, c))))

# %%
# Realization: barycentric weights become hidden-variable weights.
for p in [(0.2, -0.1, 0.3), (0, 0, 1), (-1 / 3, -1 / 3, -1 / 3)]:
    m = md.realize_sl_point(p)
    print(f"\n{p}: {m.n_lambda} hidden values")
    for w, r in zip(m.weights, m.responses):
        print(f"  weight {w:.4f}  responses {r.astype(int).tolist()}")
    b = md.behavior_of_lhv(m)
    print("  behavior valid:", bh.validate(b).valid, " reduced point:", np.round(bh.reduce_to_moment_point(b).as_array(), 12).tolist())

print("\nJSON form of the last model:\n" + md.dumps_lhv(m))
