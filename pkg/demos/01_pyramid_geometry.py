"""Walk around the strongly-local tetrahedron in the (X, Y, Z) moment cube."""
# %%
import numpy as np

from bellpyramid import geometry as g

print("vertices (X, Y, Z):")
for i, v in enumerate(g.VERTICES, 1):
    print(f"  V{i} = {v.tolist()}")
print("edge lengths:", np.round(g.vertex_distances(), 6).tolist())
print(f"volume {g.tetrahedron_volume():.6f} of the cube's {g.NS_VOLUME}")

# %%
# Barycentric weights tell you which corner a point leans towards.
# A negative weight means the point sits beyond the opposite face.
for p in [(0, 0, 0), (0.5, -0.25, 0.1), (1, 1, 1), (0.9, 0.9, -0.5)]:
    state, xi = g.sl_membership(p)
    print(f"{str(p):>20}  xi = {np.round(xi.as_array(), 4).tolist()}  -> {state.value}")

# %%
# Two strong links and a weak third: the classic frustrated triangle.
s = 1 / np.sqrt(2)
m = g.classify((s, s, 0))
print(f"\n(1/sqrt2, 1/sqrt2, 0): SL {m.in_sl.value}, Q {m.in_q.value}, det G = {m.gram_det:.2e}")
z = g.min_sl_third_moment(s, s)
print(f"smallest Z keeping it local: {z:.5f} (sqrt2 - 1 = {np.sqrt(2) - 1:.5f})")

# %%
# A slice Z = 0 through the three sets, drawn in characters.
grid = np.linspace(-1, 1, 41)
xx, yy = np.meshgrid(grid, grid[::-1])
pts = np.stack([xx, yy, np.zeros_like(xx)], axis=-1).reshape(-1, 3)
sl = g.sl_closed_mask(pts).reshape(xx.shape)
q = g.q_closed_mask(pts).reshape(xx.shape)
print("\nslice Z = 0   (# SL, + Q only, . NS only)")
for r in range(len(grid)):
    print("  " + "".join("#" if sl[r, c] else "+" if q[r, c] else "." for c in range(len(grid))))
