"""Photon pairs live on the elliptope surface and can step outside the tetrahedron."""
# %%
import math

import numpy as np

from bellpyramid import geometry as g
from bellpyramid import models as md
from bellpyramid.cli import scan_quantum

m = md.PhotonPairModel(0, math.pi / 4, math.pi / 8)
p = md.photon_moments(m)
print("polarizers at 0, 45, 22.5 degrees")
print(f"moments {np.round(p.as_array(), 5).tolist()}, det G = {g.gram_det_array(p.as_array()):.1e}")
print("facet weights:", np.round(g.tetrahedron_facet_margins(p), 4).tolist())
print("region:", g.classify(p).region)

# %%
# Every angle triple gives a rank-deficient Gram matrix.
rng = np.random.default_rng(1)
dets = [g.gram_det_array(md.photon_moments(md.PhotonPairModel(*t)).as_array()) for t in rng.uniform(0, math.pi, (1000, 3))]
print(f"\nmax |det G| over 1000 random triples: {max(map(abs, dets)):.1e}")

# %%
# Scan theta1, theta2 with theta0 = 0 and mark which settings defeat every local model.
rows = scan_quantum(0.0, 0.0, math.pi, 17)
grid = np.array([r["sl_violating"] for r in rows]).reshape(17, 17)
print(f"\n{grid.sum()} of {grid.size} grid points lie outside the tetrahedron")
print("theta2 ->   (X marks a local-model violation, rows are theta1 from 0 to pi)")
for row in grid:
    print("  " + "".join("X" if v else "." for v in row))
