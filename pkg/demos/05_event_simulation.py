"""Simulate a finite experiment and decide, with error bars, where the data sit."""
# %%
import math

import numpy as np

from bellpyramid import models as md
from bellpyramid import sampler as sp

photon = md.PhotonPairModel(0, math.pi / 4, math.pi / 8)
# (0.5, 0.5, 0) lies on a face of the tetrahedron, so its raw estimate flips
# between inside and outside; the z-scores show no violation is significant.
local = md.realize_sl_point((0.5, 0.5, 0.0))

for name, source in [("photon pair", photon), ("local model", local)]:
    print(f"\n--- {name}")
    for n in (1_000, 10_000, 100_000, 1_000_000):
        run = sp.classify_run(sp.sample_events(source, n, seed=5))
        est = np.round(run.estimate.point.as_array(), 4).tolist()
        print(
            f"n={n:>9,}  estimate {est}  SL {run.membership.in_sl.value:<8}"
            f" facet z {np.round(run.facet_z, 1).tolist()}  significant {run.significant_facets}"
        )

# %%
# Events round-trip through a plain text file.
import io

buf = io.StringIO()
sp.write_events(buf, sp.sample_events(photon, 5, seed=0), "five photon events")
print("\n" + buf.getvalue())

# %%
# How honest are the error bars? Repeat with 200 seeds.
target = md.photon_moments(photon).as_array()
z = []
for seed in range(200):
    e = sp.estimate_moments(sp.sample_events(photon, 20_000, seed=seed))
    z.append((e.point.as_array() - target) / np.asarray(e.stderr))
z = np.array(z)
print("spread of standardized errors per coordinate (about 1 if calibrated):", np.round(z.std(axis=0), 3).tolist())
