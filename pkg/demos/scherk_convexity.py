"""Scherk's data: h alone is not convex, but the minimal graph is.

Run with ``python demos/scherk_convexity.py``. Takes about ten seconds.
"""

import numpy as np

from zmcgraph import catalog, krust
from zmcgraph import univalence as U
from zmcgraph.weierstrass import DeformParams, planar_map_fn

data = catalog.scherk().data
print("h =", data.potentials.h)

# %% Re(1 + w h''/h') = Re((1 + 3w^4)/(1 - w^4)) turns negative near the diagonals
for r in (0.5, 0.9, 0.99):
    z = r * np.exp(1j * np.pi / 4)
    print(f"|w| = {r}: Re(1 + w h''/h') = {((1 + 3 * z**4) / (1 - z**4)).real:+.4f}")
print("analytic_convexity(h):", U.analytic_convexity(data.potentials.h, data.domain))

# %% Images of the c = 0 and c = 1 planar maps
for c in (0.0, 1.0):
    f = planar_map_fn(data, DeformParams(0, 1, c))
    img = U.boundary_image(f, data.domain, 4096)
    shape = U.classify_image(img)
    print(f"c = {c}: {shape.classification}, max |x|, |y| =",
          np.max(np.abs(img.points.real)), np.max(np.abs(img.points.imag)))

# %% The isotropic certificate does not apply; seeding at the convex c = 1 graph does
try:
    krust.region_isotropic(data)
except krust.HypothesisFailed as err:
    print("isotropic certificate refused:", err)
seeded = krust.region_seeded(data, DeformParams(0, 1, 1))
print("seeded certificate:", seeded.certified_graph[0].interval)
