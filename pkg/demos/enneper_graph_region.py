"""Where does the Enneper-type family stay a graph?

Run with ``python demos/enneper_graph_region.py``. Takes a few seconds.
"""

import math

import numpy as np

from zmcgraph import catalog, krust, univalence
from zmcgraph.weierstrass import DeformParams, planar_map_fn

# %% Weierstrass data (F, G) = (1, w^3) on the unit disk
data = catalog.enneper(3).data
est = krust.norm_estimates(data)
print("sup|G| =", est.sup_abs_G, " inf|G| =", est.inf_abs_G)

# %% Certificates: graph for rho = |c lambda^2| <= 1/sup^2, not a graph beyond
region = krust.classify_region(data)
for cert in region.certified_graph + region.certified_nongraph:
    print(f"{cert.kind:9s} {cert.theorem:18s} {cert.interval}")

# the Jacobian-zero witness behind the non-graph certificate
wit = region.certified_nongraph[0].witness
print("witness w =", complex(*wit["w"]), "at rho =", wit["rho"])

# %% The oracle agrees on a small sweep
table = krust.sweep_validate(data, [0.0, math.pi / 3], [0.5, 1.0, 1.5, 4.0], 301)
for row in table.rows:
    print(f"theta={row.theta:.3f} rho={row.rho:<4} sign={row.c_sign:+d} "
          f"{row.certificate:24s} {row.oracle:14s} {row.status}")
print("contradictions:", len(table.contradictions))

# %% At rho = 1 the image is bounded by a hypocycloid: starlike but not convex
f = planar_map_fn(data, DeformParams(0, 1, 1))
shape = univalence.classify_image(univalence.boundary_image(f, data.domain, 2048))
print("image class:", shape.classification, " center:", np.round(shape.starlike_center, 12))
