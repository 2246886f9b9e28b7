"""Arcwise connectivity of planar domains and the resulting graph bound.

Run with ``python demos/linear_connectivity.py``.
"""

import numpy as np

from zmcgraph import catalog, krust

shapes = {
    "square": np.array([0, 1, 1 + 1j, 1j]),
    "disk": np.exp(2j * np.pi * np.arange(512) / 512),
    "L-shape": np.array([0, 1, 1 + 0.5j, 0.5 + 0.5j, 0.5 + 1j, 1j]),
}

# %% Grid shortest paths; the L-shape tends to sqrt(2) from below as the grid refines
for name, poly in shapes.items():
    for res in (128, 256, 512):
        lc = krust.estimate_linear_connectivity(poly, res)
        print(f"{name:8s} res={res:4d} M={lc.M:.6f} pair={np.round(lc.pair, 3)}")
print("16-neighbour stencil stretch:", krust.STENCIL_STRETCH)

# %% Graph interval for Enneper data over an h-image with constant M
data = catalog.enneper(3).data
lc = krust.estimate_linear_connectivity(shapes["L-shape"], 256)
cert = krust.region_linear_conn(data, lc.M, M_error=lc.stretch - 1).certified_graph[0]
print(cert.interval, cert.notes)
