"""Area elements in three frames; Euclidean and horizontal mean curvature.

Run:  python3 demos/05_area_and_curvature.py
"""
import numpy as np

from areavar.geometry import (
    area_element,
    graph_area_density,
    mean_curvature_euclidean,
    p_mean_curvature,
)
from areavar.grids import GridDomain, ScalarField

# One density machine, three graph geometries.
print("euclidean graph, grad u = (0.3, -0.7):",
      graph_area_density("euclidean", None, (0.3, -0.7)))
print("heisenberg graph of u = xy at (x, y) = (0.4, 1.1):",
      graph_area_density("heisenberg", (0.4, 1.1), (1.1, 0.4)), "(= 2|x|)")
print("intrinsic graph, phi = eta:",
      graph_area_density("intrinsic", None, (0.0, 1.0, 0.0)), "(= sqrt 2)")
sign, dens = area_element("euclidean", None, (0.3, -0.7))
print(f"orientation sign for the euclidean graph: {sign:+g} (density {dens:.6f})")

# Euclidean mean curvature of the unit sphere cap is -2 with this orientation.
cap_dom = GridDomain(((-0.6, 0.6), (-0.6, 0.6)), (128, 128))
cap = ScalarField.from_function(cap_dom, lambda x, y: np.sqrt(1.0 - x * x - y * y))
H = mean_curvature_euclidean(cap)
vals = H.values[H.mask]
print(f"\nsphere cap: mean curvature in [{vals.min():.5f}, {vals.max():.5f}]"
      f"  (analytic -2, max error {np.abs(vals + 2).max():.2e})")

# Horizontal (drift) mean curvature: planes and the saddle are p-minimal.
dom = GridDomain(((-1.0, 1.0), (-1.0, 1.0)), (64, 64))
plane = ScalarField.from_function(dom, lambda x, y: 0.5 * x - 0.3 * y)
P = p_mean_curvature(plane)
Xc, Yc = dom.center_coords()
far = P.mask & (np.hypot(Xc - 0.3, Yc - 0.5) >= 0.25)
print(f"plane p-curvature away from its singular point: "
      f"max |H| = {np.abs(P.values[far]).max():.2e}")

saddle = ScalarField.from_function(dom, lambda x, y: x * y)
Pxy = p_mean_curvature(saddle)
print(f"saddle p-curvature off the band: max |H| = "
      f"{np.abs(Pxy.values[Pxy.mask]).max():.2e} "
      f"({int((~Pxy.mask).sum())} cells masked)")
