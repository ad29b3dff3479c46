"""Parallel fronts of the dihedral triple (1/6, -1/6, 1/2).

Writes OBJ meshes of the fronts phi_t into ``demo_output/`` and reports
where each one is singular. Run with ``python demos/dihedral_fronts.py``.
"""

from pathlib import Path

import numpy as np

from flatfront import figures, mesh
from flatfront.hgode import q_at, sl_coefficient

out = Path("demo_output")
out.mkdir(exist_ok=True)

# a coarse grid keeps the demo quick; the figures use 300x125
p, norm, grid, U = figures.dihedral_setup(resolution=(121, 51))
slc = sl_coefficient(p)
q = np.abs(q_at(slc, grid.vertices))
print(f"{len(grid.vertices)} grid vertices, |q| ranges over [{q.min():.3g}, {q.max():.3g}]")

for t in (-1.0, 0.0, 0.5, 1.0):
    m = mesh.front_mesh(p, grid, t, norm, U)
    files = mesh.write_obj(m, out / f"front_t{t:+.1f}.obj")
    radius = np.linalg.norm(m.vertices, axis=1).max()
    # the front at distance t is singular where |q| = e^{2t}
    print(f"t = {t:+.1f}: {int(m.singular.sum())} singular vertices, "
          f"{len(m.feature_edges)} locus edges, max ball radius {radius:.6f} -> {files[0]}")

# large |t| pushes the front onto the sphere images of S and DS
far = mesh.front_mesh(p, grid, 8.0, norm, U).vertices[:len(grid.vertices)]
chi_S = mesh.sphere_mesh(p, grid, "S", norm, U).vertices
print(f"t = 8: distance to chi(S) at most {np.linalg.norm(far - chi_S, axis=1).max():.2e}")
