"""Ramification and winding of the derived Schwarz map along (1/2, 1/2, c).

Run with ``python demos/winding_walkthrough.py``.
"""

import math

import numpy as np

from flatfront import maps
from flatfront.params import HGParams

# D = 4(1-c)^2 - 3 changes sign at c = 1 - sqrt(3)/2
c_star = 1 - math.sqrt(3) / 2
print(f"double ramification point at c = {c_star:.12f}")

for c in (0.9, 0.5, 0.2, c_star, 0.05):
    p = HGParams(0.5, 0.5, c)
    rep = maps.ramification_report(p)
    roots = ", ".join(f"{z.real:.6f}{z.imag:+.6f}i" for z in rep.roots)
    print(f"c = {c:.4f}  D = {rep.discriminant:+.6f}  {rep.klass.value:22s}  roots: {roots}")

print()
# with complex roots DS runs once more around the circle than S does;
# with real roots it reverses twice, at the two ramification points
for c in (0.5, 0.05):
    rec = maps.winding_analysis(HGParams(0.5, 0.5, c), 2000)
    print(f"c = {c}: S covers {rec.arc_angle:.4f} rad, DS covers {rec.progression:.4f} rad "
          f"({rec.extra_turns:+.3f} extra turns)")
    if rec.turning_points:
        print("  turning points:", np.round(rec.turning_points, 6),
              " expected:", np.round([0.5 - math.sqrt(0.1525), 0.5 + math.sqrt(0.1525)], 6))
