"""The logarithmic-coordinate flow and its attracting equilibrium.

In t = log r the system reduces to an autonomous cooperative flow in
(Y, Z, W).  This script prints the interior equilibrium and its spectrum,
integrates the flow from a displaced start, and shows a real trajectory's
image marching from the early-time limits to the equilibrium.
"""

import numpy as np

from khessian import (
    DynState,
    boundary_equilibria,
    dyn_image,
    early_time_limits,
    equilibrium,
    flow_integrate,
    integrate,
    stability,
    validate,
)
from khessian.radial import IntegrateOptions

cfg = validate(5, 2, 0.0, 1.0, 1.0, 0.0)

eq = equilibrium(cfg)
print(f"interior equilibrium: Y = {eq.Y_inf:.9f}, Z = {eq.Z_inf:.9f}, "
      f"W = {eq.W_inf:.9f} (X readout {eq.X_inf:.9f})")
for pt in boundary_equilibria(cfg):
    tag = "admissible" if pt.admissible else "not admissible"
    print(f"boundary rest point {pt.label}: ({pt.Y:g}, {pt.Z:g}, {pt.W:g})  [{tag}]")

rep = stability(cfg)
print(f"\ncharacteristic polynomial x^3 + {rep.a:.6f} x^2 + {rep.b:.6f} x + {rep.c:.6f}")
print(f"eigenvalues: " + ", ".join(f"{ev.real:.6f}{ev.imag:+.6f}i" for ev in rep.eigenvalues))
print(f"stable: {rep.stable}   strengthened Hurwitz condition ab > 9c: {rep.ab_gt_9c}")

# flow from half the equilibrium: the distance collapses geometrically
start = DynState(0.0, float("nan"), 0.5 * eq.Y_inf, 0.5 * eq.Z_inf, 0.5 * eq.W_inf)
states = flow_integrate(cfg, start, 60.0)
print(f"\nflow from 0.5 x equilibrium, {len(states) - 1} steps:")
print(f"{'t':>6}  {'distance to equilibrium':>24}")
marks = iter([0.0, 5.0, 10.0, 20.0, 40.0, 60.0])
next_mark = next(marks)
for st in states:
    if st.t >= next_mark:
        dist = max(abs(st.Y - eq.Y_inf), abs(st.Z - eq.Z_inf), abs(st.W - eq.W_inf))
        print(f"{st.t:>6.1f}  {dist:>24.3e}")
        try:
            next_mark = next(marks)
        except StopIteration:
            break

# a genuine radial solution traces the same path: from the early-time
# limits at r -> 0 into the equilibrium as r -> infinity
lims = early_time_limits(cfg)
traj = integrate(cfg, 1.0, 1.0, 1e4, IntegrateOptions(blowup_threshold=1e16))
img = dyn_image(cfg, traj)
print(f"\nradial trajectory image (early-time limits X={lims['X']:g}, Y={lims['Y']:g}, "
      f"Z={lims['Z']:g}, W plateau {lims['W_plateau']:g}):")
print(f"{'r':>10} {'X':>10} {'Y':>10} {'Z':>10} {'W':>10}")
for edge in (1e-6, 1e-3, 1.0, 10.0, 1e4):
    i = int(np.searchsorted(traj.r, edge, side="right")) - 1
    print(f"{traj.r[i]:>10.2g} {img.X[i]:>10.6f} {img.Y[i]:>10.6f} "
          f"{img.Z[i]:>10.6f} {img.W[i]:>10.6f}")
