"""Power-law growth of global solutions.

In the attractive regime every positive radial solution grows like
A r^alpha_u and B r^alpha_v.  Integrating the reference configuration far
out shows the log-log slopes locking onto the predicted exponents and the
amplitude ratios u / (A r^alpha_u), v / (B r^alpha_v) converging to 1
decade by decade.
"""

import numpy as np

from khessian import (
    IntegrateOptions,
    convergence_report,
    integrate,
    profile,
    ratio_arrays,
    singular_residual,
    validate,
)

cfg = validate(5, 2, 0.0, 1.0, 1.0, 0.0)
prof = profile(cfg)
print(f"predicted exponents: alpha_u = {prof.alpha_u:.9f}, alpha_v = {prof.alpha_v:.9f}")
print(f"predicted amplitudes: A = {prof.A:.9f}, B = {prof.B:.9f}")
print(f"residual of the exact power-law pair in the system: {singular_residual(cfg):.3g}")
print()

# the solution itself crosses the default magnitude cap before 1e4,
# which is growth, not blow-up; lift the cap for this run
traj = integrate(cfg, 1.0, 1.0, 1e4, IntegrateOptions(blowup_threshold=1e16))
rep = convergence_report(cfg, traj)
print(f"integrated to r = {rep.r_end:g} ({len(traj)} samples)")
print(f"last-decade slopes: u {rep.slope_u:.7f} (predicted {rep.alpha_u:.7f}), "
      f"v {rep.slope_v:.7f} (predicted {rep.alpha_v:.7f})")
print()

r, u_ratio, v_ratio = ratio_arrays(cfg, traj)
print("amplitude ratios by decade (last sample at or below each radius):")
print(f"{'r':>10}  {'u/(A r^au)':>12}  {'v/(B r^av)':>12}")
for edge in (1.0, 10.0, 100.0, 1e3, 1e4):
    i = int(np.searchsorted(r, edge, side="right")) - 1
    print(f"{r[i]:>10.3g}  {u_ratio[i]:>12.8f}  {v_ratio[i]:>12.8f}")
