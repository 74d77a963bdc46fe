"""Regime map over the (p, q) plane.

For fixed N, k, m, s the three solution regimes tile the plane of coupling
exponents.  This script classifies a grid of (p, q) pairs and prints an
ASCII map, then details one configuration per regime.
"""

import numpy as np

from khessian import classify, derived, validate
from khessian.errors import DegenerateDeltaError, DomainError

N, k, m, s = 5, 2, 0.0, 0.0

SYMBOL = {"Bounded": ".", "BothBlowup": "b", "UFiniteVBlowup": "U", "NoSolution": "x"}

p_vals = np.linspace(0.25, 8.0, 32)
q_vals = np.linspace(0.25, 8.0, 32)

print(f"N={N} k={k} m={m} s={s}   ('.' bounded, 'b' both blow up, 'U' u finite / v blows up)")
print()
for q in q_vals[::-1]:
    row = []
    for p in p_vals:
        try:
            cfg = validate(N, k, m, float(p), float(q), s)
        except (DomainError, DegenerateDeltaError):
            row.append("?")  # on the threshold delta = 0 or p < s
            continue
        row.append(SYMBOL[classify(cfg).tag])
    print(f"q={q:5.2f}  " + "".join(row))
print(" " * 9 + "p from %.2f to %.2f" % (p_vals[0], p_vals[-1]))

# one configuration per regime, with the derived constants that decide it
print()
for p, q in ((1.0, 1.0), (2.0, 3.0), (6.0, 7.0)):
    cfg = validate(N, k, m, p, q, s)
    regime = classify(cfg)
    der = derived(cfg)
    print(f"(p, q) = ({p}, {q}): {regime.tag}")
    print(f"    delta = {cfg.delta:g}, sigma = {der.sigma:g}, "
          f"witness thresholds = {regime.witness}")
