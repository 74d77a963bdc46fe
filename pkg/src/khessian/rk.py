"""Embedded Cash-Karp 5(4) step with proportional step-size control.

The driver loops live in the modules that own the terminal conditions
(threshold crossing, step-size floors, time horizons); this module only
provides the single step and the controller arithmetic.  Error control is
"per unit of progress": the per-step error estimate is measured against
(atol + rtol*|y|) * factor, where the driver chooses factor as the
fraction of a natural unit the step covers (capped at 1).  Radial drivers
use h times the largest logarithmic rate |y'|/|y| of any component, so
the budget tracks e-folds of the solution; that keeps accumulated drift
at O(tol) over many decades of radius and keeps steps proportional to
the distance from a vertical asymptote when one is approached.  Flow
drivers simply use h per unit time.
"""

from __future__ import annotations

import numpy as np

# Cash-Karp nodes and stage coefficients
_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0)
_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0),
    (-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0),
    (1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0, 44275.0 / 110592.0, 253.0 / 4096.0),
)
_B5 = (37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0)
_B4 = (2825.0 / 27648.0, 0.0, 18575.0 / 48384.0, 13525.0 / 55296.0, 277.0 / 14336.0, 1.0 / 4.0)

MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
SAFETY = 0.9
# error/budget scales like h^4 when the budget is proportional to h
_EXPONENT = 0.25


def step(f, x, y, h):
    """One Cash-Karp step.  Returns (y5, err, k1) with err = y5 - y4 and
    k1 = f(x, y) so the driver can reuse the first stage."""
    k = [f(x, y)]
    for i in range(1, 6):
        yi = y + h * sum(a * ki for a, ki in zip(_A[i], k))
        k.append(f(x + _C[i] * h, yi))
    y5 = y + h * sum(b * ki for b, ki in zip(_B5, k))
    y4 = y + h * sum(b * ki for b, ki in zip(_B4, k))
    return y5, y5 - y4, k[0]


def log_rate(k1, y, atol):
    """Largest |y'| / |y| over components, with an atol floor on |y|."""
    return float(np.max(np.abs(k1) / (atol + np.abs(y))))


def error_ratio(err, y_old, y_new, rtol, atol, factor):
    """Max of |err| over the per-step budget; accept the step iff <= 1."""
    scale = atol + rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    budget = scale * min(1.0, factor)
    with np.errstate(invalid="ignore"):
        ratio = np.abs(err) / budget
    if not np.all(np.isfinite(ratio)):
        return np.inf
    return float(np.max(ratio))


def next_step(h, ratio):
    """Step-size update from the accept/reject error ratio."""
    if ratio == 0.0:
        return h * MAX_FACTOR
    factor = SAFETY * ratio ** (-_EXPONENT)
    return h * min(MAX_FACTOR, max(MIN_FACTOR, factor))
