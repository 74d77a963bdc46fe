"""Power-law profile of global solutions and convergence diagnostics.

For delta > 0 and k > m every solution grows like

    u(r) ~ A r^alpha_u,     v(r) ~ B r^alpha_v,

where the exponents come from the derived constants and the amplitudes
are fixed by the interior equilibrium (X_inf, Y_inf, Z_inf, W_inf) of the
logarithmic flow through

    A = [ X_inf^delta Y_inf^(kp) Z_inf^(k-s) W_inf^p ]^(-1/delta),
    B = [ Y_inf^(k(k-m)) Z_inf^q W_inf^(k-m) ]^(-1/delta).

The pair (A r^alpha_u, B r^alpha_v) is an exact solution of the system,
so substituting it back gives a machine-precision residual; that check
jointly validates the equilibrium, the amplitude formulas, and the
exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ExponentConfig, derived
from .dynamics import equilibrium
from .errors import InsufficientRangeError, PreconditionError
from .radial import REACHED_RMAX, RadialTrajectory

DEFAULT_RESIDUAL_RADII = (0.1, 1.0, 10.0, 100.0)


@dataclass(frozen=True)
class AsymptoticProfile:
    A: float
    B: float
    alpha_u: float
    alpha_v: float


@dataclass(frozen=True)
class ConvergenceReport:
    """How closely a far-field trajectory tracks the power-law profile."""

    slope_u: float  # fitted d ln u / d ln r over the last decade
    slope_v: float
    alpha_u: float  # predicted exponents
    alpha_v: float
    u_ratio: float  # u(r_end) / (A r_end^alpha_u)
    v_ratio: float
    r_start: float  # decade used for the fit
    r_end: float


def profile(cfg: ExponentConfig) -> AsymptoticProfile:
    """Amplitudes and exponents of the attracting power law (delta > 0, k > m).

    Amplitudes are evaluated in log space; the equilibrium coordinates are
    all positive in this regime so the logarithms exist.
    """
    if cfg.k <= cfg.m or not cfg.delta > 0:
        raise PreconditionError(
            f"power-law profile requires k > m and delta > 0 (k={cfg.k}, m={cfg.m}, delta={cfg.delta:g})"
        )
    der = derived(cfg)
    eq = equilibrium(cfg)
    k, m, p, q, s = cfg.k, cfg.m, cfg.p, cfg.q, cfg.s
    delta = cfg.delta
    ln_a = -(
        math.log(eq.X_inf)
        + (k * p / delta) * math.log(eq.Y_inf)
        + ((k - s) / delta) * math.log(eq.Z_inf)
        + (p / delta) * math.log(eq.W_inf)
    )
    ln_b = -(
        (k * (k - m) / delta) * math.log(eq.Y_inf)
        + (q / delta) * math.log(eq.Z_inf)
        + ((k - m) / delta) * math.log(eq.W_inf)
    )
    return AsymptoticProfile(A=math.exp(ln_a), B=math.exp(ln_b),
                             alpha_u=der.alpha_u, alpha_v=der.alpha_v)


def singular_residual(
    cfg: ExponentConfig,
    prof: AsymptoticProfile | None = None,
    radii=DEFAULT_RESIDUAL_RADII,
) -> float:
    """Largest relative defect of (A r^alpha_u, B r^alpha_v) in the system.

    Both equations are evaluated analytically (power laws differentiate
    exactly), so the result measures only the consistency of the constants:

        eq 1:  (A alpha_u)^k (N - 2k + k alpha_u) r^(k(alpha_u - 2))
                   vs  (A alpha_u)^m r^(m(alpha_u - 1)) (B r^alpha_v)^p
        eq 2:  (B alpha_v)^k (N - 2k + k alpha_v) r^(k(alpha_v - 2))
                   vs  (A alpha_u)^q r^(q(alpha_u - 1)) (B r^alpha_v)^s

    The comparison is done in log space (all four sides are positive,
    since N - 2k + k alpha equals an equilibrium coordinate), so configs
    with large growth exponents cannot overflow.  For small defects
    |ln(lhs/rhs)| agrees with the relative difference to first order.
    """
    if prof is None:
        prof = profile(cfg)
    N, k, m, p, q, s = cfg.N, cfg.k, cfg.m, cfg.p, cfg.q, cfg.s
    A, B, au, av = prof.A, prof.B, prof.alpha_u, prof.alpha_v
    for name, val in (("A*alpha_u", A * au), ("B*alpha_v", B * av),
                      ("N-2k+k*alpha_u", N - 2 * k + k * au),
                      ("N-2k+k*alpha_v", N - 2 * k + k * av)):
        if not val > 0:
            raise PreconditionError(f"profile residual needs {name} > 0, got {val:g}")
    ln_r = np.log(np.asarray(radii, dtype=float))
    ln_du = math.log(A * au)
    ln_dv = math.log(B * av)
    ln_lhs1 = k * ln_du + math.log(N - 2 * k + k * au) + k * (au - 2.0) * ln_r
    ln_rhs1 = m * ln_du + m * (au - 1.0) * ln_r + p * math.log(B) + p * av * ln_r
    ln_lhs2 = k * ln_dv + math.log(N - 2 * k + k * av) + k * (av - 2.0) * ln_r
    ln_rhs2 = q * ln_du + q * (au - 1.0) * ln_r + s * math.log(B) + s * av * ln_r
    res1 = np.abs(ln_lhs1 - ln_rhs1)
    res2 = np.abs(ln_lhs2 - ln_rhs2)
    return float(max(res1.max(), res2.max()))


def convergence_report(cfg: ExponentConfig, traj: RadialTrajectory) -> ConvergenceReport:
    """Fit the far field of a trajectory against the power-law profile.

    Needs samples out to at least r = 1e3; the fit window is the last
    decade [r_end/10, r_end].  Raises InsufficientRangeError otherwise.
    """
    prof = profile(cfg)
    r_end = float(traj.r[-1])
    if r_end < 1e3 or traj.terminal.kind != REACHED_RMAX:
        raise InsufficientRangeError(
            f"far-field fit needs a completed run to r >= 1e3, got r_end={r_end:g} "
            f"({traj.terminal.kind})"
        )
    mask = traj.r >= r_end / 10.0
    ln_r = np.log(traj.r[mask])
    slope_u = float(np.polyfit(ln_r, np.log(traj.u[mask]), 1)[0])
    slope_v = float(np.polyfit(ln_r, np.log(traj.v[mask]), 1)[0])
    u_ratio = float(traj.u[-1] / (prof.A * r_end**prof.alpha_u))
    v_ratio = float(traj.v[-1] / (prof.B * r_end**prof.alpha_v))
    return ConvergenceReport(
        slope_u=slope_u, slope_v=slope_v,
        alpha_u=prof.alpha_u, alpha_v=prof.alpha_v,
        u_ratio=u_ratio, v_ratio=v_ratio,
        r_start=float(traj.r[mask][0]), r_end=r_end,
    )


def ratio_arrays(cfg: ExponentConfig, traj: RadialTrajectory) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(r, u/(A r^alpha_u), v/(B r^alpha_v)) along a trajectory."""
    prof = profile(cfg)
    return (
        traj.r,
        traj.u / (prof.A * traj.r**prof.alpha_u),
        traj.v / (prof.B * traj.r**prof.alpha_v),
    )
