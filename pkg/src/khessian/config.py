"""Exponent tuples, derived constants, and regime classification.

The model is the radially symmetric elliptic system

    r^(1-N) [r^(N-k) |u'|^(k-1) u']' = |u'|^m v^p,
    r^(1-N) [r^(N-k) |v'|^(k-1) v']' = |u'|^q v^s,

with u'(0) = v'(0) = 0 and u, v > 0.  Everything downstream (integration,
fixed-point iteration, the logarithmic flow) is parameterised by the tuple
(N, k, m, p, q, s).  This module owns the structural hypotheses on that
tuple and the closed-form constants derived from it, plus the three-way
classification of solution behaviour.

Regime tags:

* ``NoSolution``      no non-constant positive radial solutions exist (k <= m)
* ``Bounded``         every solution is global with power-law growth
* ``BothBlowup``      both components blow up at a finite radius
* ``UFiniteVBlowup``  u stays finite while v blows up at a finite radius
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from .errors import DegenerateDeltaError, DomainError, SigmaUndefinedError

NO_SOLUTION = "NoSolution"
BOUNDED = "Bounded"
BOTH_BLOWUP = "BothBlowup"
U_FINITE_V_BLOWUP = "UFiniteVBlowup"

# relative tolerance used to reject a vanishing coupling determinant
DELTA_TOL = 1e-12


@dataclass(frozen=True)
class ExponentConfig:
    """Validated exponent tuple.

    Construction runs the full hypothesis check, so any instance in hand
    is structurally admissible (delta may be of either sign, but not zero).
    """

    N: int
    k: int
    m: float
    p: float
    q: float
    s: float

    def __post_init__(self) -> None:
        if self.N != int(self.N):
            raise DomainError(f"N must be an integer, got {self.N!r}")
        if self.k != int(self.k):
            raise DomainError(f"k must be an integer, got {self.k!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "m", float(self.m))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "s", float(self.s))
        if self.N < 2:
            raise DomainError(f"N must be >= 2, got {self.N}")
        if not 1 <= self.k <= self.N:
            raise DomainError(f"k must satisfy 1 <= k <= N, got k={self.k}, N={self.N}")
        if not self.q > 0:
            raise DomainError(f"q must be > 0, got {self.q}")
        if self.m < 0:
            raise DomainError(f"m must be >= 0, got {self.m}")
        if self.s < 0:
            raise DomainError(f"s must be >= 0, got {self.s}")
        if self.p < self.s:
            raise DomainError(f"p must be >= s, got p={self.p}, s={self.s}")
        product = (self.k - self.m) * (self.k - self.s)
        scale = max(1.0, abs(product), abs(self.p * self.q))
        if abs(product - self.p * self.q) <= DELTA_TOL * scale:
            raise DegenerateDeltaError(
                "coupling determinant (k-m)(k-s) - p q vanishes for "
                f"(N,k,m,p,q,s)=({self.N},{self.k},{self.m},{self.p},{self.q},{self.s})"
            )

    @property
    def delta(self) -> float:
        return (self.k - self.m) * (self.k - self.s) - self.p * self.q

    def as_dict(self) -> dict[str, Any]:
        return {"N": self.N, "k": self.k, "m": self.m, "p": self.p, "q": self.q, "s": self.s}


def validate(N, k, m, p, q, s) -> ExponentConfig:
    """Check the structural hypotheses and return a validated config.

    Raises DomainError on any violated inequality and DegenerateDeltaError
    when (k-m)(k-s) - p q vanishes within relative tolerance 1e-12.
    """
    return ExponentConfig(N, k, m, p, q, s)


def config_from_dict(data: dict) -> ExponentConfig:
    """Build a config from a mapping with keys N, k, m, p, q, s."""
    missing = [key for key in ("N", "k", "m", "p", "q", "s") if key not in data]
    if missing:
        raise DomainError(f"config object missing keys: {', '.join(missing)}")
    return validate(data["N"], data["k"], data["m"], data["p"], data["q"], data["s"])


@dataclass(frozen=True)
class DerivedConstants:
    """Closed-form constants attached to a config.

    sigma and L require k > m and are NaN otherwise.  The growth exponents
    alpha_u and alpha_v describe the power-law profile of global solutions;
    gamma_u and gamma_v are the exponents of the scaling symmetry
    u(r) -> lam^gamma_u u(r/lam), v(r) -> lam^gamma_v v(r/lam).  They solve

        (k - m) gamma_u - p gamma_v = 2k - m,
        -q gamma_u + (k - s) gamma_v = 2k - q,

    and coincide with alpha_u, alpha_v identically.
    """

    delta: float
    sigma: float
    L: float
    alpha_u: float
    alpha_v: float
    gamma_u: float
    gamma_v: float


def derived(cfg: ExponentConfig) -> DerivedConstants:
    """Compute all derived constants for a config.

    sigma = (p/(k-m)) * (q + (k-m)(1+k)) / ((p+1)k + p - s) and
    L = (N-k)(k-m)/k are only meaningful when k > m; they come back NaN
    for k <= m.  The exponents alpha/gamma need delta != 0 only, which
    validation already guarantees.
    """
    N, k, m, p, q, s = cfg.N, cfg.k, cfg.m, cfg.p, cfg.q, cfg.s
    delta = cfg.delta
    if k > m:
        sigma = (p / (k - m)) * (q + (k - m) * (1 + k)) / ((p + 1) * k + p - s)
        L = (N - k) * (k - m) / k
    else:
        sigma = math.nan
        L = math.nan
    alpha_u = 1.0 + k * (k - s + 2 * p) / delta
    alpha_v = k * (2 * k - 2 * m + q) / delta
    gamma_u = ((2 * k - m) * (k - s) + p * (2 * k - q)) / delta
    gamma_v = ((2 * k - q) * (k - m) + q * (2 * k - m)) / delta
    return DerivedConstants(delta, sigma, L, alpha_u, alpha_v, gamma_u, gamma_v)


@dataclass(frozen=True)
class Regime:
    """Classification outcome: exactly one tag plus the inequality witness."""

    tag: str
    witness: dict[str, float]


def _witness(cfg: ExponentConfig) -> dict[str, float]:
    k, m, p, s = cfg.k, cfg.m, cfg.p, cfg.s
    der = derived(cfg)
    return {
        "pq": cfg.p * cfg.q,
        "boundedness_threshold": (k - m) * (k - s),
        "u_finite_threshold": p * (k + 1) + (k - m + 1) * (k - s),
        "sigma": der.sigma,
    }


def classify(cfg: ExponentConfig) -> Regime:
    """Classify by the inequality chain on pq.

    NoSolution for k <= m.  For k > m: Bounded when pq < (k-m)(k-s),
    UFiniteVBlowup when pq > p(k+1) + (k-m+1)(k-s), BothBlowup in between.
    """
    wit = _witness(cfg)
    if cfg.k <= cfg.m:
        return Regime(NO_SOLUTION, wit)
    pq = wit["pq"]
    if pq < wit["boundedness_threshold"]:
        return Regime(BOUNDED, wit)
    if pq > wit["u_finite_threshold"]:
        return Regime(U_FINITE_V_BLOWUP, wit)
    return Regime(BOTH_BLOWUP, wit)


def classify_sigma(cfg: ExponentConfig) -> Regime:
    """Classify by thresholds on sigma; must agree with classify().

    Bounded when sigma < 1, BothBlowup when 1 < sigma <= (k-m+1)/(k-m),
    UFiniteVBlowup when sigma exceeds that.  sigma = 1 cannot occur for a
    validated config (it is equivalent to delta = 0).
    """
    if cfg.k <= cfg.m:
        raise SigmaUndefinedError(f"sigma requires k > m, got k={cfg.k}, m={cfg.m}")
    wit = _witness(cfg)
    sigma = wit["sigma"]
    km = cfg.k - cfg.m
    if sigma < 1.0:
        return Regime(BOUNDED, wit)
    if sigma > (km + 1.0) / km:
        return Regime(U_FINITE_V_BLOWUP, wit)
    return Regime(BOTH_BLOWUP, wit)
