"""Closed-form density profiles for the special parameter cases.

Four regimes of the generalized Lane-Emden equation admit analytic
solutions, and they double as independent oracles for the numerical
integrator:

* gamma = 2 (n = 1): theta expressed through the cardinal hyperbolic sine,
  with a finite halo boundary zeta_M when 0 < omega*theta0 < 1.
* omega -> 0: a pure power-law profile for any gamma != 1.
* gamma -> 1: the Gaussian limit of the power law.
* gamma = 0 (isobaric): a water-bag step profile with a closed-form radius.

Everything here is scalar math on validated inputs; no arrays, no state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ValidationError

SHC_SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class HaloProfile:
    """Parameters of the gamma = 2 closed form.

    The halo has a real boundary only while omega * theta0 < 1, so the
    constructor enforces that window.
    """

    theta0: float
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.theta0) and self.theta0 > 0.0):
            raise ValidationError("theta0",
                                  f"must be finite and > 0, got {self.theta0!r}")
        if not (0.0 < self.omega < 1.0 / self.theta0):
            raise ValidationError(
                "omega",
                f"must satisfy 0 < omega < 1/theta0 = {1.0 / self.theta0!r} "
                f"for a real halo boundary, got {self.omega!r}")


def shc(x: float) -> float:
    """Cardinal hyperbolic sine sinh(x)/x, with shc(0) = 1.

    Even in x.  Near zero the direct quotient loses accuracy, so |x| below
    SHC_SERIES_CUTOFF uses the Taylor series 1 + x^2/6 + x^4/120 + x^6/5040,
    whose truncation error is below 1e-16 relative at the cutoff.
    """
    x = abs(float(x))  # evenness made exact, not left to libm symmetry
    if x < SHC_SERIES_CUTOFF:
        x2 = x * x
        return 1.0 + x2 * (1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 / 5040.0))
    return math.sinh(x) / x


def _shc_or_inf(x: float) -> float:
    try:
        return shc(x)
    except OverflowError:
        return math.inf


def gamma2_profile(zeta: float, p: HaloProfile) -> float:
    """gamma = 2 density theta(zeta) = (1/omega)[1 + (theta0*omega - 1) shc(sqrt(omega/2) zeta)].

    Total in zeta; beyond the halo boundary the formula simply goes
    negative, which is what oracle comparisons against the continued
    z-solution need.
    """
    arg = math.sqrt(p.omega / 2.0) * zeta
    return (1.0 + (p.theta0 * p.omega - 1.0) * shc(arg)) / p.omega


def halo_boundary(p: HaloProfile) -> float:
    """Radius zeta_M > 0 where the gamma = 2 profile reaches zero.

    Solves shc(x) = 1/(1 - theta0*omega) for x = sqrt(omega/2)*zeta_M.
    shc is strictly increasing on (0, inf), so the root is bracketed by
    doubling, pinned by bisection to 1e-12, then polished with one Newton
    step.  Absolute accuracy is about 1e-10 in zeta_M.
    """
    target = 1.0 / (1.0 - p.theta0 * p.omega)
    lo, hi = 0.0, 1.0
    while _shc_or_inf(hi) < target:
        lo = hi
        hi *= 2.0
        if hi > 1400.0:
            raise RuntimeError(
                "halo_boundary: could not bracket the shc root; "
                f"target {target!r} is out of floating-point reach")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _shc_or_inf(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    x = 0.5 * (lo + hi)
    if 0.0 < x < 700.0:
        # d/dx sinh(x)/x = (cosh(x) - shc(x))/x, positive on (0, inf)
        deriv = (math.cosh(x) - shc(x)) / x
        x -= (shc(x) - target) / deriv
    return x * math.sqrt(2.0 / p.omega)


def powerlaw_profile(zeta: float, gamma: float, theta0: float) -> float:
    """omega -> 0 density [theta0^(gamma-1) - (gamma-1) zeta^2 / (6 gamma)]^(1/(gamma-1)).

    For gamma > 1 the bracket hits zero at
    zeta_star = sqrt(6 gamma theta0^(gamma-1) / (gamma-1)) and evaluation
    beyond that is a domain error.  gamma = 1 belongs to gaussian_profile
    and gamma = 0 to waterbag_profile.
    """
    gamma = float(gamma)
    if gamma == 1.0:
        raise ValidationError("gamma",
                              "the gamma = 1 limit is gaussian_profile")
    if gamma == 0.0:
        raise ValidationError("gamma",
                              "the gamma = 0 case is waterbag_profile")
    theta0 = float(theta0)
    if not (math.isfinite(theta0) and theta0 > 0.0):
        raise ValidationError("theta0", f"must be finite and > 0, got {theta0!r}")
    bracket = theta0 ** (gamma - 1.0) - (gamma - 1.0) * zeta * zeta / (6.0 * gamma)
    exponent = 1.0 / (gamma - 1.0)
    if bracket < 0.0 or (bracket == 0.0 and exponent < 0.0):
        zeta_star = math.sqrt(6.0 * gamma * theta0 ** (gamma - 1.0) / (gamma - 1.0))
        raise ValidationError(
            "zeta",
            f"outside the profile domain; the density vanishes at "
            f"zeta_star = {zeta_star!r}")
    return bracket ** exponent


def gaussian_profile(zeta: float, theta0: float) -> float:
    """gamma -> 1 density theta0 * exp(-zeta^2/6)."""
    theta0 = float(theta0)
    if not (math.isfinite(theta0) and theta0 > 0.0):
        raise ValidationError("theta0", f"must be finite and > 0, got {theta0!r}")
    return theta0 * math.exp(-zeta * zeta / 6.0)


def lane_emden_radius(omega: float) -> float:
    """Step radius xi0 = 3 * (4 pi omega)^(-1/3) of the gamma = 0 profile."""
    omega = float(omega)
    if not (math.isfinite(omega) and omega > 0.0):
        raise ValidationError("omega", f"must be finite and > 0, got {omega!r}")
    return 3.0 * (4.0 * math.pi * omega) ** (-1.0 / 3.0)


def waterbag_profile(xi: float, omega: float) -> float:
    """gamma = 0 step profile (1/omega) * H(xi - xi0), H right-continuous.

    As written the step places the constant density 1/omega outside the
    radius xi0 and nothing inside, which looks inverted for a confined
    cloud; the formula is implemented verbatim rather than silently
    flipped.  See the README note on orientation.
    """
    xi0 = lane_emden_radius(omega)
    if xi < xi0:
        return 0.0
    return 1.0 / omega
