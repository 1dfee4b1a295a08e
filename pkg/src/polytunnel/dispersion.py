"""Characteristic-root data of the three-term lattice recursion in each region.

In a region with constant potential W the eigenvalue equation reads

    psi(j+1) + psi(j-1) = 2 sigma psi(j),   sigma = 1 - m (E - W) mu0^2 / hbar^2

whose characteristic roots are r = sigma +- sqrt(sigma^2 - 1), with product 1.
Outside the barrier sigma = epsilon = cos(theta); inside sigma = lam = cosh(phi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .units import PhysicalParams


@dataclass(frozen=True)
class DispersionParams:
    epsilon: float
    theta: float
    lam: float
    phi: float
    # 1 - epsilon and lam - 1, kept separately so nothing is lost near 1
    one_minus_eps: float
    lam_minus_one: float

    @property
    def lam2_minus_one(self) -> float:
        return self.lam_minus_one * (self.lam + 1.0)

    def free_roots(self) -> tuple[complex, complex]:
        s = math.sin(self.theta)
        return complex(self.epsilon, s), complex(self.epsilon, -s)

    def barrier_roots(self) -> tuple[float, float]:
        return math.exp(self.phi), math.exp(-self.phi)


def stable_arccos_from_gap(gap: float) -> float:
    """arccos(1 - gap) for 0 <= gap <= 2, accurate when gap is tiny."""
    return 2.0 * math.asin(math.sqrt(gap / 2.0))


def stable_arccosh_from_gap(gap: float) -> float:
    """arccosh(1 + gap) for gap >= 0, via log1p so small gaps keep their digits."""
    return math.log1p(gap + math.sqrt(gap * (gap + 2.0)))


def dispersion_from_gaps(one_minus_eps: float, lam_minus_one: float) -> DispersionParams:
    """Build DispersionParams straight from the two dimensionless gaps.

    Useful for probing the lattice equations without going through physical
    units (e.g. a vanishing barrier, ``lam_minus_one = -one_minus_eps``, is
    allowed here even though it is not a tunneling configuration).
    """
    epsilon = 1.0 - one_minus_eps
    lam = 1.0 + lam_minus_one
    theta = stable_arccos_from_gap(one_minus_eps)
    if lam_minus_one >= 0:
        phi = stable_arccosh_from_gap(lam_minus_one)
    else:
        phi = math.nan
    return DispersionParams(epsilon, theta, lam, phi, one_minus_eps, lam_minus_one)


def compute_dispersion(p: PhysicalParams) -> DispersionParams:
    scale = p.mass * p.mu0**2 / p.units.hbar**2
    return dispersion_from_gaps(scale * p.energy, scale * (p.barrier_height - p.energy))


def characteristic_residuals(d: DispersionParams) -> tuple[float, float]:
    """|r^2 - 2 sigma r + 1| at r = e^{i theta} and r = e^{phi}."""
    r1 = complex(math.cos(d.theta), math.sin(d.theta))
    r2 = math.exp(d.phi)
    res1 = abs(r1 * r1 - 2.0 * d.epsilon * r1 + 1.0)
    res2 = abs(r2 * r2 - 2.0 * d.lam * r2 + 1.0)
    return res1, res2
