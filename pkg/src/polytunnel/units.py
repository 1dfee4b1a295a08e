"""
Unit system, constants and validated experiment parameters.

Everything is expressed in eV (energy), nm (length) and fs (time). In these
units the electron mass is m_e c^2 / c^2 with c = 299.792458 nm/fs, which
gives eV fs^2 / nm^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

from .errors import EnergyCutoffViolation, NonPositive, NotTunneling

HBAR_EV_FS = 0.6582119569
ELECTRON_REST_ENERGY_EV = 510998.95
SPEED_OF_LIGHT_NM_PER_FS = 299.792458
ELECTRON_MASS = ELECTRON_REST_ENERGY_EV / SPEED_OF_LIGHT_NM_PER_FS**2


class Dim(NamedTuple):
    """Exponents of (energy, length, time); enough to check formulas by hand."""

    energy: int = 0
    length: int = 0
    time: int = 0

    def __mul__(self, other: "Dim") -> "Dim":  # type: ignore[override]
        return Dim(*(a + b for a, b in zip(self, other)))

    def __truediv__(self, other: "Dim") -> "Dim":
        return Dim(*(a - b for a, b in zip(self, other)))

    def __pow__(self, n: int) -> "Dim":
        return Dim(*(a * n for a in self))


DIMENSIONLESS = Dim()
ENERGY = Dim(energy=1)
LENGTH = Dim(length=1)
TIME = Dim(time=1)
ACTION = ENERGY * TIME
MASS = ENERGY * TIME**2 / LENGTH**2


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = HBAR_EV_FS
    mass_electron: float = ELECTRON_MASS

    def __post_init__(self) -> None:
        if not (self.hbar > 0 and self.mass_electron > 0):
            raise NonPositive("hbar and the electron mass must be positive")

    @property
    def hbar2_over_2m(self) -> float:
        """hbar^2 / (2 m_e) in eV nm^2."""
        return self.hbar**2 / (2.0 * self.mass_electron)


UNITS = UnitSystem()


def energy_cutoff(mass: float, mu0: float, units: UnitSystem = UNITS) -> float:
    """Largest energy (exclusive) with propagating free-region waves, 2 hbar^2/(m mu0^2)."""
    return 2.0 * units.hbar**2 / (mass * mu0**2)


@dataclass(frozen=True)
class PhysicalParams:
    """Validated inputs of one lattice scattering problem.

    ``num_steps`` is canonical; the lattice scale ``mu0`` is derived as L/N.
    Build instances with :func:`validate_params`.
    """

    mass: float
    energy: float
    barrier_height: float
    barrier_width: float
    num_steps: int
    units: UnitSystem = field(default=UNITS, compare=True)

    @property
    def mu0(self) -> float:
        return self.barrier_width / self.num_steps

    @property
    def cutoff(self) -> float:
        return energy_cutoff(self.mass, self.mu0, self.units)

    def as_raw(self) -> dict:
        return {
            "mass": self.mass,
            "E": self.energy,
            "V0": self.barrier_height,
            "L": self.barrier_width,
            "N": self.num_steps,
        }


def validate_params(
    raw: Mapping | PhysicalParams, units: UnitSystem = UNITS
) -> PhysicalParams:
    """Check a raw ``{mass, E, V0, L, N}`` mapping and return PhysicalParams.

    Raises NonPositive, NotTunneling or EnergyCutoffViolation (checked in
    that order). Passing an existing PhysicalParams re-validates it.
    """
    if isinstance(raw, PhysicalParams):
        units = raw.units
        raw = raw.as_raw()
    mass = float(raw.get("mass", units.mass_electron))
    E = float(raw["E"])
    V0 = float(raw["V0"])
    L = float(raw["L"])
    N_raw = raw["N"]

    for name, value in (("mass", mass), ("E", E), ("V0", V0), ("L", L)):
        if not math.isfinite(value):
            raise NonPositive(f"{name} must be finite, got {value!r}")
        if value <= 0:
            raise NonPositive(f"{name} must be positive, got {value!r}")
    if isinstance(N_raw, bool) or int(N_raw) != N_raw:
        raise NonPositive(f"N must be an integer, got {N_raw!r}")
    N = int(N_raw)
    if N < 1:
        raise NonPositive(f"N must be >= 1, got {N}")

    if E >= V0:
        raise NotTunneling(f"E={E} eV is not below the barrier V0={V0} eV")

    mu0 = L / N
    # E < 2 hbar^2/(m mu0^2), written as m E mu0^2 / hbar^2 < 2
    if mass * E * mu0**2 / units.hbar**2 >= 2.0:
        cutoff = energy_cutoff(mass, mu0, units)
        raise EnergyCutoffViolation(
            f"E={E} eV is not below the lattice cutoff {cutoff:.6g} eV at mu0={mu0:.6g} nm"
        )
    return PhysicalParams(mass, E, V0, L, N, units)


def electron_params(E: float, V0: float, L: float, N: int) -> PhysicalParams:
    return validate_params({"mass": ELECTRON_MASS, "E": E, "V0": V0, "L": L, "N": N})
