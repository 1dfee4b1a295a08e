"""
Closed-form tunneling time and lattice-scale sweeps.

The time is

    t = | (2 m N mu0^2 / hbar) / (2 sqrt(lam^2 - 1))
          * [ conj(b2) b1 (1 + N) + |b2|^2 (e^{2 phi} - e^{-2 N phi}) / (e^{2 phi} - 1) ] |

with b1, b2 the barrier-region amplitudes. The prefactor m mu0^2 / hbar is a
time (see ``TIME_PREFACTOR_DIM``), so with the package units t is in fs.

Sweeping N at fixed barrier width traces the time against mu0 = L / N; the
branch that rises as mu0 shrinks is labelled Zeno, the branch that falls
as mu0 shrinks is labelled AntiZeno.
"""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .dispersion import compute_dispersion
from .errors import DegenerateBarrier, EmptyBand, EnergyCutoffViolation
from .scattering import Method, paper_coefficients, solve_boundary_system
from .units import ACTION, ELECTRON_MASS, LENGTH, MASS, PhysicalParams, validate_params

log = logging.getLogger(__name__)

TIME_PREFACTOR_DIM = MASS * LENGTH**2 / ACTION
DEFAULT_FS_WINDOW = (0.1, 10.0)


class Normalization(str, enum.Enum):
    """How the overall amplitude of the scattering state is fixed.

    INCIDENT sets a1 = 1 (unit incident wave). TRANSMITTED sets c1 = 1, which
    scales the time by 1 / T and so puts it many orders above femtoseconds
    for opaque barriers.
    """

    INCIDENT = "incident"
    TRANSMITTED = "transmitted"


class Region(str, enum.Enum):
    ZENO = "Zeno"
    ANTI_ZENO = "AntiZeno"
    MINIMUM = "Minimum"
    UNCLASSIFIED = "Unclassified"


def time_expression(
    b1: complex,
    b2: complex,
    N: int,
    mu0: float,
    mass: float,
    hbar: float,
    lam2_minus_one: float,
    phi: float,
) -> float:
    """Evaluate the closed-form tunneling time for given barrier amplitudes."""
    prefactor = 2.0 * mass * N * mu0**2 / hbar
    inv_root = 1.0 / (2.0 * math.sqrt(lam2_minus_one))
    # sum_{k=0}^{N} e^{-2 k phi} = (e^{2 phi} - e^{-2 N phi}) / (e^{2 phi} - 1)
    geometric = -math.exp(2.0 * phi) * math.expm1(-2.0 * (N + 1) * phi) / math.expm1(2.0 * phi)
    bracket = b2.conjugate() * b1 * (1 + N) + abs(b2) ** 2 * geometric
    return abs(1j * prefactor * inv_root * bracket)


@dataclass(frozen=True)
class TunnelTimeResult:
    time: float  # fs
    params: PhysicalParams
    b1: complex
    b2: complex
    lam: float
    phi: float
    T: float
    R: float
    normalization: Normalization = Normalization.INCIDENT
    method: Method = Method.LINEAR_SOLVE

    def to_dict(self) -> dict:
        p = self.params
        return {
            "time_fs": self.time,
            "mass": p.mass,
            "E": p.energy,
            "V0": p.barrier_height,
            "L": p.barrier_width,
            "N": p.num_steps,
            "mu0_nm": p.mu0,
            "b1": [self.b1.real, self.b1.imag],
            "b2": [self.b2.real, self.b2.imag],
            "lam": self.lam,
            "phi": self.phi,
            "T": self.T,
            "R": self.R,
            "normalization": self.normalization.value,
            "method": self.method.value,
        }


def tunneling_time(
    p: PhysicalParams,
    *,
    use_paper_coefficients: bool = False,
    normalization: Normalization | str = Normalization.INCIDENT,
) -> TunnelTimeResult:
    """Tunneling time for one validated parameter set.

    Amplitudes come from the linear solve with c1 = 1 (or from the closed
    forms), then are rescaled according to ``normalization``.
    """
    normalization = Normalization(normalization)
    d = compute_dispersion(p)
    lam2m1 = d.lam2_minus_one
    if not lam2m1 > 1e-300:
        raise DegenerateBarrier(f"lam^2 - 1 = {lam2m1!r}: no evanescent decay inside the barrier")
    N = p.num_steps
    if use_paper_coefficients:
        sol = paper_coefficients(d, N, 1.0)
    else:
        sol = solve_boundary_system(d, N, 1.0)
    if normalization is Normalization.INCIDENT:
        sol = sol.scaled(1.0 / sol.a1)
    b1, b2 = sol.b1, sol.b2
    t = time_expression(b1, b2, N, p.mu0, p.mass, p.units.hbar, lam2m1, d.phi)
    return TunnelTimeResult(t, p, b1, b2, d.lam, d.phi, sol.T, sol.R, normalization, sol.method)


@dataclass(frozen=True)
class SweepRecord:
    N: int
    mu0: float
    T_coef: float
    R_coef: float
    time: float
    region: Region = Region.UNCLASSIFIED

    def with_region(self, region: Region) -> "SweepRecord":
        return SweepRecord(self.N, self.mu0, self.T_coef, self.R_coef, self.time, region)


@dataclass(frozen=True)
class ZenoAnalysis:
    minimum: SweepRecord
    fs_band_lo: float | None
    fs_band_hi: float | None
    records: list[SweepRecord]
    fs_window: tuple[float, float] = DEFAULT_FS_WINDOW
    skipped: list[int] = field(default_factory=list)

    @property
    def minimum_index(self) -> int:
        return self.records.index(self.minimum)

    @property
    def has_interior_minimum(self) -> bool:
        """True if the global minimum is unique and not at either sweep end."""
        i = self.minimum_index
        times = [r.time for r in self.records]
        unique = times.count(self.minimum.time) == 1
        return unique and 0 < i < len(self.records) - 1

    @property
    def endpoint_ratios(self) -> tuple[float, float]:
        """time at the largest mu0 and at the smallest mu0, over the minimum time."""
        t_min = self.minimum.time
        return self.records[0].time / t_min, self.records[-1].time / t_min

    def summary(self) -> dict:
        m = self.minimum
        return {
            "minimum": {"N": m.N, "mu0_nm": m.mu0, "time_fs": m.time, "T": m.T_coef, "R": m.R_coef},
            "has_interior_minimum": self.has_interior_minimum,
            "endpoint_ratios": list(self.endpoint_ratios),
            "fs_window_fs": list(self.fs_window),
            "fs_band_nm": None if self.fs_band_lo is None else [self.fs_band_lo, self.fs_band_hi],
            "n_records": len(self.records),
            "skipped_N": list(self.skipped),
        }


def classify(records: Sequence[SweepRecord]) -> tuple[list[SweepRecord], int]:
    """Label records (ordered by mu0 descending) relative to the global minimum."""
    if len(records) == 1:
        return [records[0].with_region(Region.UNCLASSIFIED)], 0
    times = [r.time for r in records]
    m = min(range(len(times)), key=times.__getitem__)
    out = []
    for i, r in enumerate(records):
        if i == m:
            region = Region.MINIMUM
        elif i < m:
            region = Region.ANTI_ZENO if times[i + 1] < times[i] else Region.UNCLASSIFIED
        else:
            region = Region.ZENO if times[i] > times[i - 1] else Region.UNCLASSIFIED
        out.append(r.with_region(region))
    return out, m


def find_fs_band(
    records: Sequence[SweepRecord], window: tuple[float, float] = DEFAULT_FS_WINDOW
) -> tuple[float, float]:
    """Smallest and largest mu0 whose time lies in the closed window [t_lo, t_hi]."""
    t_lo, t_hi = window
    if not records:
        raise ValueError("no records")
    if t_lo > t_hi:
        raise ValueError(f"invalid window {window}")
    inside = [r.mu0 for r in records if t_lo <= r.time <= t_hi]
    if not inside:
        raise EmptyBand(f"no tunneling time inside [{t_lo}, {t_hi}] fs")
    return min(inside), max(inside)


def _sweep_point(args: tuple[Mapping, int, bool, str]) -> SweepRecord | int:
    base, N, use_paper, normalization = args
    try:
        p = validate_params({**base, "N": N})
    except EnergyCutoffViolation:
        return N
    res = tunneling_time(p, use_paper_coefficients=use_paper, normalization=normalization)
    return SweepRecord(N, p.mu0, res.T, res.R, res.time)


def _normalise_range(N_range: Iterable[int] | tuple[int, int]) -> list[int]:
    if isinstance(N_range, tuple) and len(N_range) == 2:
        lo, hi = N_range
        return list(range(int(lo), int(hi) + 1))
    return sorted({int(n) for n in N_range})


def sweep_mu0(
    base: Mapping,
    N_range: Iterable[int] | tuple[int, int],
    *,
    fs_window: tuple[float, float] = DEFAULT_FS_WINDOW,
    use_paper_coefficients: bool = False,
    normalization: Normalization | str = Normalization.INCIDENT,
    workers: int = 1,
) -> ZenoAnalysis:
    """Tunneling time over a range of lattice sizes at fixed mass, E, V0, L.

    ``N_range`` is an iterable of sizes or an inclusive ``(lo, hi)`` pair.
    Sizes that violate the energy cutoff are skipped and logged. Records come
    back ordered by mu0 descending, whatever the evaluation order.
    """
    base = {"mass": ELECTRON_MASS, **base}
    Ns = _normalise_range(N_range)
    if not Ns:
        raise ValueError("empty N range")
    normalization = Normalization(normalization).value
    jobs = [(base, N, use_paper_coefficients, normalization) for N in Ns]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]

    skipped = [r for r in results if isinstance(r, int)]
    for N in skipped:
        log.warning("N=%d skipped: energy above the lattice cutoff", N)
    records = [r for r in results if isinstance(r, SweepRecord)]
    if not records:
        raise EnergyCutoffViolation("every N in the range violates the energy cutoff")
    records.sort(key=lambda r: r.mu0, reverse=True)
    records, m = classify(records)
    try:
        lo, hi = find_fs_band(records, fs_window)
    except EmptyBand:
        lo = hi = None
    return ZenoAnalysis(records[m], lo, hi, records, tuple(fs_window), skipped)
