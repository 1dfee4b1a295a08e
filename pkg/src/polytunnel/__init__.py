"""Quantum tunneling through a rectangular barrier in polymer (lattice) quantization."""

__version__ = "0.1.0"

from .dispersion import DispersionParams, compute_dispersion
from .errors import (
    CutoffExceeded,
    DegenerateBarrier,
    EmptyBand,
    EnergyCutoffViolation,
    FitSingular,
    NonPositive,
    NotTunneling,
    ParameterError,
    SingularSystem,
)
from .oracle import OracleScatter, SiteConvention, continuum_transmission, lattice_recursion_scatter
from .scattering import (
    Method,
    MethodComparisonReport,
    ScatteringSolution,
    audit_closed_forms,
    compare_methods,
    paper_coefficients,
    sample_wavefunction,
    solve_boundary_system,
)
from .units import ELECTRON_MASS, HBAR_EV_FS, UNITS, PhysicalParams, UnitSystem, validate_params
from .zeno import (
    Normalization,
    Region,
    SweepRecord,
    TunnelTimeResult,
    ZenoAnalysis,
    find_fs_band,
    sweep_mu0,
    tunneling_time,
)
