import cmath
import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polytunnel.dispersion import compute_dispersion, dispersion_from_gaps
from polytunnel.errors import SingularSystem
from polytunnel.oracle import continuum_transmission
from polytunnel.scattering import (
    Method,
    ScatteringSolution,
    audit_closed_forms,
    compare_methods,
    matching_system,
    paper_coefficients,
    psi_barrier_region,
    psi_incident_region,
    psi_transmitted_region,
    sample_wavefunction,
    solve_boundary_system,
)
from polytunnel.units import ELECTRON_MASS, energy_cutoff, validate_params

from grids import EXPERIMENT
import mp_reference as ref


def _d(N, E=5.5, V0=9.7):
    return compute_dispersion(validate_params({**EXPERIMENT, "E": E, "V0": V0, "N": N}))


def test_reference_point_conserves_probability(ref_dispersion):
    s = solve_boundary_system(ref_dispersion, 10)
    assert s.method is Method.LINEAR_SOLVE
    assert abs(s.T + s.R - 1) < 1e-10
    assert s.a1 != 0


@pytest.mark.parametrize(
    "N, T_ref",
    [
        # 50-digit mpmath solve of the same four matching equations
        (10, 4.8871985013617085e-9),
        (20, 3.2970028854240592e-9),
    ],
)
def test_transmission_goldens(N, T_ref):
    s = solve_boundary_system(_d(N), N)
    assert s.T == pytest.approx(T_ref, rel=1e-10)
    T_mp, R_mp = ref.transmission("5.5", "9.7", 1, N)
    assert s.T == pytest.approx(float(T_mp), rel=1e-10)
    assert s.R == pytest.approx(float(R_mp), rel=1e-14)


def test_doubling_c1_doubles_amplitudes(ref_dispersion):
    s1 = solve_boundary_system(ref_dispersion, 10, 1.0)
    s2 = solve_boundary_system(ref_dispersion, 10, 2.0)
    for k, v in s1.amplitudes().items():
        assert s2.amplitudes()[k] == pytest.approx(2 * v, rel=1e-12)
    assert s2.T == pytest.approx(s1.T, rel=1e-12)
    assert s2.R == pytest.approx(s1.R, rel=1e-14)


@given(
    mod=st.floats(1e-3, 1e3),
    arg=st.floats(-math.pi, math.pi),
)
def test_homogeneity(mod, arg):
    d = _d(10)
    kappa = cmath.rect(mod, arg)
    s1 = solve_boundary_system(d, 10)
    s2 = solve_boundary_system(d, 10, kappa)
    assert abs(s2.b2 - kappa * s1.b2) <= 1e-12 * abs(kappa * s1.b2)
    assert s2.T == pytest.approx(s1.T, rel=1e-12)
    assert s2.R == pytest.approx(s1.R, rel=1e-12)


@settings(max_examples=200)
@given(N=st.integers(1, 300), fE=st.floats(0.01, 0.97), fV=st.floats(1.02, 20.0))
def test_conservation_property(N, fE, fV):
    E = fE * min(energy_cutoff(ELECTRON_MASS, 1.0 / N), 30.0)
    d = compute_dispersion(validate_params({"mass": ELECTRON_MASS, "E": E, "V0": fV * E, "L": 1.0, "N": N}))
    s = solve_boundary_system(d, N)
    assert abs(s.T + s.R - 1) < 1e-10


def test_closed_forms_satisfy_right_edge_value_match(ref_dispersion):
    d = ref_dispersion
    s = paper_coefficients(d, 10)
    assert s.method is Method.PAPER_CLOSED_FORM
    lhs = s.b1 * math.exp(10 * d.phi) + s.b2 * math.exp(-10 * d.phi)
    rhs = s.c1 * cmath.exp(10j * d.theta)
    assert abs(lhs - rhs) < 1e-10


@pytest.mark.parametrize("N, E", [(10, 5.5), (1, 0.12), (2, 0.5), (200, 3.0)])
def test_closed_forms_match_linear_solve(N, E):
    d = _d(N, E)
    lin = solve_boundary_system(d, N)
    closed = paper_coefficients(d, N)
    for k in ("a1", "a2", "b1", "b2"):
        a, b = getattr(closed, k), getattr(lin, k)
        assert abs(a - b) <= 1e-9 * abs(b), k
    rep = compare_methods(d, N)
    assert rep.paper_forms_consistent
    assert rep.max_deviation < 1e-8


def test_minimal_barrier_golden():
    # N = 1: the potential enters no interior site, only the two edges
    T_mp, _ = ref.transmission("0.12", "9.7", 1, 1)
    s = solve_boundary_system(_d(1, 0.12), 1)
    assert s.T == pytest.approx(float(T_mp), rel=1e-12)
    assert s.T == pytest.approx(0.063230542262390691, rel=1e-12)


def test_compare_near_cutoff_does_not_raise(caplog):
    N = 5
    E = 0.99 * energy_cutoff(ELECTRON_MASS, 1.0 / N)
    d = _d(N, E, V0=2 * E)
    with caplog.at_level(logging.INFO, logger="polytunnel.scattering"):
        rep = compare_methods(d, N)
    assert math.isfinite(rep.condition_number)
    assert "cond=" in caplog.text


def test_singular_matching_system():
    d = dispersion_from_gaps(0.3, 0.0)  # phi = 0: the two barrier solutions coincide
    with pytest.raises(SingularSystem):
        solve_boundary_system(d, 3)
    rep = compare_methods(d, 3)  # still a report
    assert not rep.paper_forms_consistent


def test_audit_over_grid(grid_points):
    audit = audit_closed_forms((compute_dispersion(p), p.num_steps) for p in grid_points[:40])
    assert len(audit.reports) == 40
    summary = audit.summary()
    assert summary["points"] == 40
    assert summary["certified"] == audit.certified


def test_wavefunction_edges(ref_dispersion):
    d = ref_dispersion
    s = solve_boundary_system(d, 10)
    samples = sample_wavefunction(s, d, (-3, 13))
    assert [w.j for w in samples] == list(range(-3, 14))
    scale = abs(s.a1)
    # j = 0: a1 + a2 = b1 + b2
    assert abs(psi_incident_region(s, d, 0) - psi_barrier_region(s, d, 0)) < 1e-10 * scale
    assert abs((s.a1 + s.a2) - (s.b1 + s.b2)) < 1e-10 * scale
    # j = N: b1 e^{N phi} + b2 e^{-N phi} = c1 e^{i N theta}
    assert abs(psi_barrier_region(s, d, 10) - psi_transmitted_region(s, d, 10)) < 1e-10


def test_pure_incident_wave_has_constant_modulus(ref_dispersion):
    d = ref_dispersion
    s = solve_boundary_system(d, 10)
    pure = ScatteringSolution(s.a1, 0j, s.b1, s.b2, s.c1, s.T, s.R, s.method, 10)
    for w in sample_wavefunction(pure, d, range(-5, 0)):
        assert abs(w.psi) == pytest.approx(abs(s.a1), rel=1e-14)


def test_continuum_limit_endpoints():
    p = validate_params({**EXPERIMENT, "N": 10})
    T_cont = continuum_transmission(p)
    dev = {N: abs(solve_boundary_system(_d(N), N).T - T_cont) / T_cont for N in (100, 2000)}
    assert dev[2000] < dev[100]
    assert dev[2000] < 1e-2


def test_solution_satisfies_raw_matching_equations(grid_points):
    # the solve uses a rescaled system; check against the equations as written
    for p in grid_points:
        d, N = compute_dispersion(p), p.num_steps
        s = solve_boundary_system(d, N, 1.0)
        A, b = matching_system(d, N, 1.0)
        x = np.array([s.a1, s.a2, s.b1, s.b2])
        scale = np.abs(A) @ np.abs(x) + np.abs(b)
        assert np.all(np.abs(A @ x - b) <= 1e-13 * scale)
