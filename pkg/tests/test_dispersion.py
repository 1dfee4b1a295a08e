import math

import pytest
from hypothesis import given, strategies as st

from polytunnel.dispersion import (
    characteristic_residuals,
    compute_dispersion,
    dispersion_from_gaps,
    stable_arccosh_from_gap,
)
from polytunnel.units import ELECTRON_MASS, energy_cutoff, validate_params

from grids import EXPERIMENT
from mp_reference import eps_lam


def test_reference_point_values(ref_dispersion):
    d = ref_dispersion
    # frozen from the 50-digit mpmath reference
    assert d.epsilon == pytest.approx(0.27821183496226129, rel=1e-14)
    assert d.lam == pytest.approx(1.5511836896651823, rel=1e-14)
    assert math.cos(d.theta) == pytest.approx(d.epsilon, rel=1e-14)
    assert math.cosh(d.phi) == pytest.approx(d.lam, rel=1e-14)


def test_half_lattice_scale_moves_towards_one():
    d1 = compute_dispersion(validate_params({**EXPERIMENT, "N": 10}))
    d2 = compute_dispersion(validate_params({**EXPERIMENT, "N": 20}))
    e_ref, l_ref = eps_lam("5.5", "9.7", "0.05")
    assert d2.epsilon == pytest.approx(float(e_ref), rel=1e-14)
    assert d2.lam == pytest.approx(float(l_ref), rel=1e-14)
    assert abs(1 - d2.epsilon) < abs(1 - d1.epsilon)
    assert abs(d2.lam - 1) < abs(d1.lam - 1)


def test_low_energy_limit():
    d = dispersion_from_gaps(1e-20, 1.0)
    assert d.epsilon == 1.0
    assert d.theta == pytest.approx(math.sqrt(2e-20), rel=1e-12)


def test_arccosh_near_one_keeps_digits():
    gap = 1e-12
    # arccosh(1 + g) = sqrt(2g) (1 - g/12 + ...)
    assert stable_arccosh_from_gap(gap) == pytest.approx(math.sqrt(2 * gap) * (1 - gap / 12), rel=1e-15)


def test_characteristic_polynomials(ref_dispersion):
    r1, r2 = characteristic_residuals(ref_dispersion)
    assert r1 < 1e-12 and r2 < 1e-12


def test_root_simplification_symbolic():
    sympy = pytest.importorskip("sympy")
    u = sympy.symbols("u", positive=True)  # u = m E mu0^2 / hbar^2
    eps = 1 - u
    printed = sympy.Rational(1, 2) * sympy.sqrt(8 * u * (u / 2 - 1))
    assert sympy.simplify(printed**2 - (eps**2 - 1)) == 0


physical = st.builds(
    lambda N, fE, fV: (N, fE, fV),
    st.integers(1, 400),
    st.floats(0.01, 0.98),
    st.floats(1.01, 30.0),
)


def _params(N, fE, fV):
    E = fE * min(energy_cutoff(ELECTRON_MASS, 1.0 / N), 40.0)
    return validate_params({"mass": ELECTRON_MASS, "E": E, "V0": fV * E, "L": 1.0, "N": N})


@given(physical)
def test_root_sum_and_product(args):
    d = compute_dispersion(_params(*args))
    rp, rm = d.free_roots()
    assert abs(rp * rm - 1) < 1e-12
    assert abs((rp + rm) - 2 * d.epsilon) < 1e-12
    bp, bm = d.barrier_roots()
    assert abs(bp * bm - 1) < 1e-12
    assert abs((bp + bm) - 2 * d.lam) < 1e-12 * max(1.0, d.lam)
    assert d.epsilon**2 < 1 and d.lam**2 > 1
    assert 0 < d.theta < math.pi and d.phi > 0


@given(physical)
def test_scaling_law(args):
    N, fE, fV = args
    p = _params(N, fE, fV)
    coarse = compute_dispersion(p)
    fine = compute_dispersion(validate_params({**p.as_raw(), "N": 2 * N}))
    assert fine.one_minus_eps == pytest.approx(coarse.one_minus_eps / 4, rel=1e-12)
    assert fine.lam_minus_one == pytest.approx(coarse.lam_minus_one / 4, rel=1e-12)
