import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from disc_confine.errors import CallerError, DomainError
from disc_confine.fields import SQRT3, Constant, Critical, CriticalPauli, FieldSpec, OptimalityGauge, PowerLaw, Zero
from disc_confine.gauge import (
    calibrate_bound_constant,
    gauge_profile,
    r2a_lower_bound,
    r2a_lower_bound_t,
    verify_gauge_inverse,
)

# mpmath: int_0^0.9 u/(1-u)^2 du
POWER_R2A_AT_09 = 6.69741490700595431598200854532


def test_constant_profile_is_half_b0():
    prof = gauge_profile(Constant(3.0))
    assert prof.source == "closed-form"
    assert np.allclose(prof.a(np.array([1e-5, 0.2, 0.9])), 1.5, rtol=1e-14)


def test_zero_profile():
    prof = gauge_profile(Zero())
    assert prof.a(0.4) == 0.0 and prof.r2a(0.99) == 0.0


def test_power_law_closed_form_example():
    prof = gauge_profile(PowerLaw(1.0, 0.0))
    assert prof.r2a(0.9) == pytest.approx(POWER_R2A_AT_09, rel=1e-13)


def test_power_law_oracle_by_mpmath():
    mp.mp.dps = 25
    for r in (0.6, 0.9, 0.999):
        ref = float(mp.quad(lambda u: u * 1.3 / (1 - u) ** 2, [0.5, r]))
        assert gauge_profile(PowerLaw(1.3, 0.5)).r2a(r) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("radial", [PowerLaw(0.9, 0.5), PowerLaw(1.0, 0.0), Constant(2.0)])
def test_quadrature_matches_closed_form(radial):
    r = 1.0 - np.geomspace(0.9, 1e-6, 400)
    exact = gauge_profile(radial, method="closed-form").r2a(r)
    quad = gauge_profile(radial, method="quadrature").r2a(r)
    mask = exact > 0
    assert np.max(np.abs(quad[mask] / exact[mask] - 1.0)) <= 1e-8
    assert np.all(quad[~mask] == 0.0)


def test_critical_profile_against_mpmath():
    mp.mp.dps = 30
    prof = gauge_profile(Critical())
    t0 = mp.e ** -4

    def B(u):
        t = 1 - u
        return u * (mp.sqrt(3) / 2 / t**2 - 1 / mp.sqrt(3) / (t**2 * mp.log(1 / t)))

    for t in (1e-2, 1e-5, 1e-9):
        ref = float(mp.quad(B, [1 - t0, 1 - mp.mpf(t)]))
        assert prof.r2a_t(t) == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("radial", [Constant(2.0), PowerLaw(1.0, 0.0), Zero(), OptimalityGauge(1.0)])
def test_gauge_inverse_residual(radial):
    prof = gauge_profile(radial)
    for r in (0.5, 0.8, 0.95):
        assert verify_gauge_inverse(prof, FieldSpec(radial), r, 1e-5) <= 1e-6 * max(1.0, radial.field_t(1 - r))


def test_gauge_inverse_examples():
    assert verify_gauge_inverse(gauge_profile(Constant(2.0)), Constant(2.0), 0.5, 1e-4) <= 1e-6
    assert verify_gauge_inverse(gauge_profile(PowerLaw(1.0, 0.0)), PowerLaw(1.0, 0.0), 0.5, 1e-5) <= 1e-6
    assert verify_gauge_inverse(gauge_profile(Zero()), Zero(), 0.3, 1e-3) == 0.0


def test_gauge_inverse_near_cutoff_is_domain_error():
    with pytest.raises(DomainError):
        verify_gauge_inverse(gauge_profile(Critical()), Critical(), 1 - math.exp(-4), 1e-5)


@pytest.mark.parametrize("radial", [Critical(), CriticalPauli(1.5), PowerLaw(0.8), Constant(1.0), OptimalityGauge(2.0)])
def test_r2a_nondecreasing_and_a_nonnegative(radial):
    prof = gauge_profile(radial)
    t = np.geomspace(0.999, 1e-25, 3000)
    vals = prof.r2a_t(t)
    assert np.all(np.diff(vals) >= -1e-12 * np.abs(vals[1:]))
    assert np.all(prof.a(1.0 - t[t > 1e-15]) >= 0.0)


def test_tol_bounds():
    with pytest.raises(CallerError):
        gauge_profile(Critical(), tol=1e-15)
    with pytest.raises(CallerError):
        gauge_profile(Critical(), tol=0.1)


def test_lower_bound_leading_terms():
    for kind, lead in (("schrodinger", SQRT3 / 2), ("pauli", 1.5)):
        vals = [r2a_lower_bound_t(kind, t, 0.0, 1.5) * t for t in (1e-10, 1e-50, 1e-200)]
        assert abs(vals[-1] - lead) < 3e-3
        assert abs(vals[-1] - lead) < abs(vals[0] - lead)


@pytest.mark.parametrize("kind,alpha", [("schrodinger", 1.5), ("pauli", 1.5), ("pauli", 2.0)])
def test_lower_bound_below_critical_profile(kind, alpha):
    C = calibrate_bound_constant(kind, alpha)
    fld = Critical() if kind == "schrodinger" else CriticalPauli(alpha)
    t0 = math.exp(-4.0) if kind == "schrodinger" else math.exp(-2 * (alpha + 1))
    r = 1.0 - np.geomspace(t0 * 0.999, 1e-6, 2000)
    bound = r2a_lower_bound(kind, r, C, alpha)
    assert np.all(gauge_profile(fld).r2a(r) >= bound)


def test_lower_bound_domain():
    with pytest.raises(DomainError):
        r2a_lower_bound("schrodinger", 0.5)


@given(st.floats(min_value=1e-8, max_value=math.exp(-4.0) * 0.99))
def test_integration_by_parts_bound(t):
    # int_{r0}^r u/((1-u)^2 ln 1/(1-u)) du <= 1/(t L) + 2/(t L^2) + C with C from the lower end.
    t0 = math.exp(-4.0)
    lhs = float(mp.quad(lambda s: (1 - mp.e ** -s) * mp.e ** s / s, [4, -math.log(t)]))
    L = -math.log(t)
    C = -(1 / (t0 * 4) + 2 / (t0 * 16))
    assert lhs <= 1 / (t * L) + 2 / (t * L * L) + C + 1e-9 * lhs


def test_gauge_inverse_is_fourth_order_in_h():
    spec = PowerLaw(1.3, 0.5)
    prof = gauge_profile(spec)
    coarse = verify_gauge_inverse(prof, spec, 0.97, 2e-3)
    fine = verify_gauge_inverse(prof, spec, 0.97, 1e-3)
    assert 12.0 < coarse / fine < 20.0
