import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from disc_confine.errors import DomainError, SpecError
from disc_confine.fields import (
    SQRT3,
    Constant,
    Critical,
    CriticalPauli,
    FieldSpec,
    OptimalityGauge,
    PowerLaw,
    SubleadingCritical,
    Tabulated,
    Zero,
    eval_field,
    field_from_json,
    optimality_field,
    optimality_gauge_profile,
    separable_perturbation,
)

# Values below were computed independently with mpmath (30 digits).
CRITICAL_AT_CUTOFF = 2151.32112032688346363819969057
OPT_D_TWO_OVER_SQRT3 = 3.19955514583114269959783359015


def test_constant_value():
    assert eval_field(FieldSpec(Constant(2.0)), 0.5) == 2.0


def test_critical_zero_far_from_boundary():
    assert eval_field(FieldSpec(Critical()), 1.0 - math.exp(-2.0)) == 0.0


def test_critical_at_cutoff_matches_closed_form():
    val = Critical().field_t(math.exp(-4.0))
    assert val == pytest.approx(CRITICAL_AT_CUTOFF, rel=1e-12)


def test_critical_pauli_support_and_value():
    f = CriticalPauli(1.5)
    assert f.field_t(math.exp(-5.0) * 1.01) == 0.0
    t = math.exp(-6.0)
    assert f.field_t(t) == pytest.approx(1.5 / t**2 - (1 / 3) / (t**2 * 6.0), rel=1e-13)


def test_domain_errors():
    for r in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            eval_field(FieldSpec(Constant(1.0)), r)
    with pytest.raises(DomainError):
        Critical().field_t(1e-301)


def test_tabulated_needs_two_samples():
    with pytest.raises(SpecError):
        Tabulated(((0.5, 1.0),))


def test_tabulated_is_monotone_and_does_not_extrapolate():
    tab = Tabulated(((0.1, 0.0), (0.5, 1.0), (0.9, 1.0)))
    r = np.linspace(0.1, 0.9, 200)
    vals = eval_field(FieldSpec(tab), r)
    assert np.all(vals >= 0.0) and np.all(vals <= 1.0)
    assert np.all(np.diff(vals) >= -1e-15)
    assert eval_field(FieldSpec(tab), 0.05) == 0.0
    with pytest.raises(DomainError):
        eval_field(FieldSpec(tab), 0.95)


def test_optimality_profile_examples():
    assert optimality_gauge_profile(1.0, 1.0 - math.exp(-1.0)) == pytest.approx(0.0, abs=1e-12)
    assert optimality_gauge_profile(1.0, 0.1) == 0.0
    d = 2.0 / SQRT3
    assert optimality_gauge_profile(d, 1.0 - math.exp(-2.0)) == pytest.approx(OPT_D_TWO_OVER_SQRT3, rel=1e-12)


def test_optimality_field_examples():
    assert optimality_field(1.0, 0.1) == 0.0
    t = math.exp(-4.0)
    assert optimality_field(1.0, 1.0 - t) >= SQRT3 / 2 * math.exp(8) - math.exp(8) / 4
    with pytest.raises(DomainError):
        optimality_field(1.0, 1.0 - math.exp(-1.0))
    # B t^2 -> sqrt(3)/2 with a 1/ln(1/t) correction.
    errs = [abs(OptimalityGauge(1.0).field_t(t) * t * t / (SQRT3 / 2) - 1.0)
            for t in (1e-4, 1e-16, 1e-64, 1e-100)]
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < 5e-3


@given(st.floats(min_value=0.58, max_value=6.0), st.floats(min_value=1e-12, max_value=0.36))
def test_optimality_field_dominates_subleading_bound(d, t):
    L = -math.log(t)
    B = OptimalityGauge(d).field_t(t)
    assert B >= (SQRT3 / 2) / t**2 - d / (t**2 * L) - 1e-9 * B


def test_optimality_rejects_d_at_or_below_threshold():
    with pytest.raises(SpecError):
        OptimalityGauge(1.0 / SQRT3)


def test_power_law_asymptotics():
    val = PowerLaw(0.9, 0.5).field_t(1e-8) * 1e-16
    assert abs(val / 0.9 - 1.0) <= 1e-6
    assert PowerLaw(0.9, 0.5).field_t(0.6) == 0.0


@pytest.mark.parametrize("radial", [
    Zero(), Constant(3.0), PowerLaw(1.2, 0.5), Critical(), CriticalPauli(1.5),
    CriticalPauli(2.0), OptimalityGauge(1.0), OptimalityGauge(6.0), SubleadingCritical(),
])
def test_builtin_families_nonnegative(radial):
    t = np.geomspace(1e-250, 0.999, 10_000)
    t = t[np.abs(t - math.exp(-1.0)) > 1e-9]
    assert np.all(radial.field_t(t) >= 0.0)


def test_critical_continuous_from_the_right_at_cutoff():
    t0 = math.exp(-4.0)
    inside = Critical().field_t(t0 * (1 - 1e-12))
    assert inside == pytest.approx(CRITICAL_AT_CUTOFF, rel=1e-9)


def test_json_round_trip():
    for radial in (Zero(), Constant(2.0), PowerLaw(0.7, 0.3), Critical(), CriticalPauli(2.0),
                   OptimalityGauge(1.5), SubleadingCritical(1.0, 0.2, 0.01),
                   Tabulated(((0.1, 1.0), (0.5, 2.0)))):
        spec = FieldSpec(radial)
        assert field_from_json(spec.to_json()).radial == radial


def test_json_errors():
    with pytest.raises(SpecError):
        field_from_json({"family": "nope"})
    with pytest.raises(SpecError):
        field_from_json({"params": {}})
    with pytest.raises(SpecError):
        field_from_json({"family": "power", "params": {"alpha": "x"}})


def test_separable_perturbation_shapes():
    p = separable_perturbation(2.0, 3, 0.0)
    assert p.b1(0.5, 0.0) == 2.0
    assert p.dtheta_b1(0.5, math.pi / 6) == pytest.approx(-6.0)
